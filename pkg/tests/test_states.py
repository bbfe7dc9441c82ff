import math

import numpy as np
import pytest

from duality.combinatorics import ModeOccupation, Permutation
from duality.errors import Degenerate, NotPSD, PauliViolation, StateValidationError
from duality.states import (
    ExternalState,
    InternalState,
    ParticleKind,
    PreparedState,
    external_from_overlaps,
    external_state,
    ideal_external,
    ideal_vector,
    internal_overlap,
    overlap_matrix,
    permute_internal,
    random_prepared_state,
    reduced_external,
    reduced_internal,
    validate_internal,
)

A, B = 0, 1


def test_example_overlaps(example_state):
    g = overlap_matrix(example_state)
    np.testing.assert_allclose(g, np.full((3, 3), 2 / 3) + np.eye(3) / 3, atol=1e-15)
    s = example_state.internal
    reps = example_state.transversal.reps
    for a, mu in enumerate(reps):
        for b, nu in enumerate(reps):
            assert internal_overlap(s, mu, nu) == pytest.approx(g[a, b], abs=1e-15)


def test_reduced_external_is_density(example_state):
    rho = reduced_external(example_state)
    assert rho.shape == (8, 8)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    np.testing.assert_allclose(rho, rho.conj().T)


def test_reduced_internal_trace(example_state):
    assert np.trace(reduced_internal(example_state)).real == pytest.approx(1.0)


def test_identical_letters_give_ideal_state():
    occ = ModeOccupation((1, 1, 1))
    for kind in ParticleKind:
        p = PreparedState(occ, kind, InternalState.pure({(A, A, A): 1.0} if kind is ParticleKind.BOSON
                                                        else {(A, A, A): 1.0}, m=1))
        np.testing.assert_allclose(reduced_external(p), ideal_external(occ, kind), atol=1e-14)


def test_orthogonal_letters_give_distinguishable_state():
    occ = ModeOccupation((1, 1, 0))
    p = PreparedState(occ, "fermion", InternalState.pure({(A, B): 1.0}, m=2))
    np.testing.assert_allclose(external_state(p).block, np.eye(2) / 2, atol=1e-15)


def test_ideal_vector_signs():
    occ = ModeOccupation((1, 1))
    v = ideal_vector(occ, "fermion")
    np.testing.assert_allclose(v, np.array([0, 1, -1, 0]) / math.sqrt(2))
    with pytest.raises(PauliViolation):
        ideal_vector(ModeOccupation((2, 0)), "fermion")


def test_product_constructor_and_dense():
    s = InternalState.product([[1, 0], [0, 1]])
    assert dict(s.components[0][1]) == {(A, B): 1.0}
    np.testing.assert_allclose(s.dense(), [0, 1, 0, 0])


def test_zero_weight_components_dropped():
    s = InternalState.mixture([(1.0, {(A,): 1.0}), (0.0, {(B,): 1.0})], m=2)
    assert len(s.components) == 1


def test_permute_internal_moves_amplitudes():
    s = InternalState.pure({(A, B, B): 1.0}, m=2)
    moved = permute_internal(s, Permutation.from_cycles("(13)", 3))
    assert dict(moved.components[0][1]) == {(B, B, A): 1.0}


def test_validation_kinds():
    occ = ModeOccupation((2, 1))
    bad_sym = InternalState.pure({(A, B, A): 1.0}, m=2)
    assert validate_internal(bad_sym, occ, "boson").kinds() == {"SymmetryViolation"}
    unnormalized = InternalState.pure({(A, A, A): 0.5}, m=2)
    assert "NotNormalized" in validate_internal(unnormalized, occ, "boson").kinds()
    pauli = InternalState.pure({(A, A, B): 1.0}, m=2)
    assert "PauliViolation" in validate_internal(pauli, occ, "fermion").kinds()
    weights = InternalState.mixture([(0.3, {(A, A, A): 1.0})], m=2)
    assert validate_internal(weights, occ, "boson").kinds() == {"BadWeights"}
    with pytest.raises(StateValidationError) as exc:
        PreparedState(occ, "boson", bad_sym)
    assert exc.value.violations[0].kind == "SymmetryViolation"


def test_fermion_antisymmetric_pair_is_valid():
    occ = ModeOccupation((2, 0))
    c = 1 / math.sqrt(2)
    s = InternalState.pure({(A, B): c, (B, A): -c}, m=2)
    assert validate_internal(s, occ, "fermion").ok
    assert not validate_internal(s, occ, "boson").ok


def test_preparation_is_validated():
    occ = ModeOccupation((2, 1))
    c = 1 / math.sqrt(3)
    s = InternalState.pure({(A, A, A): c, (A, B, B): c, (B, A, B): c}, m=2)
    PreparedState(occ, "boson", s, Permutation.from_cycles("(12)", 3))
    with pytest.raises(StateValidationError):
        PreparedState(occ, "boson", s, Permutation.from_cycles("(13)", 3))


def test_external_from_overlaps_checks():
    occ = ModeOccupation((1, 1))
    ext = external_from_overlaps(occ, "fermion", [[1, 0.5], [0.5, 1]])
    np.testing.assert_allclose(ext.block, [[0.5, -0.25], [-0.25, 0.5]])
    with pytest.raises(NotPSD):
        external_from_overlaps(occ, "boson", [[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        external_from_overlaps(occ, "boson", [[1, 0.5], [0.4, 1]])


def test_distinguishable_external():
    ext = ExternalState.distinguishable(ModeOccupation((2, 1)))
    full = ext.full()
    assert np.trace(full).real == pytest.approx(1.0)
    assert np.count_nonzero(full) == 3


def test_random_state_reproducible_and_valid():
    a = random_prepared_state(10, 300, 3, 4, 4, 3, seed=5)
    b = random_prepared_state(10, 300, 3, 4, 4, 3, seed=5)
    np.testing.assert_array_equal(overlap_matrix(a), overlap_matrix(b))
    assert a.internal.weights.sum() == pytest.approx(1.0)
    zero = random_prepared_state(0, 300, 1, 4, 4, 3, seed=5)
    np.testing.assert_allclose(overlap_matrix(zero), np.ones((6, 6)), atol=1e-12)


def test_sparse_and_dense_overlaps_agree():
    p = random_prepared_state(120, 300, 2, 3, 3, 3, seed=2)
    s = p.internal
    g = overlap_matrix(p)
    for a, mu in enumerate(p.transversal):
        for b, nu in enumerate(p.transversal):
            assert internal_overlap(s, mu, nu) == pytest.approx(g[a, b], abs=1e-13)


def test_degenerate_occupation_has_single_labeling():
    occ = ModeOccupation((3, 0))
    p = PreparedState(occ, "boson", InternalState.pure({(A, A, A): 1.0}, m=1))
    assert p.r_count == 1
    from duality.measures import wave_coherence

    with pytest.raises(Degenerate):
        wave_coherence(p)

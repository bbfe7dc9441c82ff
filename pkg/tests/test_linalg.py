import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duality.errors import CapExceeded, NotHermitian, NotPSD, NotUnitary
from duality.linalg import (
    Propagator,
    check_density,
    check_hermitian,
    check_unitary,
    fidelity,
    haar_unitary,
    partial_trace,
    psd_sqrt,
    purity,
    random_density_matrix,
    tensor,
    tensor_power,
    trace_distance,
)


def _pure(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_checks_reject_bad_input():
    with pytest.raises(NotHermitian):
        check_hermitian([[0, 1], [0, 0]])
    with pytest.raises(NotPSD):
        check_density(np.diag([1.5, -0.5]))
    with pytest.raises(NotPSD):
        check_density(np.diag([0.5, 0.4]))
    with pytest.raises(NotUnitary):
        check_unitary([[1, 1], [0, 1]])


def test_known_distances():
    a, b = _pure([1, 0]), _pure([0, 1])
    assert trace_distance(a, b) == pytest.approx(1.0)
    assert fidelity(a, b) == pytest.approx(0.0, abs=1e-15)
    plus = _pure([1, 1])
    assert fidelity(a, plus) == pytest.approx(np.sqrt(0.5), abs=1e-15)
    assert fidelity(np.eye(2) / 2, a) == pytest.approx(np.sqrt(0.5), abs=1e-15)


def test_fuchs_van_de_graaf_on_random_pairs(rng):
    for _ in range(200):
        dim = rng.integers(2, 6)
        rank = rng.integers(1, dim + 1)
        rho = random_density_matrix(dim, rng, rank)
        sigma = random_density_matrix(dim, rng)
        d, f = trace_distance(rho, sigma), fidelity(rho, sigma)
        assert 1 - f <= d + 1e-12
        assert d <= np.sqrt(1 - f**2) + 1e-12
        assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-10)


def test_fidelity_matches_eigen_definition(rng):
    for _ in range(50):
        rho = random_density_matrix(4, rng)
        sigma = random_density_matrix(4, rng)
        s = psd_sqrt(rho)
        w = np.linalg.eigvalsh(s @ sigma @ s)
        assert fidelity(rho, sigma) == pytest.approx(np.sum(np.sqrt(np.clip(w, 0, None))), abs=1e-10)


def test_pure_state_fidelity_keeps_precision(rng):
    for _ in range(50):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        w = rng.normal(size=8) + 1j * rng.normal(size=8)
        v, w = v / np.linalg.norm(v), w / np.linalg.norm(w)
        assert fidelity(_pure(v), _pure(w)) == pytest.approx(abs(np.vdot(v, w)), abs=1e-13)


def test_unitary_invariance_and_multiplicativity(rng):
    rho, sigma = random_density_matrix(3, rng), random_density_matrix(3, rng)
    u = haar_unitary(3, rng)
    assert trace_distance(u @ rho @ u.conj().T, u @ sigma @ u.conj().T) == pytest.approx(trace_distance(rho, sigma))
    assert fidelity(u @ rho @ u.conj().T, u @ sigma @ u.conj().T) == pytest.approx(fidelity(rho, sigma))
    tau = random_density_matrix(2, rng)
    assert fidelity(np.kron(rho, tau), np.kron(sigma, tau)) == pytest.approx(fidelity(rho, sigma), abs=1e-10)


def test_partial_trace(rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(3, rng)
    joint = np.kron(a, b)
    np.testing.assert_allclose(partial_trace(joint, (2, 3), "A"), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(joint, (2, 3), "B"), b, atol=1e-14)
    bell = _pure([1, 0, 0, 1])
    np.testing.assert_allclose(partial_trace(bell, (2, 2), "A"), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_contracts_distance(rng):
    for _ in range(30):
        rho, sigma = random_density_matrix(6, rng), random_density_matrix(6, rng)
        assert trace_distance(partial_trace(rho, (2, 3)), partial_trace(sigma, (2, 3))) <= trace_distance(
            rho, sigma
        ) + 1e-12


def test_tensor_power_and_cap():
    np.testing.assert_array_equal(tensor_power(np.eye(2), 3), np.eye(8))
    assert tensor(np.eye(4), np.eye(4)).shape == (16, 16)
    with pytest.raises(CapExceeded):
        tensor_power(np.eye(4), 7)


def test_purity():
    assert purity(np.eye(4) / 4) == pytest.approx(0.25)


@settings(max_examples=30)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_propagator_group_law(t1, t2):
    h = np.array([[1.0, 0.3 - 0.2j, 0], [0.3 + 0.2j, -0.5, 1.0], [0, 1.0, 0.2]])
    prop = Propagator(h)
    np.testing.assert_allclose(prop(t1) @ prop(t2), prop(t1 + t2), atol=1e-12)
    check_unitary(prop(t1))


def test_propagator_matches_scipy_expm():
    from scipy.linalg import expm

    h = np.array([[0.0, 1.0], [1.0, 0.5]])
    np.testing.assert_allclose(Propagator(h)(1.7), expm(-1j * 1.7 * h), atol=1e-12)

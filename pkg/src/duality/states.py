"""Internal states, prepared many-particle states and their reduced external/internal states.

An internal state is a mixture of pure N-particle internal states, each given
by a sparse map from internal letter tuples (0-based, one letter per particle
slot) to complex amplitudes. A :class:`PreparedState` places N particles in a
fixed mode occupation; its reduced external state lives on the span of the
basis states ``|E_mu>`` for the labelings ``mu`` of the right transversal and
is stored as an ``R x R`` block (:class:`ExternalState`).

The joint external (x) internal state is never built here; see
:mod:`duality.oracle` for the brute-force reference.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .combinatorics import (
    ModeOccupation,
    Permutation,
    Transversal,
    apply,
    assignment_index,
    compose,
    invert,
    right_transversal,
    stabilizer,
)
from .config import LIMITS, TOL
from .errors import CapExceeded, NotPSD, PauliViolation, StateValidationError


class ParticleKind(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    def sign(self, perm: Permutation) -> int:
        """Exchange phase: 1 for bosons, the parity of ``perm`` for fermions."""
        return 1 if self is ParticleKind.BOSON else perm.sign

    @classmethod
    def parse(cls, value) -> "ParticleKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"particle kind must be 'boson' or 'fermion', not {value!r}") from None


Amplitudes = Mapping[tuple, complex]


def _clean(amps: Mapping, n_particles: int | None, m: int) -> tuple[dict, int]:
    out = {}
    for key, value in amps.items():
        key = tuple(int(i) for i in key)
        if n_particles is None:
            n_particles = len(key)
        if len(key) != n_particles:
            raise ValueError(f"tuple {key} does not have {n_particles} entries")
        if any(not 0 <= i < m for i in key):
            raise ValueError(f"tuple {key} has letters outside 0..{m - 1}")
        value = complex(value)
        if abs(value) > TOL.amp_drop:
            out[key] = out.get(key, 0) + value
    if n_particles is None:
        raise ValueError("cannot infer particle number from an empty amplitude map")
    return out, n_particles


@dataclass(frozen=True, eq=False)
class InternalState:
    """Mixture ``sum_j q_j |Omega_j><Omega_j|`` of pure internal states.

    Components with zero weight are dropped at construction.
    """

    m: int
    n_particles: int
    components: tuple[tuple[float, Mapping[tuple, complex]], ...]

    @classmethod
    def mixture(cls, components: Iterable[tuple[float, Mapping]], m: int, n_particles: int | None = None) -> "InternalState":
        comps = []
        for q, amps in components:
            amps, n_particles = _clean(amps, n_particles, m)
            if float(q) != 0.0:
                comps.append((float(q), MappingProxyType(amps)))
        if n_particles is None:
            raise ValueError("empty mixture")
        return cls(m, n_particles, tuple(comps))

    @classmethod
    def pure(cls, amps: Mapping, m: int, n_particles: int | None = None) -> "InternalState":
        return cls.mixture([(1.0, amps)], m, n_particles)

    @classmethod
    def product(cls, vectors: Sequence[Sequence[complex]]) -> "InternalState":
        """Pure product state ``phi_1 (x) ... (x) phi_N`` from single-particle vectors."""
        vectors = [np.asarray(v, dtype=complex) for v in vectors]
        m = len(vectors[0])
        return cls.from_dense(_kron_all(vectors), m, len(vectors))

    @classmethod
    def from_dense(cls, vec, m: int, n_particles: int) -> "InternalState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.size != m**n_particles:
            raise ValueError(f"vector of size {vec.size} is not {m}**{n_particles}")
        amps = {
            key: vec[i]
            for i, key in enumerate(itertools.product(range(m), repeat=n_particles))
            if abs(vec[i]) > TOL.amp_drop
        }
        return cls.pure(amps, m, n_particles)

    @property
    def weights(self) -> np.ndarray:
        return np.array([q for q, _ in self.components])

    def dense(self, index: int = 0) -> np.ndarray:
        """Amplitude vector of one component in the ``m**N`` Kronecker basis."""
        dim = self.m**self.n_particles
        if dim > LIMITS.max_dim:
            raise CapExceeded(f"internal dimension {dim} exceeds cap {LIMITS.max_dim}")
        vec = np.zeros(dim, dtype=complex)
        for key, value in self.components[index][1].items():
            vec[assignment_index(key, self.m)] = value
        return vec

    def dense_tensor(self, index: int = 0) -> np.ndarray:
        return self.dense(index).reshape((self.m,) * self.n_particles)


def _kron_all(vectors):
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def permute_internal(s: InternalState, kappa: Permutation) -> InternalState:
    """State whose unpermuted component equals ``Omega_kappa``: amplitude ``C_I`` moves to ``I_kappa``."""
    if kappa.n != s.n_particles:
        raise ValueError(f"permutation on {kappa.n} points for {s.n_particles} particles")
    comps = tuple(
        (q, MappingProxyType({apply(kappa, key): value for key, value in amps.items()}))
        for q, amps in s.components
    )
    return InternalState(s.m, s.n_particles, comps)


def internal_overlap(s: InternalState, mu: Permutation, nu: Permutation) -> complex:
    """``sum_j q_j <Omega_nu^(j) | Omega_mu^(j)>`` by a sparse inner product.

    Only ``nu o mu^-1`` matters: ``<Omega_nu|Omega_mu> = sum_I conj(C_I) C_{I_(nu mu^-1)}``.
    """
    rel = compose(nu, invert(mu))
    total = 0j
    for q, amps in s.components:
        acc = 0j
        for key, value in amps.items():
            other = amps.get(apply(rel, key))
            if other is not None:
                acc += value.conjugate() * other
        total += q * acc
    return total


def labeled_vectors(s: InternalState, reps: Sequence[Permutation], index: int) -> np.ndarray:
    """Columns ``Omega_mu`` (dense) of one component for each ``mu`` in ``reps``."""
    t = s.dense_tensor(index)
    return np.stack([np.transpose(t, mu.images).reshape(-1) for mu in reps], axis=1)


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # BadWeights | NotNormalized | SymmetryViolation | PauliViolation | ShapeMismatch
    component: int | None
    tuple: tuple | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def raise_if_invalid(self):
        if self.violations:
            first = self.violations[0]
            raise StateValidationError(f"{first.kind}: {first.message}", self.violations)


def _block_transpositions(occ: ModeOccupation) -> list[Permutation]:
    n = occ.n_particles
    out = []
    for block in occ.blocks():
        for i in block[:-1]:
            images = list(range(n))
            images[i], images[i + 1] = i + 1, i
            out.append(Permutation(tuple(images)))
    return out


def validate_internal(s: InternalState, occ: ModeOccupation, kind: ParticleKind) -> ValidationReport:
    """Check weights, normalization, exchange symmetry within modes and Pauli exclusion."""
    kind = ParticleKind.parse(kind)
    report = ValidationReport()
    add = report.violations.append
    if s.n_particles != occ.n_particles:
        add(Violation("ShapeMismatch", None, None,
                      f"internal state has {s.n_particles} particles, occupation has {occ.n_particles}"))
        return report
    q = s.weights
    if q.size == 0 or np.any(q < 0) or abs(q.sum() - 1) > TOL.norm_tol:
        add(Violation("BadWeights", None, None, f"weights {q.tolist()} must be >= 0 and sum to 1"))
    gens = _block_transpositions(occ)
    blocks = occ.blocks()
    for j, (_, amps) in enumerate(s.components):
        norm = sum(abs(v) ** 2 for v in amps.values())
        if abs(norm - 1) > TOL.norm_tol:
            add(Violation("NotNormalized", j, None, f"component {j} has squared norm {norm:.12g}"))
        if kind is ParticleKind.FERMION:
            for key, value in amps.items():
                for block in blocks:
                    letters = [key[i] for i in block]
                    if len(set(letters)) < len(letters):
                        add(Violation("PauliViolation", j, key,
                                      f"fermions in slots {[i + 1 for i in block]} share an internal letter"))
                        break
            if len(blocks) < occ.n_particles and _antisymmetrized_norm(amps, occ) < TOL.pauli_floor:
                add(Violation("PauliViolation", j, None,
                              f"component {j} vanishes under antisymmetrization within modes"))
        for xi in gens:
            sign = kind.sign(xi)
            for key, value in amps.items():
                partner = amps.get(apply(xi, key), 0)
                if abs(partner - sign * value) > TOL.norm_tol:
                    add(Violation("SymmetryViolation", j, key,
                                  f"C{_fmt(apply(xi, key))} = {partner:.6g} but exchange {xi} requires "
                                  f"{sign * value:.6g}"))
                    break
    return report


def _fmt(key):
    return "(" + ",".join(str(i + 1) for i in key) + ")"


def _antisymmetrized_norm(amps: Mapping, occ: ModeOccupation) -> float:
    group = stabilizer(occ)
    out: dict = {}
    for key, value in amps.items():
        for xi in group:
            k = apply(xi, key)
            out[k] = out.get(k, 0) + xi.sign * value / len(group)
    return math.sqrt(sum(abs(v) ** 2 for v in out.values()))


# -- prepared states and reduced states -----------------------------------------


@dataclass(frozen=True, eq=False)
class PreparedState:
    """N particles in occupation ``occupation`` with internal state ``internal``.

    ``preparation`` permutes the internal state before symmetrization; the
    resulting labeled internal states are ``Omega_(kappa mu)``.
    """

    occupation: ModeOccupation
    kind: ParticleKind
    internal: InternalState
    preparation: Permutation | None = None
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", ParticleKind.parse(self.kind))
        if not isinstance(self.occupation, ModeOccupation):
            object.__setattr__(self, "occupation", ModeOccupation(tuple(self.occupation)))
        if self.preparation is None:
            object.__setattr__(self, "preparation", Permutation.identity(self.occupation.n_particles))
        if self.validate:
            validate_internal(self.effective_internal, self.occupation, self.kind).raise_if_invalid()

    @property
    def transversal(self) -> Transversal:
        return right_transversal(self.occupation)

    @property
    def r_count(self) -> int:
        return self.occupation.r_count

    @property
    def effective_internal(self) -> InternalState:
        if self.preparation.is_identity():
            return self.internal
        return permute_internal(self.internal, self.preparation)

    def permuted(self, kappa: Permutation) -> "PreparedState":
        """Same state with the preparation permutation replaced by ``kappa``.

        Labeled internal states become ``Omega_(kappa mu)`` for ``mu`` in the
        transversal. Not validated: with multiply occupied modes the permuted
        internal state need not be exchange symmetric within a mode.
        """
        return PreparedState(self.occupation, self.kind, self.internal, kappa, validate=False)


@dataclass(frozen=True, eq=False)
class ExternalState:
    """Reduced external state stored on the labeling subspace.

    ``block[a, b]`` is the matrix element between ``|E_mu_a>`` and
    ``|E_mu_b>`` for the transversal representatives ``mu_a, mu_b``.
    """

    occupation: ModeOccupation
    kind: ParticleKind
    block: np.ndarray

    @property
    def transversal(self) -> Transversal:
        return right_transversal(self.occupation)

    @property
    def r_count(self) -> int:
        return self.block.shape[0]

    @property
    def dim(self) -> int:
        return self.occupation.n_modes**self.occupation.n_particles

    def basis_indices(self) -> list[int]:
        n = self.occupation.n_modes
        return [assignment_index(a, n) for a in self.transversal.assignments]

    def embed(self, block: np.ndarray) -> np.ndarray:
        """Place an ``R x R`` block into the full ``n**N`` external space."""
        if self.dim > LIMITS.max_dim:
            raise CapExceeded(f"external dimension {self.dim} exceeds cap {LIMITS.max_dim}")
        idx = self.basis_indices()
        full = np.zeros((self.dim, self.dim), dtype=complex)
        full[np.ix_(idx, idx)] = block
        return full

    def full(self) -> np.ndarray:
        return self.embed(self.block)

    def signs(self) -> np.ndarray:
        return np.array([self.kind.sign(mu) for mu in self.transversal], dtype=float)

    @classmethod
    def distinguishable(cls, occ: ModeOccupation, kind=ParticleKind.BOSON) -> "ExternalState":
        r = occ.r_count
        return cls(occ, ParticleKind.parse(kind), np.eye(r, dtype=complex) / r)


def overlap_matrix(p: PreparedState) -> np.ndarray:
    """``G[a, b] = sum_j q_j <Omega_(kappa mu_b)|Omega_(kappa mu_a)>`` over the transversal."""
    s = p.effective_internal
    reps = p.transversal.reps
    r = len(reps)
    if s.m**s.n_particles <= LIMITS.max_dim:
        g = np.zeros((r, r), dtype=complex)
        for j, (q, _) in enumerate(s.components):
            v = labeled_vectors(s, reps, j)
            g += q * (v.conj().T @ v).T
        return g
    g = np.empty((r, r), dtype=complex)
    for a, mu in enumerate(reps):
        for b, nu in enumerate(reps):
            g[a, b] = internal_overlap(s, mu, nu)
    return g


def external_from_overlaps(occ: ModeOccupation, kind, overlaps, *, check: bool = True) -> ExternalState:
    """Reduced external state from a labeling overlap (Gram) matrix with unit diagonal."""
    kind = ParticleKind.parse(kind)
    g = np.asarray(overlaps, dtype=complex)
    r = occ.r_count
    if g.shape != (r, r):
        raise ValueError(f"overlap matrix must be {r} x {r}, got {g.shape}")
    if check:
        if np.max(np.abs(np.diag(g) - 1)) > TOL.norm_tol:
            raise ValueError("overlap matrix must have unit diagonal")
        if np.max(np.abs(g - g.conj().T)) > TOL.herm_tol:
            raise ValueError("overlap matrix must be Hermitian")
        if np.linalg.eigvalsh((g + g.conj().T) / 2)[0] < TOL.psd_floor * r:
            raise NotPSD("overlap matrix must be positive semidefinite")
    signs = np.array([kind.sign(mu) for mu in right_transversal(occ)], dtype=float)
    return ExternalState(occ, kind, np.outer(signs, signs) * g / r)


def external_state(p: PreparedState) -> ExternalState:
    return external_from_overlaps(p.occupation, p.kind, overlap_matrix(p), check=False)


def reduced_external(p: PreparedState) -> np.ndarray:
    """Reduced external density matrix in the full ``n**N`` basis."""
    return external_state(p).full()


def reduced_internal_labeled(p: PreparedState, mu: Permutation) -> np.ndarray:
    """``sum_j q_j |Omega_(kappa mu)^(j)><Omega_(kappa mu)^(j)|`` as an ``m**N`` matrix."""
    s = p.effective_internal
    dim = s.m**s.n_particles
    rho = np.zeros((dim, dim), dtype=complex)
    for j, (q, _) in enumerate(s.components):
        v = labeled_vectors(s, [mu], j)[:, 0]
        rho += q * np.outer(v, v.conj())
    return rho


def reduced_internal(p: PreparedState) -> np.ndarray:
    """Balanced mixture of the labeled internal states."""
    reps = p.transversal.reps
    return sum(reduced_internal_labeled(p, mu) for mu in reps) / len(reps)


def ideal_block_vector(occ: ModeOccupation, kind) -> np.ndarray:
    kind = ParticleKind.parse(kind)
    if kind is ParticleKind.FERMION and not occ.is_singly_occupied():
        raise PauliViolation(f"no fermionic state of indistinguishable particles with occupation {occ.counts}")
    reps = right_transversal(occ).reps
    return np.array([kind.sign(mu) for mu in reps], dtype=complex) / math.sqrt(len(reps))


def ideal_vector(occ: ModeOccupation, kind) -> np.ndarray:
    """State vector of perfectly indistinguishable bosons or fermions in the ``n**N`` basis."""
    ext = ExternalState.distinguishable(occ, kind)
    vec = np.zeros(ext.dim, dtype=complex)
    vec[ext.basis_indices()] = ideal_block_vector(occ, kind)
    return vec


def ideal_external(occ: ModeOccupation, kind) -> np.ndarray:
    v = ideal_vector(occ, kind)
    return np.outer(v, v.conj())


def distinguishable_external(occ: ModeOccupation, kind=ParticleKind.BOSON) -> np.ndarray:
    return ExternalState.distinguishable(occ, kind).full()


# -- random states ----------------------------------------------------------


def random_prepared_state(
    k: int,
    total: int,
    n_components: int,
    n_modes: int,
    m: int,
    n_particles: int,
    seed: int,
    kind=ParticleKind.BOSON,
) -> PreparedState:
    """Random partially distinguishable state number ``k`` of a sweep of ``total``.

    Particles occupy the first ``n_particles`` modes singly. Each coefficient
    is ``r exp(i phi)`` with ``r ~ U[1 - k/total, 1]`` and
    ``phi ~ U[-pi k/total, pi k/total]``; components are then normalized and
    mixed with weights drawn from ``U[0, 1]`` and rescaled to sum to one.
    ``k = 0`` gives indistinguishable particles.
    """
    if n_particles > n_modes:
        raise ValueError("random states use singly occupied modes: need n_particles <= n_modes")
    rng = np.random.default_rng(np.random.SeedSequence([seed, k, n_components, total]))
    frac = k / total
    dim = m**n_particles
    q = rng.uniform(0.0, 1.0, size=n_components)
    q = q / q.sum()
    comps = []
    for qj in q:
        r = rng.uniform(1.0 - frac, 1.0, size=dim)
        phi = rng.uniform(-np.pi * frac, np.pi * frac, size=dim)
        vec = r * np.exp(1j * phi)
        vec = vec / np.linalg.norm(vec)
        keys = itertools.product(range(m), repeat=n_particles)
        comps.append((qj, {key: vec[i] for i, key in enumerate(keys)}))
    occ = ModeOccupation((1,) * n_particles + (0,) * (n_modes - n_particles))
    return PreparedState(occ, kind, InternalState.mixture(comps, m, n_particles))

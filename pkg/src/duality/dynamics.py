"""Evolutions, measurements and outcome statistics on the ``n**N`` external space.

Units are hbar = 1; Bose-Hubbard times are measured in ``1/J``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import (
    Permutation,
    assignment_index,
    enumerate_occupations,
    right_transversal,
    canonical_assignment,
    apply,
)
from .config import LIMITS, TOL
from .errors import CapExceeded, NonPhysical, NotPSD
from .linalg import check_hermitian, check_unitary, tensor_power
from .measures import ProbDist
from .states import ExternalState, PreparedState, external_state

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Povm:
    """Labeled effects; validated PSD and complete on construction."""

    effects: tuple[tuple[object, np.ndarray], ...]

    def __post_init__(self):
        effects = tuple((label, check_hermitian(e)) for label, e in self.effects)
        if not effects:
            raise ValueError("a POVM needs at least one effect")
        dim = effects[0][1].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for label, e in effects:
            if e.shape != (dim, dim):
                raise ValueError(f"effect {label!r} has shape {e.shape}, expected {(dim, dim)}")
            w = np.linalg.eigvalsh(e)
            if w[0] < TOL.psd_floor:
                raise NotPSD(f"effect {label!r} has eigenvalue {w[0]:.3e}")
            total += e
        dev = np.max(np.abs(total - np.eye(dim)))
        if dev > TOL.povm_tol:
            raise ValueError(f"effects sum to identity only within {dev:.3e}")
        object.__setattr__(self, "effects", effects)

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.effects)

    @property
    def dim(self) -> int:
        return self.effects[0][1].shape[0]

    def __getitem__(self, label) -> np.ndarray:
        return self.effects[self.labels.index(label)][1]

    def __len__(self):
        return len(self.effects)


# -- unitaries and Hamiltonians -----------------------------------------------------


def lift_single_particle(u, n_particles: int) -> np.ndarray:
    """``u (x) ... (x) u`` acting identically on every particle slot."""
    u = check_unitary(u)
    return tensor_power(u, n_particles)


def slot_permutation_operator(perm: Permutation, n_modes: int) -> np.ndarray:
    """Operator mapping ``|e_1, ..., e_N>`` to ``|apply(perm, e)>``."""
    n = perm.n
    dim = n_modes**n
    if dim > LIMITS.max_dim:
        raise CapExceeded(f"dimension {dim} exceeds cap {LIMITS.max_dim}")
    idx = np.arange(dim).reshape((n_modes,) * n)
    source = np.transpose(idx, perm.images).reshape(-1)
    op = np.zeros((dim, dim))
    op[np.arange(dim), source] = 1.0
    return op


@dataclass(frozen=True)
class BoseHubbardParams:
    """Open-chain Bose-Hubbard model in first quantization.

    ``omegas`` are on-site energies; for two sites the tilt is ``omegas[1] - omegas[0]``.
    """

    n_sites: int
    n_particles: int
    hopping: float = 1.0
    interaction: float = 0.0
    omegas: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.n_sites < 1 or self.n_particles < 1:
            raise ValueError("need at least one site and one particle")
        omegas = tuple(float(w) for w in self.omegas) or (0.0,) * self.n_sites
        if len(omegas) != self.n_sites:
            raise ValueError(f"{len(omegas)} on-site energies for {self.n_sites} sites")
        object.__setattr__(self, "omegas", omegas)
        dim = self.n_sites**self.n_particles
        if dim > LIMITS.max_dim:
            raise CapExceeded(f"Hamiltonian dimension {dim} exceeds cap {LIMITS.max_dim}")

    @classmethod
    def double_well(cls, n_particles: int, hopping: float = 1.0, interaction: float = 0.0,
                    tilt: float = 0.0) -> "BoseHubbardParams":
        return cls(2, n_particles, hopping, interaction, (0.0, tilt))

    @property
    def tilt(self) -> float:
        if self.n_sites != 2:
            raise ValueError("tilt is defined for two sites only")
        return self.omegas[1] - self.omegas[0]


def single_particle_hamiltonian(p: BoseHubbardParams) -> np.ndarray:
    h = np.diag(np.asarray(p.omegas, dtype=complex))
    for j in range(p.n_sites - 1):
        h[j, j + 1] -= p.hopping
        h[j + 1, j] -= p.hopping
    return h


def bose_hubbard_hamiltonian(p: BoseHubbardParams) -> np.ndarray:
    """Hopping, pairwise on-site interaction and on-site energies in the ``n**N`` basis."""
    n, big_n = p.n_sites, p.n_particles
    h1 = single_particle_hamiltonian(p)
    eye = np.eye(n)
    h = np.zeros((n**big_n, n**big_n), dtype=complex)
    for slot in range(big_n):
        ops = [eye] * big_n
        ops[slot] = h1
        term = ops[0]
        for o in ops[1:]:
            term = np.kron(term, o)
        h += term
    pairs = np.zeros(n**big_n)
    for idx, assignment in enumerate(np.ndindex(*(n,) * big_n)):
        counts = np.bincount(assignment, minlength=n)
        pairs[idx] = sum(c * (c - 1) // 2 for c in counts)
    h += np.diag(p.interaction * pairs)
    return check_hermitian(h)


# -- POVMs ---------------------------------------------------------------------------


def _assignments(n_modes: int, n_particles: int):
    return np.array(list(np.ndindex(*(n_modes,) * n_particles)), dtype=int).reshape(-1, n_particles)


def povm_occupation(n_modes: int, n_particles: int) -> Povm:
    """Projectors onto fixed output occupations, labeled by occupation tuples."""
    dim = n_modes**n_particles
    if dim > LIMITS.max_dim:
        raise CapExceeded(f"dimension {dim} exceeds cap {LIMITS.max_dim}")
    effects = []
    for occ in enumerate_occupations(n_modes, n_particles):
        diag = np.zeros(dim)
        e = canonical_assignment(occ)
        for mu in right_transversal(occ):
            diag[assignment_index(apply(mu, e), n_modes)] = 1.0
        effects.append((occ.counts, np.diag(diag).astype(complex)))
    return Povm(tuple(effects))


_KPOINT_TERMS = {
    1: [(1, 0), (0, 1)],
    2: [(2, 0), (0, 2), (1, 1)],
    3: [(3, 0), (0, 3), (1, 2), (2, 1)],
    4: [(4, 0), (0, 4), (1, 3), (3, 1), (2, 2)],
}


def _kpoint_label(a: int, b: int) -> str:
    coef = math.comb(a + b, a)
    parts = [f"{coef}" if coef > 1 else ""]
    if a:
        parts.append("M1" + (f"^{a}" if a > 1 else ""))
    if b:
        parts.append("M2" + (f"^{b}" if b > 1 else ""))
    return " ".join(x for x in parts if x)


def povm_kpoint(n_particles: int, k: int, n_modes: int = 2) -> Povm:
    """Double-well ``k``-point density correlators with binomial weights.

    ``M_j`` is the fraction of particles on site ``j``. Labels such as
    ``"2 M1 M2"`` include the binomial coefficient.
    """
    if n_modes != 2:
        raise ValueError("k-point correlators are defined for two sites only")
    if k not in _KPOINT_TERMS:
        raise ValueError(f"k must be 1, 2, 3 or 4, not {k}")
    if k > n_particles:
        raise ValueError(f"k = {k} exceeds the particle number {n_particles}")
    frac1 = (_assignments(2, n_particles) == 0).sum(axis=1) / n_particles
    frac2 = 1.0 - frac1
    effects = []
    for a, b in _KPOINT_TERMS[k]:
        diag = math.comb(a + b, a) * frac1**a * frac2**b
        effects.append((_kpoint_label(a, b), np.diag(diag).astype(complex)))
    return Povm(tuple(effects))


def povm_helstrom(rho_a, rho_b) -> Povm:
    """Projectors onto the non-negative and negative eigenspaces of ``rho_a - rho_b``.

    Zero eigenvalues go to the first effect.
    """
    rho_a, rho_b = np.asarray(rho_a, dtype=complex), np.asarray(rho_b, dtype=complex)
    if rho_a.shape != rho_b.shape:
        raise ValueError(f"dimension mismatch: {rho_a.shape} vs {rho_b.shape}")
    w, v = np.linalg.eigh(check_hermitian(rho_a - rho_b))
    keep = w >= -TOL.helstrom_zero
    plus = v[:, keep] @ v[:, keep].conj().T
    minus = v[:, ~keep] @ v[:, ~keep].conj().T
    return Povm((("+", plus), ("-", minus)))


# -- statistics -------------------------------------------------------------------


def _evolve(rho, u) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if u is None:
        return rho
    u = np.asarray(u, dtype=complex)
    if u.shape != rho.shape:
        raise ValueError(f"unitary of shape {u.shape} for state of shape {rho.shape}")
    return u @ rho @ u.conj().T


def _expectation(effect, rho) -> float:
    return float(np.real(np.sum(effect.T * rho)))


def measure(rho, u, povm: Povm) -> ProbDist:
    """Outcome distribution ``tr[M_j U rho U^dagger]``; ``u=None`` means no evolution."""
    rho_out = _evolve(rho, u)
    if rho_out.shape[0] != povm.dim:
        raise ValueError(f"state dimension {rho_out.shape[0]} but POVM dimension {povm.dim}")
    probs = np.array([_expectation(e, rho_out) for _, e in povm.effects])
    if probs.min() < -TOL.prob_fail:
        raise NonPhysical(f"probability {probs.min():.3e} is negative")
    probs = np.clip(probs, 0.0, None)
    drift = abs(probs.sum() - 1)
    if drift > TOL.prob_fail:
        raise NonPhysical(f"probabilities sum to {probs.sum():.12g}")
    if drift > TOL.prob_drift:
        log.warning("renormalizing probabilities with drift %.3e", drift)
        probs = probs / probs.sum()
    return ProbDist(povm.labels, probs)


def interference_decomposition(state, u, effect) -> tuple[float, float]:
    """Split ``tr[M U rho_E U^dagger]`` into its distinguishable part and the coherence term.

    ``state`` is a :class:`PreparedState` or :class:`ExternalState`; ``u=None`` means no evolution.
    """
    ext = state if isinstance(state, ExternalState) else external_state(state)
    effect = np.asarray(effect, dtype=complex)
    if u is not None:
        u = np.asarray(u, dtype=complex)
        effect = u.conj().T @ effect @ u
    idx = ext.basis_indices()
    sub = effect[np.ix_(idx, idx)]
    r = ext.r_count
    p_dist = float(np.real(np.trace(sub))) / r
    # sum over a != b of block[a, b] <E_b|U^dagger M U|E_a>
    coherent = np.sum(ext.block * sub.T) - np.sum(np.diag(ext.block) * np.diag(sub))
    return p_dist, float(np.real(coherent))



def permuted_statistics(p: PreparedState, u, povm: Povm) -> list[ProbDist]:
    """Output distributions of ``p`` with each transversal permutation as the preparation."""
    return [measure(external_state(p.permuted(kappa)).full(), u, povm) for kappa in p.transversal]

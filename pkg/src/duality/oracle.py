"""Brute-force reference implementations for cross-checking the fast paths.

Nothing here reuses the overlap/transversal machinery of :mod:`duality.states`:
joint states are (anti)symmetrized by summing over all ``N!`` simultaneous slot
permutations, reduced states come from literal index contraction and output
probabilities of non-interacting bosons come from matrix permanents.
Costs are factorial by design; use for tests only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combinatorics import ModeOccupation, Permutation, all_permutations, enumerate_occupations
from .config import LIMITS, TOL
from .errors import CapExceeded, InvariantViolation, NormZero
from .states import ParticleKind, PreparedState


@dataclass(frozen=True, eq=False)
class JointState:
    """Density matrix on external (x) internal space, external index most significant."""

    rho: np.ndarray
    n_modes: int
    m: int
    n_particles: int

    @property
    def dims(self) -> tuple[int, int]:
        return self.n_modes**self.n_particles, self.m**self.n_particles

    @property
    def dim(self) -> int:
        d_e, d_i = self.dims
        return d_e * d_i


def _sign(images: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(images)), 2) if images[i] > images[j])
    return -1 if inversions % 2 else 1


def _joint_vector(p: PreparedState, component: int) -> np.ndarray:
    big_n = p.occupation.n_particles
    n, m = p.occupation.n_modes, p.internal.m
    ext = np.zeros((n,) * big_n)
    modes = [j for j, c in enumerate(p.occupation.counts) for _ in range(c)]
    ext[tuple(modes)] = 1.0
    internal = np.zeros((m,) * big_n, dtype=complex)
    prep = p.preparation.images
    for key, value in p.internal.components[component][1].items():
        internal[tuple(key[prep[i]] for i in range(big_n))] = value
    base = np.multiply.outer(ext, internal)
    fermion = p.kind is ParticleKind.FERMION
    total = np.zeros_like(base)
    for images in itertools.permutations(range(big_n)):
        axes = list(images) + [big_n + i for i in images]
        sign = _sign(images) if fermion else 1
        total += sign * np.transpose(base, axes)
    return total.reshape(-1)


def brute_force_joint(p: PreparedState) -> JointState:
    """Joint state from explicit (anti)symmetrization of every mixture component."""
    big_n = p.occupation.n_particles
    n, m = p.occupation.n_modes, p.internal.m
    dim = (n * m) ** big_n
    if dim > LIMITS.max_joint_dim:
        raise CapExceeded(f"joint dimension {dim} exceeds cap {LIMITS.max_joint_dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    for j, (q, _) in enumerate(p.internal.components):
        psi = _joint_vector(p, j)
        norm = np.linalg.norm(psi)
        if norm < TOL.pauli_floor:
            raise NormZero(f"component {j} vanishes under (anti)symmetrization")
        psi = psi / norm
        rho += q * np.outer(psi, psi.conj())
    joint = JointState(rho, n, m, big_n)
    _check_exchange_symmetry(joint)
    return joint


def _check_exchange_symmetry(joint: JointState):
    big_n = joint.n_particles
    shape = (joint.n_modes,) * big_n + (joint.m,) * big_n
    t = joint.rho.reshape(shape + shape)
    for images in itertools.permutations(range(big_n)):
        axes = list(images) + [big_n + i for i in images]
        both = axes + [2 * big_n + a for a in axes]
        dev = np.max(np.abs(np.transpose(t, both) - t))
        if dev > TOL.herm_tol:
            raise InvariantViolation(f"joint state not exchange symmetric under {images}: {dev:.3e}")


def oracle_reduced(joint: JointState, keep: str) -> np.ndarray:
    """Partial trace of the joint state by direct index contraction."""
    d_e, d_i = joint.dims
    t = joint.rho.reshape(d_e, d_i, d_e, d_i)
    if keep == "external":
        return np.trace(t, axis1=1, axis2=3)
    if keep == "internal":
        return np.trace(t, axis1=0, axis2=2)
    raise ValueError(f"keep must be 'external' or 'internal', not {keep!r}")


# -- permanents -----------------------------------------------------------------


def permanent(a) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code updates."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"permanent needs a square matrix, got {a.shape}")
    if n == 0:
        return 1.0 + 0j
    total = 0j
    row_sums = np.zeros(n, dtype=complex)
    prev_gray = 0
    for k in range(1, 2**n):
        gray = k ^ (k >> 1)
        changed = (gray ^ prev_gray).bit_length() - 1
        if gray & (1 << changed):
            row_sums += a[:, changed]
        else:
            row_sums -= a[:, changed]
        prev_gray = gray
        subset_size = bin(gray).count("1")
        total += (-1) ** subset_size * np.prod(row_sums)
    return (-1) ** n * total


def second_quantized_reference(u, occ_in, occ_out, internal_vectors) -> float:
    """Output-occupation probability of non-interacting bosons with product internal states.

    Args:
        u: single-particle unitary, ``n x n``.
        occ_in: input occupation; particle ``a`` sits in the ``a``-th slot of
            the non-decreasing input assignment.
        occ_out: output occupation.
        internal_vectors: one internal state vector per particle.

    Returns:
        The probability from permanents of ``conj(M) * M[:, sigma]`` weighted
        by products of internal overlaps, normalized by the input-state norm.
    """
    u = np.asarray(u, dtype=complex)
    occ_in = occ_in if isinstance(occ_in, ModeOccupation) else ModeOccupation(tuple(occ_in))
    occ_out = occ_out if isinstance(occ_out, ModeOccupation) else ModeOccupation(tuple(occ_out))
    big_n = occ_in.n_particles
    if occ_out.n_particles != big_n:
        raise ValueError("input and output particle numbers differ")
    phis = np.array([np.asarray(v, dtype=complex) / np.linalg.norm(v) for v in internal_vectors])
    if len(phis) != big_n:
        raise ValueError(f"{len(phis)} internal states for {big_n} particles")
    gram = phis.conj() @ phis.T
    e_in = [j for j, c in enumerate(occ_in.counts) for _ in range(c)]
    d_out = [j for j, c in enumerate(occ_out.counts) for _ in range(c)]
    mat = u[np.ix_(d_out, e_in)]
    numer = 0j
    denom = 0j
    for sigma in all_permutations(big_n):
        s = sigma.images
        weight = np.prod([gram[a, s[a]] for a in range(big_n)])
        if abs(weight) == 0:
            continue
        numer += weight * permanent(mat.conj() * mat[:, list(s)])
        if all(e_in[a] == e_in[s[a]] for a in range(big_n)):
            denom += weight
    out_mult = math.prod(math.factorial(c) for c in occ_out.counts)
    return float(np.real(numer / (out_mult * denom)))


def distinguishable_reference(u, occ_in, occ_out) -> float:
    """Classical output probability by summing over all particle paths."""
    u = np.asarray(u, dtype=complex)
    e_in = [j for j, c in enumerate(occ_in) for _ in range(c)]
    target = tuple(occ_out)
    total = 0.0
    for path in itertools.product(range(u.shape[0]), repeat=len(e_in)):
        if tuple(np.bincount(path, minlength=len(target))) == target:
            total += math.prod(abs(u[f, e]) ** 2 for f, e in zip(path, e_in))
    return total


# -- second-quantized Bose-Hubbard ------------------------------------------------


def _ladder_element(occ: tuple[int, ...], create: int, destroy: int) -> tuple[tuple[int, ...] | None, float]:
    """``a_create^dagger a_destroy |occ>`` as (new occupation, amplitude)."""
    counts = list(occ)
    if counts[destroy] == 0:
        return None, 0.0
    amp = math.sqrt(counts[destroy])
    counts[destroy] -= 1
    counts[create] += 1
    amp *= math.sqrt(counts[create])
    return tuple(counts), amp


def second_quantized_bose_hubbard(n_sites: int, n_particles: int, hopping: float, interaction: float,
                                  omegas: Sequence[float]) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Open-chain Bose-Hubbard matrix in the occupation-number basis.

    Terms: ``-J (a_j^dagger a_k + h.c.)`` for neighbours, ``(U/2) n_j (n_j - 1)``
    and ``omega_j n_j``.
    """
    basis = [o.counts for o in enumerate_occupations(n_sites, n_particles)]
    index = {b: i for i, b in enumerate(basis)}
    h = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, occ in enumerate(basis):
        h[col, col] += sum(interaction / 2 * c * (c - 1) + w * c for c, w in zip(occ, omegas))
        for j in range(n_sites - 1):
            for a, b in ((j, j + 1), (j + 1, j)):
                new, amp = _ladder_element(occ, a, b)
                if new is not None:
                    h[index[new], col] += -hopping * amp
    return basis, h


def symmetric_isometry(n_modes: int, n_particles: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Columns are normalized symmetric ``n**N`` vectors, one per occupation."""
    basis = [o.counts for o in enumerate_occupations(n_modes, n_particles)]
    iso = np.zeros((n_modes**n_particles, len(basis)))
    for flat, assignment in enumerate(itertools.product(range(n_modes), repeat=n_particles)):
        occ = tuple(np.bincount(assignment, minlength=n_modes))
        iso[flat, basis.index(occ)] = 1.0
    iso /= np.linalg.norm(iso, axis=0)
    return basis, iso


def permuted_joint(p: PreparedState, kappa: Permutation) -> JointState:
    """Joint state of ``p`` with preparation permutation ``kappa``."""
    return brute_force_joint(p.permuted(kappa))

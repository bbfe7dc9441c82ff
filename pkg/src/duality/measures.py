"""Wave, particle and distinguishability measures, classical distances and visibilities.

Every measure normalized by ``1/(R - 1)`` raises :class:`~duality.errors.Degenerate`
when there is a single labeling (all particles in one mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .config import TOL
from .errors import Degenerate, LabelMismatch, NonPhysical
from .linalg import fidelity, fidelity_from_factors, trace_distance
from .states import (
    ExternalState,
    ParticleKind,
    PreparedState,
    external_state,
    ideal_block_vector,
    labeled_vectors,
)

StateLike = Union[PreparedState, ExternalState]


@dataclass(frozen=True)
class ProbDist:
    """Outcome distribution with semantic labels."""

    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        labels = tuple(self.labels)
        if len(labels) != probs.size:
            raise ValueError(f"{len(labels)} labels for {probs.size} probabilities")
        if np.any(probs < TOL.prob_clip):
            raise NonPhysical(f"negative probability {probs.min():.3e}")
        probs = np.clip(probs, 0.0, None)
        if abs(probs.sum() - 1) > TOL.prob_drift:
            raise NonPhysical(f"probabilities sum to {probs.sum():.12g}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.probs.tolist()))


@dataclass(frozen=True)
class MeasureReport:
    w_c: float
    w_p: float
    p_t: float
    p_f: float
    pairwise_f: float
    r_count: int


def _external(state: StateLike) -> ExternalState:
    return state if isinstance(state, ExternalState) else external_state(state)


def _require_labelings(r: int):
    if r < 2:
        raise Degenerate("measure undefined for a single particle labeling (R = 1)")


# -- wave character -----------------------------------------------------------


def wave_coherence(state: StateLike) -> float:
    """Normalized l1 coherence of the reduced external state."""
    block = _external(state).block
    r = block.shape[0]
    _require_labelings(r)
    off = np.abs(block).sum() - np.abs(np.diag(block)).sum()
    return float(off / (r - 1))


def wave_purity(state: StateLike) -> float:
    """Normalized purity ``sqrt(R/(R-1) (tr rho_E^2 - 1/R))``."""
    block = _external(state).block
    r = block.shape[0]
    _require_labelings(r)
    diag = np.real(np.diag(block))
    off = float(np.sum(np.abs(block) ** 2) - np.sum(diag**2))
    # tr rho^2 - 1/R split into off-diagonal, diagonal-spread and trace-defect parts
    excess = off + float(np.sum((diag - 1 / r) ** 2)) + 2 / r * (float(diag.sum()) - 1)
    return math.sqrt(max(r / (r - 1) * excess, 0.0))


# -- particle character ---------------------------------------------------------


def _pairwise_internal(p: PreparedState):
    """Yield ``(D, F)`` between labeled internal states for each unordered pair."""
    s = p.effective_internal
    reps = p.transversal.reps
    vecs = [labeled_vectors(s, reps, j) for j in range(len(s.components))]
    roots = np.sqrt(s.weights)

    def factor(a):
        return np.stack([rq * v[:, a] for rq, v in zip(roots, vecs)], axis=1)

    r = len(reps)
    for a in range(r):
        fa = factor(a)
        rho_a = fa @ fa.conj().T
        for b in range(a + 1, r):
            fb = factor(b)
            yield trace_distance(rho_a, fb @ fb.conj().T), fidelity_from_factors(fa, fb)


def _particle_sums(p: PreparedState) -> tuple[float, float]:
    r = p.r_count
    _require_labelings(r)
    d_sum = f2_sum = 0.0
    for d, f in _pairwise_internal(p):
        d_sum += 2 * d
        f2_sum += 2 * f * f
    norm = r * (r - 1)
    return d_sum / norm, f2_sum / norm


def particle_trace(p: PreparedState) -> float:
    """Mean pairwise trace distance between labeled internal states."""
    return _particle_sums(p)[0]


def pairwise_fidelity(p: PreparedState) -> float:
    """Root mean square fidelity between labeled internal states."""
    return math.sqrt(min(_particle_sums(p)[1], 1.0))


def particle_fidelity(p: PreparedState) -> float:
    return math.sqrt(max(1.0 - _particle_sums(p)[1], 0.0))


def measure_report(p: PreparedState) -> MeasureReport:
    p_t, f2 = _particle_sums(p)
    ext = external_state(p)
    return MeasureReport(
        w_c=wave_coherence(ext),
        w_p=wave_purity(ext),
        p_t=p_t,
        p_f=math.sqrt(max(1.0 - f2, 0.0)),
        pairwise_f=math.sqrt(min(f2, 1.0)),
        r_count=p.r_count,
    )


# -- classical distances ----------------------------------------------------------


def _check_labels(a: ProbDist, b: ProbDist):
    if a.labels != b.labels:
        raise LabelMismatch(f"label sets differ: {a.labels} vs {b.labels}")


def kolmogorov(a: ProbDist, b: ProbDist) -> float:
    _check_labels(a, b)
    return float(0.5 * np.abs(a.probs - b.probs).sum())


def bhattacharyya(a: ProbDist, b: ProbDist) -> float:
    _check_labels(a, b)
    return float(min(np.sqrt(a.probs * b.probs).sum(), 1.0))


def _bhattacharyya_defect(a: ProbDist, b: ProbDist) -> float:
    """``1 - BC(a, b)`` as the squared Hellinger distance; exactly zero for identical inputs.

    Both inputs are normalized (checked by :class:`ProbDist`), so no sum-defect terms enter.
    """
    _check_labels(a, b)
    hellinger = 0.5 * float(np.sum((np.sqrt(a.probs) - np.sqrt(b.probs)) ** 2))
    return min(hellinger, 1.0)


def _one_minus_bc_squared(a: ProbDist, b: ProbDist) -> float:
    defect = _bhattacharyya_defect(a, b)
    return defect * (2.0 - defect)


def classical_particle_measures(dists: Sequence[ProbDist]) -> tuple[float, float]:
    """Classical particle measures from the statistics of the permuted inputs.

    Returns the mean pairwise Kolmogorov distance and
    ``sqrt(1 - mean pairwise squared Bhattacharyya coefficient)``.
    """
    r = len(dists)
    _require_labelings(r)
    d_sum = gap_sum = 0.0
    for a in range(r):
        for b in range(a + 1, r):
            d_sum += 2 * kolmogorov(dists[a], dists[b])
            gap_sum += 2 * _one_minus_bc_squared(dists[a], dists[b])
    norm = r * (r - 1)
    return d_sum / norm, math.sqrt(gap_sum / norm)


# -- distinguishability and visibility ---------------------------------------------


def distinguishability_measures(state: StateLike) -> tuple[float, float]:
    """``(D_T, D_F)``: normalized closeness to the distinguishable-particle state."""
    ext = _external(state)
    r = ext.r_count
    _require_labelings(r)
    dist = np.eye(r) / r
    d_t = 1.0 - r / (r - 1) * trace_distance(dist, ext.block)
    d_f = 1.0 - r / (r - 1) * (1.0 - fidelity(dist, ext.block) ** 2)
    return d_t, d_f


def visibilities(p_dist: ProbDist, p_actual: ProbDist, r_count: int) -> tuple[float, float]:
    """``(V_T, V_F)`` of the measured statistics against distinguishable-particle statistics."""
    _require_labelings(r_count)
    scale = r_count / (r_count - 1)
    v_t = scale * kolmogorov(p_dist, p_actual)
    v_f = scale * _one_minus_bc_squared(p_dist, p_actual)
    return v_t, v_f


def ideal_fidelity_lambda(state: StateLike, ideal_kind=None) -> float:
    """Squared fidelity with the ideal bosonic/fermionic state, ``<psi|rho_E|psi>``.

    ``ideal_kind`` defaults to the particle kind of ``state``.
    """
    ext = _external(state)
    kind = ext.kind if ideal_kind is None else ParticleKind.parse(ideal_kind)
    psi = ideal_block_vector(ext.occupation, kind)
    return float(np.real(psi.conj() @ ext.block @ psi))

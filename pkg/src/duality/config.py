"""Numerical tolerances and enumeration caps shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10
    psd_floor: float = -1e-10
    trace_tol: float = 1e-10
    unitary_tol: float = 1e-10
    povm_tol: float = 1e-9
    prob_clip: float = -1e-12
    prob_drift: float = 1e-9
    prob_fail: float = 1e-6
    amp_drop: float = 1e-14
    norm_tol: float = 1e-10
    pauli_floor: float = 1e-12
    helstrom_zero: float = 1e-12
    rank_cut: float = 1e-13


@dataclass(frozen=True)
class Limits:
    max_group_order: int = 40320  # N! for N <= 8
    max_transversal: int = 5040
    max_dim: int = 4096
    max_joint_dim: int = 1296
    max_occupations: int = 100000


TOL = Tolerances()
LIMITS = Limits()

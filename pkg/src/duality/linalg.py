"""Dense Hermitian linear algebra on plain numpy arrays.

Operators are ``(d, d)`` complex ndarrays. The ``check_*`` helpers enforce the
Hermitian / density-matrix / unitary invariants at the package boundary and
return the (symmetrized) array so they can be used inline.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .config import LIMITS, TOL
from .errors import CapExceeded, NotHermitian, NotPSD, NotUnitary


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def check_hermitian(a, tol: float = TOL.herm_tol) -> np.ndarray:
    a = _as_square(a)
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise NotHermitian(f"max |A - A^dagger| = {dev:.3e} exceeds {tol:.1e}")
    return (a + a.conj().T) / 2


def check_density(rho, *, psd_floor: float = TOL.psd_floor, trace_tol: float = TOL.trace_tol) -> np.ndarray:
    rho = check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise NotPSD(f"trace {tr:.12g} differs from 1 by more than {trace_tol:.1e}")
    w = np.linalg.eigvalsh(rho)
    if w[0] < psd_floor:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below floor {psd_floor:.1e}")
    return rho


def check_unitary(u, tol: float = TOL.unitary_tol) -> np.ndarray:
    u = _as_square(u)
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > tol:
        raise NotUnitary(f"max |U^dagger U - 1| = {dev:.3e} exceeds {tol:.1e}")
    return u


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvector matrix of a Hermitian operator."""
    a = check_hermitian(a)
    w, v = np.linalg.eigh(a)
    return w, v


def psd_sqrt(a, psd_floor: float = TOL.psd_floor) -> np.ndarray:
    """Positive square root; eigenvalues in ``[psd_floor, 0)`` are treated as zero."""
    w, v = eig_hermitian(a)
    if w.size and w[0] < psd_floor:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below floor {psd_floor:.1e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _same_shape(rho, sigma):
    rho, sigma = _as_square(rho), _as_square(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return rho, sigma


def trace_distance(rho, sigma) -> float:
    """``tr|rho - sigma| / 2``."""
    rho, sigma = _same_shape(rho, sigma)
    diff = rho - sigma
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(w)))


def density_factor(rho, psd_floor: float = TOL.psd_floor) -> np.ndarray:
    """Matrix ``A`` with ``rho = A A^dagger``, dropping eigenvalues below ``TOL.rank_cut``."""
    w, v = eig_hermitian(rho)
    if w.size and w[0] < psd_floor:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below floor {psd_floor:.1e}")
    keep = w > TOL.rank_cut
    return v[:, keep] * np.sqrt(w[keep])


def fidelity_from_factors(a, b) -> float:
    """Fidelity of ``a a^dagger`` and ``b b^dagger`` as the nuclear norm of ``a^dagger b``."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 0.0
    s = np.linalg.svd(a.conj().T @ b, compute_uv=False)
    return float(min(np.sum(s), 1.0))


def fidelity(rho, sigma, psd_floor: float = TOL.psd_floor) -> float:
    """Square-root fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))`` in [0, 1].

    Evaluated through low-rank factors so pure and rank-deficient states keep
    full double precision.
    """
    rho, sigma = _same_shape(rho, sigma)
    return fidelity_from_factors(density_factor(rho, psd_floor), density_factor(sigma, psd_floor))


def purity(rho) -> float:
    rho = _as_square(rho)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def partial_trace(rho, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^dA (x) C^dB``."""
    rho = _as_square(rho)
    d_a, d_b = dims
    if rho.shape[0] != d_a * d_b:
        raise ValueError(f"dimension {rho.shape[0]} is not {d_a} x {d_b}")
    t = rho.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def tensor(*ops, max_dim: int | None = None) -> np.ndarray:
    max_dim = LIMITS.max_dim if max_dim is None else max_dim
    dim = int(np.prod([np.shape(o)[0] for o in ops]))
    if dim > max_dim:
        raise CapExceeded(f"tensor product dimension {dim} exceeds cap {max_dim}")
    return reduce(np.kron, [np.asarray(o, dtype=complex) for o in ops])


def tensor_power(u, n: int, max_dim: int | None = None) -> np.ndarray:
    """``u (x) u (x) ... (x) u`` with slot 1 as the most significant index."""
    return tensor(*([u] * n), max_dim=max_dim)


class Propagator:
    """Spectral propagator ``exp(-i H t)`` that reuses one eigendecomposition.

    Units are hbar = 1, so ``t`` is measured in inverse units of ``H``.
    """

    def __init__(self, h):
        self.energies, self.vectors = eig_hermitian(h)

    def __call__(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.energies * t)
        return (self.vectors * phases) @ self.vectors.conj().T


def evolve_hermitian(h, t: float) -> np.ndarray:
    return Propagator(h)(t)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed mixed state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    from scipy.stats import unitary_group

    return unitary_group.rvs(dim, random_state=rng)

"""Dense complex linear algebra used by the rest of the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``, stored row-major.
The eigen-solver is a cyclic Jacobi method written here rather than a LAPACK
call so that every rank the package reports comes from one small, auditable
routine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import DimensionMismatch, NoConvergence, NotHermitian, NotPSD

EPS = np.finfo(float).eps

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 60


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (always a fresh copy)."""
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def sup_norm(a: np.ndarray) -> float:
    """Largest absolute entry; 0.0 for an empty matrix."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _require_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


@dataclass(frozen=True)
class RankPolicy:
    """Threshold rule for deciding which eigenvalues count as nonzero.

    With ``absolute=None`` the threshold is ``dim * eps * max(lambda_max, 1)``;
    otherwise ``absolute`` is used verbatim.
    """

    absolute: Optional[float] = None

    def threshold(self, values: np.ndarray, dim: int) -> float:
        if self.absolute is not None:
            return float(self.absolute)
        lam_max = float(np.max(values)) if len(values) else 0.0
        return dim * EPS * max(lam_max, 1.0)

    def describe(self) -> dict:
        if self.absolute is None:
            return {"kind": "relative", "rule": "dim*eps*max(lambda_max,1)"}
        return {"kind": "absolute", "threshold": self.absolute}


DEFAULT_POLICY = RankPolicy()


def _round_robin(m: int):
    """Yield the m-1 rounds of a round-robin tournament on m (even) players."""
    players = list(range(m))
    for _ in range(m - 1):
        yield [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        players = [players[0], players[-1]] + players[1:-1]


def _jacobi_round(a: np.ndarray, w: np.ndarray, p: np.ndarray, q: np.ndarray):
    """Annihilate a[p_k, q_k] for disjoint pivot pairs.

    Returns the updated ``(A, W)`` where ``A <- J* A J`` and ``W <- J* W``
    (``W`` accumulates the adjoint of the eigenvector matrix). Only row
    operations are used: since A is Hermitian, ``J* A J = J* (J* A)*``.
    """
    h = a[p, q]
    g = np.abs(h)
    live = g > 0.0
    if not np.any(live):
        return a, w
    p, q, h, g = p[live], q[live], h[live], g[live]
    app = a[p, p].real
    aqq = a[q, q].real

    theta = (aqq - app) / (2.0 * g)
    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
    t[theta == 0.0] = 1.0
    c = 1.0 / np.hypot(t, 1.0)
    s = t * c
    e = h / g

    # J = [[c, s], [-s conj(e), c conj(e)]] on each (p, q) plane; rows of J*.
    jstar = np.empty((p.size, 2, 2), dtype=np.complex128)
    jstar[:, 0, 0] = c
    jstar[:, 0, 1] = -s * e
    jstar[:, 1, 0] = s
    jstar[:, 1, 1] = c * e
    pq = np.stack([p, q], axis=1)

    def left(x):
        x[pq] = jstar @ x[pq]

    left(a)
    a = np.ascontiguousarray(a.conj().T)
    left(a)
    left(w)

    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = app - t * g
    a[q, q] = aqq + t * g
    return a, w


def hermitian_eig(
    h, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS
) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pivot once, in round-robin order so
    that the n/2 rotations of a round act on disjoint index pairs and can be
    applied together. Sweeps stop once the off-diagonal Frobenius norm falls
    below machine epsilon times the Frobenius norm of the input.

    Parameters
    ----------
    h : array_like
        Square complex matrix, Hermitian up to ``tol * max(1, |h|_max)``
        in the entrywise max norm. It is symmetrized before use.
    tol : float
        Tolerance of the Hermiticity pre-check.
    max_sweeps : int
        Iteration budget.

    Returns
    -------
    EigenDecomposition
        Real eigenvalues in descending order with orthonormal eigenvectors
        as the columns of ``vectors``.

    Raises
    ------
    NotHermitian
        If ``h`` fails the pre-check.
    NoConvergence
        If the off-diagonal mass is still too large after ``max_sweeps``.
    """
    a = as_complex_matrix(h, "H")
    _require_square(a, "H")
    n = a.shape[0]
    if sup_norm(a - a.conj().T) > tol * max(1.0, sup_norm(a)):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    w = np.eye(n, dtype=np.complex128)

    norm_f = np.linalg.norm(a)
    if n > 1 and norm_f > 0.0:
        target = EPS * norm_f
        m = n + (n % 2)
        rounds = []
        for pairs in _round_robin(m):
            pairs = [(min(x, y), max(x, y)) for x, y in pairs if max(x, y) < n]
            rounds.append(
                (np.array([x for x, _ in pairs]), np.array([y for _, y in pairs]))
            )
        for _ in range(max_sweeps):
            if np.linalg.norm(a - np.diag(np.diag(a))) <= target:
                break
            for p, q in rounds:
                a, w = _jacobi_round(a, w, p, q)
        else:
            if np.linalg.norm(a - np.diag(np.diag(a))) > target:
                raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    vectors = w.conj().T
    return EigenDecomposition(values=values[order], vectors=vectors[:, order])


def numerical_rank(h, policy: RankPolicy = DEFAULT_POLICY, tol: float = DEFAULT_TOL) -> int:
    """Number of eigenvalues of a Hermitian PSD matrix above the policy threshold.

    Raises ``NotPSD`` if some eigenvalue lies below minus the threshold.
    """
    values = hermitian_eig(h, tol=tol).values
    return rank_from_values(values, policy)


def rank_from_values(values: np.ndarray, policy: RankPolicy = DEFAULT_POLICY) -> int:
    """Rank decision on a precomputed spectrum (see ``numerical_rank``)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0
    tau = policy.threshold(values, values.size)
    if values.min() < -tau:
        raise NotPSD(f"eigenvalue {values.min():.3e} below -{tau:.3e}")
    return int(np.count_nonzero(values > tau))


def kronecker(a, b) -> np.ndarray:
    """Kronecker product, ``(A (x) B)[i*rb + k, j*cb + l] = A[i, j] * B[k, l]``."""
    a = as_complex_matrix(a, "A")
    b = as_complex_matrix(b, "B")
    ra, ca = a.shape
    rb, cb = b.shape
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(ra * rb, ca * cb)


def permute_conjugate(h, sigma: Sequence[int]) -> np.ndarray:
    """Relabel a square matrix's basis: ``result[sigma[i], sigma[j]] = H[i, j]``.

    This is ``P H P^T`` for the permutation matrix ``P`` sending ``e_i`` to
    ``e_sigma(i)``, so spectrum and rank are unchanged.
    """
    h = as_complex_matrix(h, "H")
    _require_square(h, "H")
    sigma = np.asarray(sigma, dtype=np.intp)
    dim = h.shape[0]
    if sigma.shape != (dim,):
        raise DimensionMismatch(f"permutation of length {sigma.size} for dimension {dim}")
    if not np.array_equal(np.sort(sigma), np.arange(dim)):
        raise ValueError("sigma is not a permutation of 0..dim-1")
    out = np.empty_like(h)
    out[np.ix_(sigma, sigma)] = h
    return out

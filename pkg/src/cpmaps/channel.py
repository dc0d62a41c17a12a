"""Completely positive maps on M_n(C) in Kraus, Choi and superoperator form.

A map is stored as its Kraus list ``t_1, ..., t_N`` and acts as
``P(a) = sum_r t_r a t_r^*``. An empty list encodes the zero map.

Conventions (0-based throughout):

* ``vec`` is row-major: ``vec(a)[i*n + j] = a[i, j]``.
* The Choi matrix is ``sum_{i,j} e_ij (x) P(e_ij)``, so block ``(i, j)`` is
  ``P(e_ij)`` and ``C[i*n + a, j*n + b] = P(e_ij)[a, b]``.
* ``unvec`` undoes that block convention: an eigenvector ``v`` of ``C`` maps
  to the Kraus operator with ``t[a, i] = v[i*n + a]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .exceptions import DimensionMismatch, NotCP, NotHermitian, NotPSD
from .numerics import (
    DEFAULT_POLICY,
    DEFAULT_TOL,
    RankPolicy,
    as_complex_matrix,
    hermitian_eig,
    numerical_rank,
    rank_from_values,
)


@dataclass(frozen=True)
class CPMap:
    """A completely positive map given by a (possibly empty) Kraus list."""

    n: int
    kraus: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        ops = []
        for r, t in enumerate(self.kraus):
            t = as_complex_matrix(t, f"kraus[{r}]")
            if t.shape != (self.n, self.n):
                raise DimensionMismatch(
                    f"kraus[{r}] has shape {t.shape}, expected {(self.n, self.n)}"
                )
            t.setflags(write=False)
            ops.append(t)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kraus", tuple(ops))

    def __len__(self) -> int:
        return len(self.kraus)

    def __call__(self, a) -> np.ndarray:
        return apply(self, a)

    def scaled(self, c: float) -> "CPMap":
        """The map ``c * P`` for ``c >= 0`` (each Kraus operator times sqrt(c))."""
        if c < 0:
            raise ValueError("a CP map can only be scaled by c >= 0")
        root = np.sqrt(c)
        return CPMap(self.n, tuple(root * t for t in self.kraus))

    def mixed(self, v) -> "CPMap":
        """Kraus list ``t'_s = sum_r v[s, r] t_r``; the same map when ``v`` is unitary."""
        v = as_complex_matrix(v, "V")
        if v.shape != (len(self), len(self)):
            raise DimensionMismatch(f"mixing matrix must be {len(self)}x{len(self)}")
        if not self.kraus:
            return self
        stack = np.stack(self.kraus)
        return CPMap(self.n, tuple(np.tensordot(v, stack, axes=1)))


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def matrix_units(n: int) -> Iterator[tuple]:
    """Yield ``(i, j, e_ij)`` in row-major order."""
    for i in range(n):
        for j in range(n):
            yield i, j, matrix_unit(n, i, j)


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of the Choi block convention: ``t[a, i] = v[i*n + a]``."""
    return np.asarray(v).reshape(n, n).T


def apply(p: CPMap, a) -> np.ndarray:
    """Evaluate ``P(a) = sum_r t_r a t_r^*``."""
    a = as_complex_matrix(a, "a")
    if a.shape != (p.n, p.n):
        raise DimensionMismatch(f"input has shape {a.shape}, map acts on {p.n}x{p.n}")
    out = np.zeros((p.n, p.n), dtype=np.complex128)
    for t in p.kraus:
        out += t @ a @ t.conj().T
    return out


def identity_channel(n: int) -> CPMap:
    return CPMap(n, (np.eye(n),))


def zero_map(n: int) -> CPMap:
    return CPMap(n, ())


def pinching(n: int) -> CPMap:
    """The map sending a matrix to its diagonal part, Kraus list ``e_11, ..., e_nn``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return CPMap(n, tuple(matrix_unit(n, r, r) for r in range(n)))


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The splitmix64 generator (Steele, Lea and Flood), bit-exact.

    ``next_u64`` advances the state by ``0x9E3779B97F4A7C15`` and mixes it;
    ``uniform`` maps the top 53 bits to a double in ``[0, 1)``.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


def random_cp(n: int, N: int, seed: int) -> CPMap:
    """Seeded random CP map with ``N`` Kraus operators.

    Entries are drawn in order (operator, row, column), real part before
    imaginary part, each as ``2*u - 1`` with ``u`` from ``SplitMix64(seed)``.
    """
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
    rng = SplitMix64(seed)
    ops = []
    for _ in range(N):
        t = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                re = 2.0 * rng.uniform() - 1.0
                im = 2.0 * rng.uniform() - 1.0
                t[i, j] = complex(re, im)
        ops.append(t)
    return CPMap(n, tuple(ops))


@dataclass(frozen=True)
class ChoiMatrix:
    n: int
    mat: np.ndarray


def choi(p: CPMap) -> ChoiMatrix:
    """Block matrix ``[P(e_ij)]_{i,j}``, assembled block by block from ``apply``."""
    n = p.n
    mat = np.zeros((n * n, n * n), dtype=np.complex128)
    for i, j, e in matrix_units(n):
        mat[i * n:(i + 1) * n, j * n:(j + 1) * n] = apply(p, e)
    return ChoiMatrix(n, mat)


def kraus_from_choi(c: ChoiMatrix, policy: RankPolicy = DEFAULT_POLICY) -> CPMap:
    """Minimal Kraus list from the spectral decomposition of a Choi matrix.

    One operator ``sqrt(lambda_k) * unvec(v_k)`` per eigenvalue above the
    rank threshold. Raises ``NotPSD`` if the matrix has a clearly negative
    eigenvalue.
    """
    n = c.n
    mat = as_complex_matrix(c.mat, "Choi matrix")
    if mat.shape != (n * n, n * n):
        raise DimensionMismatch(f"Choi matrix for n={n} must be {n*n}x{n*n}")
    eig = hermitian_eig(mat)
    d = rank_from_values(eig.values, policy)
    ops = tuple(
        np.sqrt(eig.values[k]) * unvec(eig.vectors[:, k], n) for k in range(d)
    )
    return CPMap(n, ops)


def superoperator(p: CPMap) -> np.ndarray:
    """Matrix ``S`` with ``S @ vec(a) = vec(P(a))`` (row-major vec)."""
    n = p.n
    s = np.zeros((n * n, n * n), dtype=np.complex128)
    for i, j, e in matrix_units(n):
        s[:, i * n + j] = vec(apply(p, e))
    return s


def from_superoperator(s, policy: RankPolicy = DEFAULT_POLICY) -> CPMap:
    """Recover a CP map from its action matrix, or raise ``NotCP``."""
    s = as_complex_matrix(s, "superoperator")
    m = s.shape[0]
    n = int(round(np.sqrt(m)))
    if s.shape != (m, m) or n * n != m:
        raise DimensionMismatch(f"superoperator must be n^2 x n^2, got {s.shape}")
    mat = np.zeros((m, m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            mat[i * n:(i + 1) * n, j * n:(j + 1) * n] = s[:, i * n + j].reshape(n, n)
    try:
        return kraus_from_choi(ChoiMatrix(n, mat), policy)
    except (NotHermitian, NotPSD) as exc:
        raise NotCP(f"induced Choi matrix is not PSD: {exc}") from exc


def kraus_span_gram(p: CPMap) -> np.ndarray:
    """``K^* K`` for the N x n^2 matrix ``K`` whose rows are ``vec(t_r)``."""
    n = p.n
    if not p.kraus:
        return np.zeros((n * n, n * n), dtype=np.complex128)
    k = np.stack([vec(t) for t in p.kraus])
    return k.conj().T @ k


@dataclass(frozen=True)
class IndexReport:
    d_span: int
    d_choi: int
    d_gram: int

    @property
    def agree(self) -> bool:
        return self.d_span == self.d_choi == self.d_gram

    @property
    def d(self) -> int:
        return self.d_span

    def as_dict(self) -> dict:
        return {
            "d_span": self.d_span,
            "d_choi": self.d_choi,
            "d_gram": self.d_gram,
            "agree": self.agree,
        }


def index(p: CPMap, policy: RankPolicy = DEFAULT_POLICY) -> IndexReport:
    """The index d(P), computed three ways.

    ``d_span`` is the dimension of the span of the Kraus operators, ``d_choi``
    the rank of the Choi matrix and ``d_gram`` the rank of the Gram matrix
    of the reduced correspondence.
    """
    from .gns import gram_F

    return IndexReport(
        d_span=numerical_rank(kraus_span_gram(p), policy),
        d_choi=numerical_rank(choi(p).mat, policy),
        d_gram=numerical_rank(gram_F(p).mat, policy),
    )


def is_trace_preserving(p: CPMap, atol: float = DEFAULT_TOL) -> bool:
    """Advisory flag: ``sum_r t_r^* t_r == I``."""
    total = sum((t.conj().T @ t for t in p.kraus), np.zeros((p.n, p.n)))
    return bool(np.allclose(total, np.eye(p.n), atol=atol, rtol=0))


def is_unital(p: CPMap, atol: float = DEFAULT_TOL) -> bool:
    """Advisory flag: ``P(I) == I``."""
    return bool(np.allclose(apply(p, np.eye(p.n)), np.eye(p.n), atol=atol, rtol=0))

"""Gram matrices of the reduced GNS correspondence of a CP map.

For a CP map ``P`` on M_n(C) the reduced correspondence ``F_P`` is spanned by
n^2 vectors ``eps_ij``. Their inner products are

    <eps_ij, eps_kl> = P(e_ik)[j, l] = sum_r t_r[j, i] * conj(t_r[l, k]),

and the same numbers arise as the inner products of ``e_1i (x) e_j1`` in the
corner ``e_11 M_n (x)_P M_n e_11``, where
``<a1 (x) b1, a2 (x) b2> = tr(b1^* P(a1^* a2) b2)``. ``F_P`` is therefore a
Hilbert space of dimension d(P), and ``morita_witness`` builds an explicit
isometric identification with C^d.

Labels are pairs ``(i, j)`` with 1-based indices, stored at position
``(i-1)*n + (j-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .channel import CPMap, apply, kraus_span_gram, matrix_unit
from .numerics import (
    DEFAULT_POLICY,
    RankPolicy,
    hermitian_eig,
    numerical_rank,
    rank_from_values,
    sup_norm,
)

EQUALITY_ATOL = 1e-10
EQUALITY_RTOL = 1e-12


def equality_tolerance(g: np.ndarray) -> float:
    """Entrywise tolerance for Gram equalities.

    Absolute ``1e-10`` at unit scale, relaxed to ``1e-12 * max(1, |G|_max)``
    for channels with large Kraus operators.
    """
    return max(EQUALITY_ATOL, EQUALITY_RTOL * max(1.0, sup_norm(g)))


def pair_labels(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


@dataclass(frozen=True)
class GramMatrix:
    labels: List[Tuple[int, int]]
    mat: np.ndarray

    def entry(self, left: Tuple[int, int], right: Tuple[int, int]) -> complex:
        return complex(self.mat[self.labels.index(left), self.labels.index(right)])


def gram_F(p: CPMap) -> GramMatrix:
    """Gram matrix of the spanning family ``eps_ij`` of F_P.

    Uses the Kraus expansion: ``G = sum_r x_r x_r^*`` with
    ``x_r[(i,j)] = t_r[j, i]``, i.e. ``x_r`` is the row-major vec of ``t_r^T``.
    """
    n = p.n
    g = np.zeros((n * n, n * n), dtype=np.complex128)
    for t in p.kraus:
        x = t.T.reshape(-1)
        g += np.outer(x, x.conj())
    return GramMatrix(pair_labels(n), g)


def corner_inner(p: CPMap, a1, b1, a2, b2) -> complex:
    """``tr(b1^* P(a1^* a2) b2)``, the scalar inner product on the corner space."""
    a1, b1, a2, b2 = (np.asarray(x, dtype=np.complex128) for x in (a1, b1, a2, b2))
    return complex(np.trace(b1.conj().T @ apply(p, a1.conj().T @ a2) @ b2))


def gram_corner(p: CPMap) -> GramMatrix:
    """Gram matrix of ``e_1i (x) e_j1`` in the corner space, by direct evaluation.

    Every entry goes through ``corner_inner``, with no use of the Kraus
    operators beyond ``apply``.
    """
    n = p.n
    labels = pair_labels(n)
    g = np.zeros((n * n, n * n), dtype=np.complex128)
    for x, (i, j) in enumerate(labels):
        a1, b1 = matrix_unit(n, 0, i - 1), matrix_unit(n, j - 1, 0)
        for y, (k, l) in enumerate(labels):
            a2, b2 = matrix_unit(n, 0, k - 1), matrix_unit(n, l - 1, 0)
            g[x, y] = corner_inner(p, a1, b1, a2, b2)
    return GramMatrix(labels, g)


@dataclass(frozen=True)
class TheoremOneReport:
    gram_residual: float
    tolerance: float
    rank_F: int
    d_P: int

    @property
    def passed(self) -> bool:
        return self.gram_residual <= self.tolerance and self.rank_F == self.d_P

    def as_dict(self) -> dict:
        return {
            "gram_residual": self.gram_residual,
            "tolerance": self.tolerance,
            "rank_F": self.rank_F,
            "d_P": self.d_P,
            "pass": self.passed,
        }


def verify_theorem1(p: CPMap, policy: RankPolicy = DEFAULT_POLICY) -> TheoremOneReport:
    """Check that F_P and the corner space carry the same Gram matrix, of rank d(P)."""
    g_f = gram_F(p).mat
    g_c = gram_corner(p).mat
    return TheoremOneReport(
        gram_residual=sup_norm(g_f - g_c),
        tolerance=equality_tolerance(g_f),
        rank_F=numerical_rank(g_f, policy),
        d_P=numerical_rank(kraus_span_gram(p), policy),
    )


@dataclass(frozen=True)
class MoritaWitness:
    """Isometry ``V`` (n^2 x d) with ``V^* G V = I_d`` on the support of G."""

    d: int
    isometry: np.ndarray
    residual: float


def morita_witness(p: CPMap, policy: RankPolicy = DEFAULT_POLICY) -> MoritaWitness:
    """Orthonormalize the spanning family of F_P.

    The columns of ``V`` are ``v_k / sqrt(lambda_k)`` for the eigenpairs of
    ``G = gram_F(P)`` above the rank threshold, so the vectors
    ``sum_x V[x, k] eps_x`` form an orthonormal basis of F_P and identify it
    with C^d.
    """
    g = gram_F(p).mat
    eig = hermitian_eig(g)
    d = rank_from_values(eig.values, policy)
    v = eig.vectors[:, :d] / np.sqrt(eig.values[:d])
    residual = sup_norm(v.conj().T @ g @ v - np.eye(d)) if d else 0.0
    return MoritaWitness(d=d, isometry=v, residual=residual)

"""Two-step GNS correspondence of a pair of CP maps and its tensor factorization.

The reduced two-step correspondence ``F_{P1 P2}`` is spanned by n^4 vectors
``eps_iklj = e_j (x) I (x) e_kl (x) I (x) e_i^*`` with inner product

    <xi1 (x) a (x) eta1, xi2 (x) b (x) eta2> = eta1^* P2(a^* P1(xi1^* xi2) b) eta2.

Expanding with matrix units gives the closed form

    <eps_iklj, eps_mphq> = P1(e_jq)[k, p] * P2(e_lh)[i, m]
                         = G1[(j,k), (q,p)] * G2[(l,i), (h,m)],

with ``G1 = gram_F(P1)`` and ``G2 = gram_F(P2)``. The two-step Gram matrix is
thus a basis relabeling of ``G1 (x) G2`` and has rank d(P1) d(P2).

Quadruple labels ``(i, k, l, j)`` are 1-based and stored at
``(((i-1)*n + (k-1))*n + (l-1))*n + (j-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import List, Tuple

import numpy as np

from .channel import CPMap, apply, index, matrix_unit
from .exceptions import DimensionMismatch
from .gns import equality_tolerance, gram_F
from .numerics import (
    DEFAULT_POLICY,
    RankPolicy,
    kronecker,
    numerical_rank,
    permute_conjugate,
    sup_norm,
)

Quad = Tuple[int, int, int, int]


def quad_labels(n: int) -> List[Quad]:
    return list(product(range(1, n + 1), repeat=4))


def quad_position(n: int, label: Quad) -> int:
    i, k, l, j = (x - 1 for x in label)
    return ((i * n + k) * n + l) * n + j


def _check_pair(p1: CPMap, p2: CPMap) -> int:
    if p1.n != p2.n:
        raise DimensionMismatch(f"maps act on different sizes: {p1.n} vs {p2.n}")
    return p1.n


@dataclass(frozen=True)
class TwoStepGram:
    n: int
    labels: List[Quad]
    mat: np.ndarray


def _row(n: int, idx: int) -> np.ndarray:
    """The row vector e_idx (0-based) as a 1 x n matrix."""
    e = np.zeros((1, n), dtype=np.complex128)
    e[0, idx] = 1.0
    return e


def two_step_inner(p1: CPMap, p2: CPMap, xi1, a, eta1, xi2, b, eta2) -> complex:
    """``eta1^* P2(a^* P1(xi1^* xi2) b) eta2`` for row vectors xi, columns eta."""
    inner = apply(p1, xi1.conj().T @ xi2)
    outer = apply(p2, a.conj().T @ inner @ b)
    return complex((eta1.conj().T @ outer @ eta2)[0, 0])


def two_step_entry(p1: CPMap, p2: CPMap, left: Quad, right: Quad) -> complex:
    """One Gram entry ``<eps_iklj, eps_mphq>``, evaluated from the inner product."""
    n = _check_pair(p1, p2)
    i, k, l, j = (x - 1 for x in left)
    m, p, h, q = (x - 1 for x in right)
    return two_step_inner(
        p1, p2,
        _row(n, j), matrix_unit(n, k, l), _row(n, i).T,
        _row(n, q), matrix_unit(n, p, h), _row(n, m).T,
    )


def gram_two_step(p1: CPMap, p2: CPMap) -> TwoStepGram:
    """Gram matrix of the spanning family ``eps_iklj`` of F_{P1 P2}.

    Each ``apply(P2, e_lk P1(e_jq) e_ph)`` supplies the full n x n block of
    entries indexed by ``(i, m)``; no closed form is used.
    """
    n = _check_pair(p1, p2)
    g = np.zeros((n**4, n**4), dtype=np.complex128)
    stride = n**3
    rng = np.arange(n)
    for j, q in product(range(n), repeat=2):
        inner = apply(p1, _row(n, j).T @ _row(n, q))
        for k, l, p, h in product(range(n), repeat=4):
            outer = apply(p2, matrix_unit(n, l, k) @ inner @ matrix_unit(n, p, h))
            rows = rng * stride + (k * n + l) * n + j
            cols = rng * stride + (p * n + h) * n + q
            # eta1^* X eta2 over all (i, m) is X itself.
            g[np.ix_(rows, cols)] = outer
    return TwoStepGram(n, quad_labels(n), g)


def two_step_closed_form(p1: CPMap, p2: CPMap) -> np.ndarray:
    """``P1(e_jq)[k, p] * P2(e_lh)[i, m]`` for every pair of quadruples."""
    n = _check_pair(p1, p2)
    # a1[j, q, k, p] = P1(e_jq)[k, p]
    a1 = np.array([[apply(p1, matrix_unit(n, j, q)) for q in range(n)] for j in range(n)])
    a2 = np.array([[apply(p2, matrix_unit(n, l, h)) for h in range(n)] for l in range(n)])
    g = np.einsum("jqkp,lhim->ikljmphq", a1, a2)
    return g.reshape(n**4, n**4)


def factorization_permutation(n: int) -> np.ndarray:
    """Relabeling ``pi`` with ``G12 = permute_conjugate(G1 (x) G2, pi)``.

    ``pi`` sends the Kronecker position of ``((j,k), (l,i))`` to the quadruple
    position of ``(i, k, l, j)``.
    """
    pi = np.empty(n**4, dtype=np.intp)
    for i, k, l, j in product(range(n), repeat=4):
        kron_pos = (j * n + k) * n * n + (l * n + i)
        pi[kron_pos] = ((i * n + k) * n + l) * n + j
    return pi


@dataclass(frozen=True)
class FactorizationReport:
    residual: float
    tolerance: float
    rank_12: int
    d1: int
    d2: int

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance and self.rank_12 == self.d1 * self.d2

    def as_dict(self) -> dict:
        return {
            "residual": self.residual,
            "tolerance": self.tolerance,
            "rank_12": self.rank_12,
            "d1": self.d1,
            "d2": self.d2,
            "pass": self.passed,
        }


def verify_factorization(
    p1: CPMap, p2: CPMap, policy: RankPolicy = DEFAULT_POLICY
) -> FactorizationReport:
    """Compare the two-step Gram matrix with the relabeled ``G1 (x) G2``."""
    n = _check_pair(p1, p2)
    g1 = gram_F(p1).mat
    g2 = gram_F(p2).mat
    g12 = gram_two_step(p1, p2).mat
    expected = permute_conjugate(kronecker(g1, g2), factorization_permutation(n))
    return FactorizationReport(
        residual=sup_norm(g12 - expected),
        tolerance=equality_tolerance(g12),
        rank_12=numerical_rank(g12, policy),
        d1=index(p1, policy).d,
        d2=index(p2, policy).d,
    )

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpmaps.channel import apply, choi, identity_channel, index, pinching, random_cp, zero_map
from cpmaps.gns import (
    corner_inner,
    equality_tolerance,
    gram_corner,
    gram_F,
    morita_witness,
    pair_labels,
    verify_theorem1,
)
from cpmaps.numerics import numerical_rank, permute_conjugate, sup_norm

from helpers import random_unitary

channels = st.builds(
    lambda n, N, seed: random_cp(n, N, seed),
    n=st.integers(1, 4),
    N=st.integers(1, 8),
    seed=st.integers(0, 2**64 - 1),
)


def operational_gram(p):
    """<eps_ij, eps_kl> = P(e_ik)[j, l], straight from the map's action."""
    n = p.n
    g = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for k in range(n):
            e = np.zeros((n, n))
            e[i, k] = 1
            out = apply(p, e)
            for j in range(n):
                for l in range(n):
                    g[i * n + j, k * n + l] = out[j, l]
    return g


def printed_gram(p):
    """sum_r t_r[i, j] conj(t_r[k, l]), indices read as printed."""
    n = p.n
    g = np.zeros((n * n, n * n), dtype=complex)
    for t in p.kraus:
        g += np.outer(t.ravel(), t.ravel().conj())
    return g


class TestGramF:
    def test_labels(self):
        assert pair_labels(2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
        assert gram_F(pinching(3)).labels == pair_labels(3)

    def test_identity(self):
        g = gram_F(identity_channel(2)).mat
        expected = np.zeros((4, 4))
        for a in (0, 3):
            for b in (0, 3):
                expected[a, b] = 1
        np.testing.assert_array_equal(g, expected)
        assert numerical_rank(g) == 1

    def test_pinching(self):
        g = gram_F(pinching(2))
        np.testing.assert_array_equal(g.mat, np.diag([1, 0, 0, 1]))
        assert g.entry((1, 1), (1, 1)) == 1 and g.entry((2, 2), (2, 2)) == 1
        assert numerical_rank(g.mat) == 2

    @settings(max_examples=40, deadline=None)
    @given(p=channels)
    def test_matches_operational_definition(self, p):
        assert sup_norm(gram_F(p).mat - operational_gram(p)) <= 1e-12

    @settings(max_examples=20, deadline=None)
    @given(p=channels)
    def test_printed_convention_is_a_relabeling(self, p):
        n = p.n
        swap = [j * n + i for i in range(n) for j in range(n)]
        g = gram_F(p).mat
        assert sup_norm(permute_conjugate(g, swap) - printed_gram(p)) <= 1e-12
        assert numerical_rank(printed_gram(p)) == numerical_rank(g)

    @settings(max_examples=30, deadline=None)
    @given(p=channels, seed=st.integers(0, 999))
    def test_kraus_representation_independence(self, p, seed):
        q = p.mixed(random_unitary(len(p), np.random.default_rng(seed)))
        assert sup_norm(gram_F(p).mat - gram_F(q).mat) <= 1e-10

    @settings(max_examples=20, deadline=None)
    @given(p=channels, c=st.floats(0.01, 100.0))
    def test_scaling(self, p, c):
        g, gc = gram_F(p).mat, gram_F(p.scaled(c)).mat
        assert sup_norm(gc - c * g) <= 1e-12 * max(1.0, sup_norm(gc))
        assert numerical_rank(gc) == numerical_rank(g)

    @settings(max_examples=30, deadline=None)
    @given(p=channels)
    def test_rank_identity(self, p):
        rank = numerical_rank(gram_F(p).mat)
        assert rank == index(p).d_span == numerical_rank(choi(p).mat)


class TestGramCorner:
    def test_corner_inner_is_trace_formula(self):
        p = random_cp(2, 2, 3)
        rng = np.random.default_rng(0)
        a1, b1, a2, b2 = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        expected = np.trace(b1.conj().T @ apply(p, a1.conj().T @ a2) @ b2)
        assert corner_inner(p, a1, b1, a2, b2) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("p", [pinching(2), identity_channel(2), pinching(3)])
    def test_equals_gram_F(self, p):
        np.testing.assert_array_equal(gram_corner(p).mat, gram_F(p).mat)

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        p = random_cp(2, 2, seed)
        assert sup_norm(gram_corner(p).mat - gram_F(p).mat) <= 1e-10


class TestTheoremOne:
    @pytest.mark.parametrize("n", range(2, 6))
    def test_pinching(self, n):
        rep = verify_theorem1(pinching(n))
        assert rep.passed and rep.rank_F == n

    def test_zero_map(self):
        rep = verify_theorem1(zero_map(3))
        assert rep.passed and rep.rank_F == 0 and rep.gram_residual == 0

    def test_random(self):
        rep = verify_theorem1(random_cp(3, 4, 17))
        assert rep.passed and rep.rank_F == 4

    def test_scaled_channel_uses_relative_tolerance(self):
        p = random_cp(3, 9, 1).scaled(1e6)
        rep = verify_theorem1(p)
        assert rep.tolerance == equality_tolerance(gram_F(p).mat) > 1e-10
        assert rep.passed

    @settings(max_examples=30, deadline=None)
    @given(p=channels)
    def test_property(self, p):
        rep = verify_theorem1(p)
        assert rep.gram_residual <= 1e-10
        assert rep.passed


class TestMoritaWitness:
    def test_identity(self):
        w = morita_witness(identity_channel(2))
        assert w.d == 1 and w.isometry.shape == (4, 1)
        # G = x x^* with x = (1, 0, 0, 1), so V = x / |x|^2 up to phase
        v = w.isometry[:, 0]
        v = v / (v[0] / abs(v[0]))
        np.testing.assert_allclose(v, [0.5, 0, 0, 0.5], atol=1e-15)

    def test_pinching(self):
        w = morita_witness(pinching(2))
        assert w.d == 2 and w.isometry.shape == (4, 2)
        assert w.residual <= 1e-12

    def test_zero_map(self):
        w = morita_witness(zero_map(2))
        assert w.d == 0 and w.isometry.shape == (4, 0) and w.residual == 0

    @settings(max_examples=30, deadline=None)
    @given(p=channels)
    def test_contract(self, p):
        w = morita_witness(p)
        g = gram_F(p).mat
        v = w.isometry
        assert w.d == index(p).d_span
        assert w.residual <= 1e-10
        assert sup_norm(v.conj().T @ g @ v - np.eye(w.d)) == w.residual or w.d == 0
        # any w orthogonal to the columns of V lies in the kernel of G
        q, _ = np.linalg.qr(v, mode="complete") if w.d else (np.eye(g.shape[0]), None)
        for x in q[:, w.d:].T:
            assert np.linalg.norm(g @ x) <= 1e-10 * max(1.0, np.linalg.norm(g, 2))


def test_concurrent_evaluation_is_schedule_independent():
    chans = [random_cp(3, 1 + s % 9, s) for s in range(12)]
    serial = [gram_F(p).mat for p in chans] + [gram_corner(p).mat for p in chans]
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = list(pool.map(lambda p: gram_F(p).mat, chans))
        threaded += list(pool.map(lambda p: gram_corner(p).mat, chans))
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a, b)

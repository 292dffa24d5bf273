import math

import numpy as np
import pytest

from dqadjoint.adjoint import to_adjoint
from dqadjoint.eig import all_eigenpairs
from dqadjoint.errors import BadRank, NotHermitian, SpectralGapViolation, ZeroDominant
from dqadjoint.linalg import DQMatrix, is_hermitian, mat_norms, outer, vec_normalize
from dqadjoint.lowrank import rank1_approx_F, rank1_approx_Fstar, rank_k_approx_F, rank_k_approx_Fstar
from dqadjoint.scalar import DualNumber, Ordering, dual_cmp
from synth import planted, rand_dq_matrix, rand_dq_vector, rand_hermitian, separated_values


def dq_diag(st, du=None):
    return DQMatrix.from_real(np.diag(st), None if du is None else np.diag(du))


def adjoint_rank(M, tol=1e-8):
    s = np.linalg.svd(to_adjoint(M).st, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def test_rank_k_F_examples():
    out = rank_k_approx_F(dq_diag([3.0, 1.0], [1.0, 0.0]), 1).approx
    assert out.allclose(dq_diag([3.0, 0.0], [1.0, 0.0]), atol=1e-12)
    rng = np.random.default_rng(0)
    Q = rand_hermitian(rng, 5)
    assert rank_k_approx_F(Q, 5).approx.allclose(Q, atol=1e-9)
    for bad in (0, 6):
        with pytest.raises(BadRank):
            rank_k_approx_F(Q, bad)
    with pytest.raises(NotHermitian):
        rank_k_approx_F(rand_dq_matrix(rng, 3), 1)


def test_rank_k_F_residual_identity_and_monotone():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        values = separated_values(rng, n)
        Q, _ = planted(rng, values)
        mags = sorted((abs(v.st) for v in values), reverse=True)
        prev = None
        for k in range(1, n + 1):
            r = rank_k_approx_F(Q, k)
            res = mat_norms(Q - r.approx, "F")
            assert abs(res.st - math.sqrt(sum(m * m for m in mags[k:]))) <= 1e-9
            assert is_hermitian(r.approx) and adjoint_rank(r.approx) == 2 * k
            if prev is not None:
                assert dual_cmp(res, prev) is not Ordering.GREATER
            prev = res


def test_rank1_F_examples():
    out = rank1_approx_F(dq_diag([5.0, 1.0])).approx
    assert out.allclose(dq_diag([5.0, 0.0]), atol=1e-9)
    rng = np.random.default_rng(2)
    u = vec_normalize(rand_dq_vector(rng, 4))
    Q = outer(u, u) * DualNumber(2.0, -1.5)
    assert rank1_approx_F(Q).approx.allclose(Q, atol=1e-9)


def test_rank1_F_matches_direct():
    rng = np.random.default_rng(3)
    for _ in range(5):
        Q, _ = planted(rng, separated_values(rng, 5))
        a, b = rank1_approx_F(Q).approx, rank_k_approx_F(Q, 1).approx
        assert a.allclose(b, atol=1e-7)


def test_rank_k_Fstar_examples():
    rng = np.random.default_rng(4)
    Q = planted(rng, separated_values(rng, 4))[0].st
    for k in (1, 2, 3):
        a, b = rank_k_approx_Fstar(Q, k).approx, rank_k_approx_F(Q, k).approx
        assert a.st.allclose(b.st, atol=1e-9)
    out = rank_k_approx_Fstar(dq_diag([3.0, 1.0], [0.7, -2.0]), 1).approx
    assert out.allclose(dq_diag([3.0, 0.0], [0.7, 0.0]), atol=1e-12)
    with pytest.raises(SpectralGapViolation):
        rank_k_approx_Fstar(dq_diag([2.0, -2.0, 1.0]), 1)


def test_rank_k_Fstar_beats_random_candidates():
    rng = np.random.default_rng(5)
    n, k = 4, 2
    Q, _ = planted(rng, separated_values(rng, n))
    W = rank_k_approx_Fstar(Q, k).approx
    assert is_hermitian(W) and adjoint_rank(W) == 2 * k
    best = mat_norms(Q - W, "Fstar")
    for _ in range(500):
        R = DQMatrix.zeros(n)
        for _ in range(k):
            w = vec_normalize(rand_dq_vector(rng, n))
            R = R + outer(w, w) * DualNumber(*rng.normal(0, 3, 2))
        assert dual_cmp(mat_norms(Q - R, "Fstar"), best) is not Ordering.LESS


def test_rank1_Fstar_examples():
    rng = np.random.default_rng(6)
    u = vec_normalize(rand_dq_vector(rng, 4))
    Q = outer(u, u) * DualNumber(2.0, 3.0)
    r = rank1_approx_Fstar(Q)
    lam, value, _ = r.used_pairs[0]
    assert math.isclose(lam, 2.0, rel_tol=1e-9) and math.isclose(value.du, 3.0, rel_tol=1e-9)
    assert r.approx.allclose(Q, atol=1e-9)
    out = rank1_approx_Fstar(dq_diag([3.0, 1.0], [7.0, 0.0])).approx
    assert out.allclose(dq_diag([3.0, 0.0], [7.0, 0.0]), atol=1e-9)
    with pytest.raises(ZeroDominant):
        rank1_approx_Fstar(DQMatrix.from_real(np.zeros((2, 2)), np.eye(2)))


def test_rank1_Fstar_matches_projector_formula():
    rng = np.random.default_rng(7)
    for _ in range(5):
        Q, _ = planted(rng, separated_values(rng, 5))
        a, b = rank1_approx_Fstar(Q).approx, rank_k_approx_Fstar(Q, 1).approx
        assert a.allclose(b, atol=1e-9)
        assert is_hermitian(a) and adjoint_rank(a) == 2


def test_used_pairs_come_from_the_spectrum():
    rng = np.random.default_rng(8)
    Q, _ = planted(rng, separated_values(rng, 4))
    used = rank_k_approx_F(Q, 2).used_pairs
    assert [p.value for p in used] == all_eigenpairs(Q).values[:2]

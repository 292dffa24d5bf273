import math

import numpy as np
import pytest

from dqadjoint.adjoint import to_adjoint
from dqadjoint.apps.graphs import build_pentagon
from dqadjoint.eig import (
    PowerConfig,
    all_eigenpairs,
    all_eigenpairs_deflation,
    all_eigenpairs_power,
    canonicalize,
    dc_hermitian_eig,
    extract_orthogonal,
    hermitian_eig_complex,
    power_method,
    power_method_adjoint,
)
from dqadjoint.errors import EmptyInput, NoConvergence, NotHermitian
from dqadjoint.linalg import DCMatrix, DQMatrix, DQVector, inner, mat_norms, vec_normalize, vec_norms
from dqadjoint.scalar import DualNumber, DualQuaternion, Quaternion, approx_eq, dual_abs, dual_cmp
from synth import match_values, planted, rand_dq_matrix, rand_dq_vector, rand_unit_dq, separated_values

PENTAGON = [(2, 3), (0.618, 3.5257), (0.618, 2.4743), (-1.618, 3.8507), (-1.618, 2.1493)]


def dq_diag(st, du=None):
    return DQMatrix.from_real(np.diag(st), None if du is None else np.diag(du))


def assert_unit_and_orthogonal(spec, tol=1e-8):
    vs = [p.vector for p in spec]
    for i, u in enumerate(vs):
        n = vec_norms(u)
        assert abs(n.st - 1) <= tol and abs(n.du) <= tol
        for v in vs[i + 1 :]:
            assert max(map(abs, inner(u, v).as_array())) <= tol


def same_ray(u, v, tol=1e-8):
    """``v = u a`` for a unit dual quaternion ``a``."""
    a = inner(u, v)
    return a.is_unit(tol) and (u.rmul(a) - v).allclose(DQVector.zeros(len(u)), atol=tol)


# --- complex backend --------------------------------------------------------


def test_hermitian_eig_complex_examples():
    w, V = hermitian_eig_complex(np.diag([3.0, 1.0]))
    assert np.allclose(w, [1, 3]) and np.allclose(np.abs(V), [[0, 1], [1, 0]])
    w, V = hermitian_eig_complex(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1, 1])
    assert np.isclose(abs(V[0, 0]), 1 / math.sqrt(2)) and np.isclose(V[0, 1] / V[1, 1], 1)
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    A = X + X.conj().T
    w, V = hermitian_eig_complex(A)
    assert np.allclose((V * w) @ V.conj().T, A, atol=1e-10)
    with pytest.raises(NotHermitian):
        hermitian_eig_complex(X)


# --- dual complex decomposition ---------------------------------------------


def test_dc_eig_diagonal():
    dec = dc_hermitian_eig(DCMatrix(np.diag([2.0, 1.0]), np.diag([5.0, 7.0])))
    assert dec.sigma == (DualNumber(2, 5), DualNumber(1, 7))
    assert np.allclose(np.abs(dec.U.st), np.eye(2)) and np.allclose(dec.U.du, 0)


def test_dc_eig_single_cluster():
    dec = dc_hermitian_eig(DCMatrix(np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert [x for s in dec.sigma for x in (s.st, s.du)] == pytest.approx([1, 1, 1, -1])
    assert dec.clusters == ((0, 2),)


def test_dc_eig_synthesized():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        Q, _ = planted(rng, separated_values(rng, n))
        P = to_adjoint(Q)
        dec = dc_hermitian_eig(P)
        U = dec.U
        G = U.H @ U
        assert np.linalg.norm(G.st - np.eye(2 * n)) <= 1e-8 and np.linalg.norm(G.du) <= 1e-8
        D = U.H @ P @ U
        S = DCMatrix(np.diag([s.st for s in dec.sigma]), np.diag([s.du for s in dec.sigma]))
        assert mat_norms(D - S, "FR") <= 1e-8


def test_dc_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        dc_hermitian_eig(DCMatrix(np.array([[1.0, 2.0], [0.0, 1.0]])))


# --- orthogonal extraction ---------------------------------------------------


def test_extract_orthogonal_examples():
    e1, e2 = DQVector.basis(2, 0), DQVector.basis(2, 1)
    out = extract_orthogonal([e1, e1])
    assert len(out) == 1 and out[0] == e1
    out = extract_orthogonal([e1, e2])
    assert len(out) == 2 and out[0] == e1 and out[1] == e2
    out = extract_orthogonal([e1, (e1 + e2) * (1 / math.sqrt(2))])
    assert len(out) == 2 and same_ray(e2, out[1], 1e-12)
    assert max(map(abs, inner(out[0], out[1]).as_array())) <= 1e-12
    with pytest.raises(EmptyInput):
        extract_orthogonal([])


def test_extract_orthogonal_drops_right_multiples():
    rng = np.random.default_rng(2)
    v = vec_normalize(rand_dq_vector(rng, 4))
    w = rand_dq_vector(rng, 4)
    out = extract_orthogonal([v, v.rmul(rand_unit_dq(rng)), w, v.rmul(DualQuaternion.real(2.0, 1.0))])
    assert len(out) == 2


# --- direct eigenpairs --------------------------------------------------------


def test_all_eigenpairs_diagonal():
    spec = all_eigenpairs(dq_diag([3.0, 1.0], [1.0, -1.0]))
    assert spec.values == [DualNumber(3, 1), DualNumber(1, -1)]
    assert same_ray(DQVector.basis(2, 0), spec[0].vector) and same_ray(DQVector.basis(2, 1), spec[1].vector)


def test_all_eigenpairs_pentagon():
    P = build_pentagon()
    spec = all_eigenpairs(P)
    got = [x for v in sorted(spec.values, reverse=True) for x in (v.st, v.du)]
    assert got == pytest.approx([x for v in PENTAGON for x in v], abs=1e-4)
    assert max(p.residual(P) for p in spec) <= 1e-10
    assert_unit_and_orthogonal(spec)


def test_all_eigenpairs_synthesized():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 9))
        values = separated_values(rng, n)
        Q, _ = planted(rng, values)
        spec = all_eigenpairs(Q)
        assert len(spec) == n
        assert match_values(spec.values, values, 1e-9) <= 1e-9
        ref = mat_norms(Q, "FR")
        assert max(p.residual(Q) for p in spec) <= 1e-7 * ref
        assert_unit_and_orthogonal(spec)


def test_all_eigenpairs_repeated_values():
    rng = np.random.default_rng(4)
    values = [DualNumber(2, 1), DualNumber(2, 1), DualNumber(2, -1), DualNumber(-1, 0.5), DualNumber(-1, 0.5)]
    Q, _ = planted(rng, values)
    spec = all_eigenpairs(Q)
    assert match_values(spec.values, values, 1e-8) <= 1e-8
    assert max(p.residual(Q) for p in spec) <= 1e-8
    assert_unit_and_orthogonal(spec)


def test_spectrum_sorted_and_trace():
    rng = np.random.default_rng(5)
    Q, _ = planted(rng, separated_values(rng, 6))
    spec = all_eigenpairs(Q)
    for a, b in zip(spec.values, spec.values[1:]):
        assert dual_cmp(dual_abs(a), dual_abs(b)) >= 0
    tr = Q.trace()
    assert math.isclose(sum(v.st for v in spec.values), tr.st.q0, abs_tol=1e-9)
    assert math.isclose(sum(v.du for v in spec.values), tr.du.q0, abs_tol=1e-9)


def test_adjoint_spectrum_doubles_each_value():
    rng = np.random.default_rng(6)
    values = separated_values(rng, 4)
    Q, _ = planted(rng, values)
    sigma = dc_hermitian_eig(to_adjoint(Q)).sigma
    for v in values:
        assert sum(approx_eq(s, v, 1e-8) for s in sigma) == 2


def test_not_hermitian_rejected():
    A = rand_dq_matrix(np.random.default_rng(7), 3)
    for fn in (all_eigenpairs, power_method, power_method_adjoint, all_eigenpairs_deflation):
        with pytest.raises(NotHermitian):
            fn(A)


def test_canonical_form():
    rng = np.random.default_rng(8)
    v = vec_normalize(rand_dq_vector(rng, 3))
    c = canonicalize(v)
    assert same_ray(v, c)
    assert canonicalize(v.rmul(rand_unit_dq(rng))).allclose(c, atol=1e-12)
    k = int(np.argmax(np.abs(c.b1) ** 2 + np.abs(c.b2) ** 2))
    assert c.b1[k].real > 0 and abs(c.b1[k].imag) < 1e-15 and c.b2[k] == 0
    assert abs(c.b3[k].imag) < 1e-15 and abs(c.b4[k]) < 1e-15


# --- power methods ------------------------------------------------------------


@pytest.mark.parametrize("method", [power_method, power_method_adjoint])
def test_power_dominant_coordinate(method):
    Q = dq_diag([5.0, 1.0], [1.0, 0.0])
    r = method(Q, DQVector.from_real(np.array([1.0, 1.0]) / math.sqrt(2)))
    assert approx_eq(r.value, DualNumber(5, 1), 1e-9)
    assert same_ray(DQVector.basis(2, 0), r.vector)
    assert r.residual(Q) <= 1e-12 * mat_norms(Q, "FR")


@pytest.mark.parametrize("method", [power_method, power_method_adjoint])
def test_power_identity_one_step(method):
    rng = np.random.default_rng(9)
    r = method(DQMatrix.identity(4), vec_normalize(rand_dq_vector(rng, 4)))
    assert r.iterations == 1 and approx_eq(r.value, DualNumber(1, 0), 1e-12)


def test_power_methods_agree_on_synthesized():
    rng = np.random.default_rng(10)
    for _ in range(10):
        values = separated_values(rng, 5)
        Q, _ = planted(rng, values)
        cfg = PowerConfig(init="random", seed=int(rng.integers(1 << 30)))
        a, b = power_method(Q, cfg=cfg), power_method_adjoint(Q, cfg=cfg)
        top = max(values, key=lambda v: abs(v.st))
        assert approx_eq(a.value, b.value, 1e-9) and approx_eq(a.value, top, 1e-9)
        ref = mat_norms(Q, "FR")
        assert a.residual(Q) <= 1e-12 * ref * 1.0001 and b.residual(Q) <= 1e-12 * ref * 1.0001


def test_power_geometric_rate():
    rng = np.random.default_rng(11)
    Q, _ = planted(rng, [DualNumber(5, 1), DualNumber(2, 1), DualNumber(1, 1)])
    r = power_method(Q, cfg=PowerConfig(max_iters=30, tol=1e-300, init="random", seed=0, strict=False))
    h = np.array(r.residuals)
    rate = (h[25] / h[10]) ** (1 / 15)
    assert 0.2 <= rate <= 0.8


def test_power_no_convergence_carries_last_iterate():
    Q = dq_diag([1.0, -1.0])
    cfg = PowerConfig(max_iters=20)
    with pytest.raises(NoConvergence) as exc:
        power_method(Q, DQVector.from_real(np.array([0.6, 0.8])), cfg)
    assert exc.value.last is not None and exc.value.residual > 0
    r = power_method(Q, DQVector.from_real(np.array([0.6, 0.8])), PowerConfig(max_iters=20, strict=False))
    assert not r.converged and r.iterations == 20 and len(r.residuals) == 20


def test_power_config_validation():
    for bad in (dict(max_iters=0), dict(tol=0), dict(init="zeros")):
        with pytest.raises(ValueError):
            PowerConfig(**bad)


# --- deflation ----------------------------------------------------------------


def test_deflation_real_diagonal():
    spec = all_eigenpairs_deflation(dq_diag([3.0, 2.0, 1.0]))
    assert [x for v in spec.values for x in (v.st, v.du)] == pytest.approx([3, 0, 2, 0, 1, 0], abs=1e-10)
    for i, p in enumerate(spec):
        assert same_ray(DQVector.basis(3, i), p.vector)


def test_deflation_one_step_norm():
    from dqadjoint.adjoint import swap_map, vec_to_adjoint
    from dqadjoint.linalg import dc_outer

    Q = dq_diag([3.0, 1.0], [1.0, 0.0])
    r = power_method_adjoint(Q)
    u = vec_to_adjoint(r.vector)
    h = swap_map(u)
    P2 = to_adjoint(Q) - dc_outer(u, u) * r.value - dc_outer(h, h) * r.value
    assert math.isclose(mat_norms(P2, "FR"), math.sqrt(2), rel_tol=1e-10)


@pytest.mark.parametrize("route", [all_eigenpairs_deflation, all_eigenpairs_power])
def test_iterative_routes_match_direct(route):
    rng = np.random.default_rng(12)
    for _ in range(5):
        values = separated_values(rng, 5)
        Q, _ = planted(rng, values)
        spec = route(Q, PowerConfig(init="random", seed=3))
        assert len(spec) == 5
        assert match_values(spec.values, values, 1e-6) <= 1e-6


def test_deflation_zero_completion():
    rng = np.random.default_rng(13)
    Q, _ = planted(rng, [DualNumber(3, 1), DualNumber(0, 0), DualNumber(0, 0)])
    spec = all_eigenpairs_deflation(Q)
    assert len(spec) == 3
    assert match_values(spec.values, [DualNumber(3, 1), DualNumber(0), DualNumber(0)], 1e-8) <= 1e-8
    assert_unit_and_orthogonal(spec, 1e-6)


def test_deflation_fails_on_pentagon():
    P = build_pentagon()
    with pytest.raises(NoConvergence) as exc:
        all_eigenpairs_deflation(P)
    assert exc.value.stage >= 2 and exc.value.partial is not None
    spec = all_eigenpairs_deflation(P, PowerConfig(strict=False))
    thresh = 1e-6 * mat_norms(P, "FR")
    assert any(p.residual(P) > thresh for p in spec)

"""Optimal low-rank approximation of dual quaternion Hermitian matrices.

Two residual norms are supported.  Under the F-norm the best rank-k
approximation keeps the k eigenpairs of largest dual absolute value.  Under
the F*-norm the standard part is the truncated eigendecomposition of the
standard part and the dual part is the projector formula
``P2 - (I - V V*) P2 (I - V V*)`` evaluated on the adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adjoint import from_adjoint, to_adjoint, vec_from_adjoint, vec_to_adjoint
from .eig import (
    PowerConfig,
    PowerResult,
    _fail,
    _power_dc,
    _require_hermitian,
    all_eigenpairs,
    power_method_adjoint,
    start_vector,
)
from .errors import BadRank, SpectralGapViolation, ZeroDominant
from .linalg import DCMatrix, DCVector, DQMatrix, DQVector, mat_norms, outer
from .scalar import DualNumber

GAP_RTOL = 1e-10


@dataclass(frozen=True)
class RankKApprox:
    approx: DQMatrix
    used_pairs: tuple


def _check_rank(Q, k):
    n = Q.shape[0]
    if not 1 <= k <= n:
        raise BadRank(f"rank {k} outside [1, {n}]")


def _sum_terms(pairs, n):
    Z = DQMatrix.zeros(n)
    for p in pairs:
        Z = Z + outer(p.vector, p.vector) * p.value
    return Z


def rank_k_approx_F(Q: DQMatrix, k: int) -> RankKApprox:
    _require_hermitian(Q)
    _check_rank(Q, k)
    top = all_eigenpairs(Q).pairs[:k]
    return RankKApprox(_sum_terms(top, Q.shape[0]), tuple(top))


def rank1_approx_F(Q: DQMatrix, cfg: PowerConfig = PowerConfig(), v0: DQVector | None = None) -> RankKApprox:
    """Rank-one F-norm approximation from the dominant adjoint eigenpair."""
    pair = power_method_adjoint(Q, v0, cfg)
    return RankKApprox(outer(pair.vector, pair.vector) * pair.value, (pair,))


def rank_k_approx_Fstar(Q: DQMatrix, k: int) -> RankKApprox:
    _require_hermitian(Q)
    _check_rank(Q, k)
    n = Q.shape[0]
    pairs = sorted(all_eigenpairs(Q.st).pairs, key=lambda p: abs(p.value.st), reverse=True)
    mags = [abs(p.value.st) for p in pairs]
    if k < n and mags[k - 1] - mags[k] <= GAP_RTOL * mags[0]:
        raise SpectralGapViolation(f"no spectral gap between positions {k} and {k + 1}")
    top = pairs[:k]
    Vq = DQMatrix.from_columns(p.vector.st for p in top)
    V = to_adjoint(Vq).st
    lam = np.array([p.value.st for p in top])
    sig = np.concatenate([lam, lam])
    P2 = to_adjoint(Q).du
    Pi = np.eye(2 * n) - V @ V.conj().T
    U_st = (V * sig) @ V.conj().T
    U_du = P2 - Pi @ P2 @ Pi
    W = from_adjoint(DCMatrix._wrap(U_st, U_du))
    return RankKApprox(W, tuple(top))


def rank1_approx_Fstar(
    Q: DQMatrix, cfg: PowerConfig = PowerConfig(), v0: DQVector | None = None
) -> RankKApprox:
    """Rank-one F*-norm approximation.

    Power iteration on the standard part of the adjoint gives ``(lambda, v)``;
    the 2 x 2 compression of the dual part onto ``span(v, pair(v))`` gives
    ``mu`` and a rotation ``U``; the dual correction of the eigenvector is
    ``(P2 W1 - W1 Sigma2) / lambda``.
    """
    _require_hermitian(Q)
    n = Q.shape[0]
    P = to_adjoint(Q)
    P1, P2 = P.st, P.du
    start = vec_to_adjoint(v0 if v0 is not None else start_vector(n, cfg))
    zero = np.zeros_like(P1)
    lam, u, k, hist, ok = _power_dc(
        DCMatrix._wrap(P1, zero), DCVector._wrap(start.st, np.zeros_like(start.st)), cfg, mat_norms(Q.st, "FR")
    )
    if not ok:
        _fail(cfg, PowerResult(lam, vec_from_adjoint(u), k, tuple(hist), False))
    lam = lam.st
    if lam == 0:
        raise ZeroDominant("dominant standard eigenvalue is zero")
    v = u.st / np.linalg.norm(u.st)
    v1, v2 = v[:n], v[n:]
    V = np.column_stack([v, np.concatenate([-np.conj(v2), np.conj(v1)])])
    R = V.conj().T @ P2 @ V
    mu, Ur = np.linalg.eigh((R + R.conj().T) / 2)
    W1 = V @ Ur
    W2 = (P2 @ W1 - W1 * mu) / lam
    uhat = vec_from_adjoint(DCVector._wrap(W1[:, 0], W2[:, 0]))
    value = DualNumber(lam, float(mu[0]))
    return RankKApprox(outer(uhat, uhat) * value, ((lam, value, uhat),))

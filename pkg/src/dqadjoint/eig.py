"""Eigenvalue computations for dual quaternion Hermitian matrices.

Three routes are provided:

* ``all_eigenpairs``: direct decomposition of the dual complex adjoint
  followed by orthogonal extraction in dual quaternion arithmetic.
* ``power_method`` / ``power_method_adjoint``: dominant eigenpair by power
  iteration, either in dual quaternion arithmetic or on the adjoint.
* ``all_eigenpairs_deflation`` / ``all_eigenpairs_power``: full spectra by
  repeated power iteration and rank-one deflation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Sequence

import numpy as np

from .adjoint import swap_map, to_adjoint, vec_from_adjoint, vec_to_adjoint
from .errors import (
    ConvergenceFailure,
    DegenerateCluster,
    EmptyInput,
    MultiplicityMismatch,
    NoConvergence,
    NotHermitian,
    NotSquare,
    ZeroVector,
)
from .linalg import (
    HERMITIAN_TOL,
    DCMatrix,
    DCVector,
    DQMatrix,
    DQVector,
    dc_inner,
    dc_normalize,
    dc_outer,
    inner,
    is_hermitian,
    mat_norms,
    outer,
    vec_norms,
    vec_normalize,
)
from .scalar import DualNumber, DualQuaternion, Quaternion, approx_eq, dual_abs, dual_cmp

CLUSTER_RTOL = 1e-8
RANK_RTOL = 1e-8
GAMMA_RTOL = 1e-10


@dataclass(frozen=True)
class DualEigenPair:
    value: DualNumber
    vector: DQVector

    def residual(self, Q: DQMatrix) -> float:
        """``||Q v - v lambda||_2R``."""
        return vec_norms(Q @ self.vector - self.vector * self.value, "twoR")


@dataclass(frozen=True)
class PowerResult(DualEigenPair):
    iterations: int = 0
    residuals: tuple = ()
    converged: bool = True


@dataclass(frozen=True)
class Spectrum:
    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def values(self) -> list[DualNumber]:
        return [p.value for p in self.pairs]

    def vectors(self) -> DQMatrix:
        return DQMatrix.from_columns(p.vector for p in self.pairs)


@dataclass(frozen=True)
class DCEigenDecomposition:
    U: DCMatrix
    sigma: tuple
    clusters: tuple = ()  # (start, stop) column ranges of equal standard parts


@dataclass(frozen=True)
class PowerConfig:
    max_iters: int = 10_000
    tol: float = 1e-12
    init: str = "ones"  # "ones" or "random"
    seed: int | None = None
    strict: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.init not in ("ones", "random"):
            raise ValueError(f"unknown init policy {self.init!r}")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _require_hermitian(Q):
    if Q.shape[0] != Q.shape[1]:
        raise NotSquare(f"matrix of shape {Q.shape} is not square")
    if not is_hermitian(Q):
        raise NotHermitian("matrix is not Hermitian")


def _sort_pairs(pairs):
    """Descending by dual absolute value; ties keep discovery order."""
    key = cmp_to_key(lambda a, b: int(dual_cmp(dual_abs(a.value), dual_abs(b.value))))
    return sorted(pairs, key=key, reverse=True)


def canonicalize(v: DQVector) -> DQVector:
    """Fix the right unit dual quaternion freedom of an eigenvector.

    The entry with the largest standard-part magnitude is rotated to a
    positive real standard part, then a factor ``1 + w eps`` with pure ``w``
    clears the i, j, k components of its dual part.
    """
    mags = np.abs(v.b1) ** 2 + np.abs(v.b2) ** 2
    k = int(np.argmax(mags))
    if mags[k] == 0:
        return v
    q = v[k].st
    v = v.rmul(DualQuaternion(q.conj() / q.norm(), Quaternion()))
    r, d = v[k].st.q0, v[k].du
    w = Quaternion(0.0, -d.q1 / r, -d.q2 / r, -d.q3 / r)
    return v.rmul(DualQuaternion(Quaternion(1.0), w))


def start_vector(n: int, cfg: PowerConfig, rng=None) -> DQVector:
    if cfg.init == "ones":
        return DQVector.from_real(np.full(n, 1.0 / math.sqrt(n)))
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    return vec_normalize(DQVector.from_parts(rng.standard_normal((n, 4)), rng.standard_normal((n, 4))))


# ---------------------------------------------------------------------------
# direct route
# ---------------------------------------------------------------------------


def hermitian_eig_complex(A, tol: float = HERMITIAN_TOL):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian A."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSquare(f"matrix of shape {A.shape} is not square")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A - A.conj().T) > tol * scale:
        raise NotHermitian("complex matrix is not Hermitian")
    try:
        w, V = np.linalg.eigh((A + A.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return w, V


def _cluster_bounds(w, tol):
    bounds, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k - 1] - w[k] > tol:
            bounds.append((start, k))
            start = k
    return bounds


def default_cluster_tol(P1) -> float:
    rho = float(np.max(np.abs(np.linalg.eigvalsh(P1)))) if P1.size else 0.0
    return CLUSTER_RTOL * max(1.0, rho)


def dc_hermitian_eig(P: DCMatrix, cluster_tol: float | None = None) -> DCEigenDecomposition:
    """Unitary diagonalization ``U* P U = diag(sigma)`` of a dual complex Hermitian P.

    Eigenvalues come out sorted by standard part (descending), then by dual
    part (descending) inside each cluster of equal standard parts.
    """
    _require_hermitian(P)
    P1, P2 = P.st, P.du
    w, U = hermitian_eig_complex(P1)
    w, U = w[::-1], U[:, ::-1]
    if cluster_tol is None:
        cluster_tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    bounds = _cluster_bounds(w, cluster_tol)

    P2t = U.conj().T @ P2 @ U
    n = len(w)
    V = np.zeros((n, n), dtype=complex)
    mu = np.zeros(n)
    lam = np.zeros(n)
    for a, b in bounds:
        m, Ui = hermitian_eig_complex(P2t[a:b, a:b], tol=1e-8)
        V[a:b, a:b] = Ui[:, ::-1]
        mu[a:b] = m[::-1]
        lam[a:b] = w[a:b].mean()

    Qm = V.conj().T @ P2t @ V
    T = np.zeros((n, n), dtype=complex)
    for ia, (a, b) in enumerate(bounds):
        for ja, (c, d) in enumerate(bounds):
            if ia == ja:
                continue
            gap = lam[c] - lam[a]
            if abs(gap) < cluster_tol:
                raise DegenerateCluster("distinct clusters closer than cluster_tol")
            T[a:b, c:d] = Qm[a:b, c:d] / gap

    W = U @ V
    # standard part of each eigenvalue from the Rayleigh quotient of its column
    st = np.real(np.einsum("ij,ij->j", W.conj(), P1 @ W))
    sigma = tuple(DualNumber(s, m) for s, m in zip(st, mu))
    return DCEigenDecomposition(DCMatrix._wrap(W, W @ T), sigma, tuple(bounds))


def _gram_schmidt_step(basis, v):
    for u in basis:
        v = v - u.rmul(inner(u, v))
    return v


def extract_orthogonal(vs: Sequence[DQVector], rank_tol: float | None = None) -> list[DQVector]:
    """Orthonormal vectors spanning the same right-subspace as ``vs``.

    Gram-Schmidt in dual quaternion arithmetic.  A candidate is kept when the
    standard part of its 2-norm exceeds ``rank_tol``.  Each candidate is
    orthogonalized twice to limit loss of orthogonality.
    """
    vs = list(vs)
    if not vs:
        raise EmptyInput("no vectors given")
    if rank_tol is None:
        rank_tol = RANK_RTOL * max(vec_norms(v).st for v in vs)
    out: list[DQVector] = []
    for v in vs:
        w = _gram_schmidt_step(out, _gram_schmidt_step(out, v))
        if vec_norms(w).st > rank_tol:
            out.append(vec_normalize(w))
    return out


def all_eigenpairs(Q: DQMatrix, cluster_tol: float | None = None, rank_tol: float | None = None) -> Spectrum:
    """Every eigenpair of a Hermitian Q through its dual complex adjoint."""
    _require_hermitian(Q)
    P = to_adjoint(Q)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(P.st)
    dec = dc_hermitian_eig(P, cluster_tol)
    # entries of one standard-part cluster share one standard value, so that
    # ordering between them is decided by the dual parts alone
    sigma = list(dec.sigma)
    for a, b in dec.clusters:
        st = sum(x.st for x in sigma[a:b]) / (b - a)
        sigma[a:b] = [DualNumber(st, x.du) for x in sigma[a:b]]
    groups, start = [], 0
    for k in range(1, len(sigma) + 1):
        if k == len(sigma) or not approx_eq(sigma[k - 1], sigma[k], cluster_tol):
            groups.append((start, k))
            start = k

    pairs = []
    for a, b in groups:
        t = b - a
        cols = [vec_from_adjoint(dec.U.column(j)) for j in range(a, b)]
        vecs = extract_orthogonal(cols, rank_tol)
        if t % 2 or len(vecs) != t // 2:
            raise MultiplicityMismatch(
                f"eigenvalue group of size {t} produced {len(vecs)} quaternion eigenvectors"
            )
        value = DualNumber(
            sum(s.st for s in sigma[a:b]) / t,
            sum(s.du for s in sigma[a:b]) / t,
        )
        pairs += [DualEigenPair(value, canonicalize(v)) for v in vecs]
    return Spectrum(_sort_pairs(pairs))


# ---------------------------------------------------------------------------
# power methods
# ---------------------------------------------------------------------------


def _fail(cfg, result, stage=None, partial=None):
    if cfg.strict:
        raise NoConvergence(
            f"no convergence after {result.iterations} iterations (residual {result.residuals[-1]:.3e})",
            last=result,
            residual=result.residuals[-1],
            partial=partial,
            stage=stage,
        )
    return result


def _project_out(V: DQMatrix | None, y: DQVector) -> DQVector:
    return y if V is None else y - V @ (V.H @ y)


def _power_dq(Q: DQMatrix, v: DQVector, cfg: PowerConfig, ref: float, basis=None) -> PowerResult:
    thresh = cfg.tol * ref
    history = []
    lam = DualQuaternion()
    if basis is not None:
        v = vec_normalize(_project_out(basis, v))
    for k in range(1, cfg.max_iters + 1):
        y = _project_out(basis, Q @ v)
        lam = inner(v, y)
        r = vec_norms(y - v.rmul(lam), "twoR")
        history.append(r)
        if r <= thresh:
            return PowerResult(lam.sc(), v, k, tuple(history), True)
        v = vec_normalize(y)
    return PowerResult(lam.sc(), v, cfg.max_iters, tuple(history), False)


def power_method(Q: DQMatrix, v0: DQVector | None = None, cfg: PowerConfig = PowerConfig()) -> PowerResult:
    """Dominant eigenpair by power iteration in dual quaternion arithmetic.

    The returned vector is the iterate whose residual passed the test
    ``||Q v - v lambda||_2R <= tol * ||Q||_FR``.
    """
    _require_hermitian(Q)
    v = vec_normalize(v0) if v0 is not None else start_vector(Q.shape[0], cfg)
    res = _power_dq(Q, v, cfg, mat_norms(Q, "FR"))
    return res if res.converged else _fail(cfg, res)


def _dc_project_out(B1, B2, B1h, B2h, u1, u2):
    """Remove from ``u`` its component along the orthonormal columns of ``B``.

    ``B1h`` and ``B2h`` are the precomputed conjugate transposes.
    """
    c1 = B1h @ u1
    c2 = B1h @ u2 + B2h @ u1
    return u1 - B1 @ c1, u2 - B1 @ c2 - B2 @ c1


def _dc_basis(cols1, cols2):
    B1, B2 = np.column_stack(cols1), np.column_stack(cols2)
    return B1, B2, np.ascontiguousarray(B1.conj().T), np.ascontiguousarray(B2.conj().T)


def _power_dc(P: DCMatrix, u: DCVector, cfg: PowerConfig, ref: float, basis=None):
    """Power iteration on a dual complex matrix, on raw arrays for speed.

    ``basis`` optionally holds orthonormal vectors (see ``_dc_basis``) that
    every iterate is kept orthogonal to.
    """
    thresh = cfg.tol * ref
    P1, P2 = P.st, P.du
    u1, u2 = np.array(u.st), np.array(u.du)
    if basis is not None:
        u1, u2 = _dc_project_out(*basis, u1, u2)
        u1, u2 = _dc_unit(u1, u2)
    history = []
    lam = DualNumber(0.0)
    for k in range(1, cfg.max_iters + 1):
        y1 = P1 @ u1
        y2 = P1 @ u2 + P2 @ u1
        if basis is not None:
            # residual of the operator compressed to the orthogonal complement
            y1, y2 = _dc_project_out(*basis, y1, y2)
        ls = np.vdot(u1, y1).real
        ld = (np.vdot(u1, y2) + np.vdot(u2, y1)).real
        lam = DualNumber(ls, ld)
        r1 = y1 - ls * u1
        r2 = y2 - ls * u2 - ld * u1
        r = math.sqrt(np.vdot(r1, r1).real + np.vdot(r2, r2).real)
        history.append(r)
        if r <= thresh:
            return lam, DCVector._wrap(u1, u2), k, history, True
        u1, u2 = _dc_unit(y1, y2)
    return lam, DCVector._wrap(u1, u2), cfg.max_iters, history, False


def _dc_unit(y1, y2):
    a = math.sqrt(np.vdot(y1, y1).real)
    if a == 0:
        raise ZeroVector("power iterate vanished")
    u1 = y1 / a
    w = y2 / a
    return u1, w - np.vdot(u1, w).real * u1


def power_method_adjoint(Q: DQMatrix, v0: DQVector | None = None, cfg: PowerConfig = PowerConfig()) -> PowerResult:
    """Dominant eigenpair by power iteration on the dual complex adjoint."""
    _require_hermitian(Q)
    v = vec_normalize(v0) if v0 is not None else start_vector(Q.shape[0], cfg)
    lam, u, k, hist, ok = _power_dc(to_adjoint(Q), vec_to_adjoint(v), cfg, mat_norms(Q, "FR"))
    res = PowerResult(lam, vec_from_adjoint(u), k, tuple(hist), ok)
    return res if ok else _fail(cfg, res)


def _complete(pairs, n):
    """Pad a partial spectrum with zero eigenvalues on the orthogonal complement."""
    found = [p.vector for p in pairs]
    basis = [DQVector.basis(n, i) for i in range(n)]
    ortho = extract_orthogonal(found + basis, rank_tol=1e-6)
    extra = ortho[len(found) :][: n - len(pairs)]
    return list(pairs) + [DualEigenPair(DualNumber(0.0), v) for v in extra]


def all_eigenpairs_deflation(
    Q: DQMatrix, cfg: PowerConfig = PowerConfig(), gamma: float | None = None
) -> Spectrum:
    """All eigenpairs by adjoint power iteration and two-term deflation.

    Each converged adjoint eigenvector u also yields H(u) for the same
    eigenvalue; both rank-one terms are removed before the next stage.
    Iterates are also kept orthogonal to every vector found so far, which
    stops rounding left behind by inexact deflation from attracting later
    stages.  If the deflated matrix becomes negligible the spectrum is
    completed with zero eigenvalues.
    """
    _require_hermitian(Q)
    n = Q.shape[0]
    P = to_adjoint(Q)
    ref = mat_norms(Q, "FR")
    if gamma is None:
        gamma = GAMMA_RTOL * mat_norms(P, "FR")
    rng = np.random.default_rng(cfg.seed)
    pairs = []
    found1, found2 = [], []
    for stage in range(1, n + 1):
        if mat_norms(P, "FR") <= gamma:
            break
        u0 = vec_to_adjoint(start_vector(n, cfg, rng))
        basis = _dc_basis(found1, found2) if found1 else None
        lam, u, k, hist, ok = _power_dc(P, u0, cfg, ref, basis)
        pair = PowerResult(lam, canonicalize(vec_from_adjoint(u)), k, tuple(hist), ok)
        if not ok:
            _fail(cfg, pair, stage=stage, partial=Spectrum(pairs))
        pairs.append(pair)
        h = swap_map(u)
        P = P - dc_outer(u, u) * lam - dc_outer(h, h) * lam
        found1 += [u.st, h.st]
        found2 += [u.du, h.du]
    if len(pairs) < n:
        pairs = _complete(pairs, n)
    return Spectrum(_sort_pairs(pairs))


def all_eigenpairs_power(Q: DQMatrix, cfg: PowerConfig = PowerConfig(), gamma: float | None = None) -> Spectrum:
    """All eigenpairs by dual quaternion power iteration with ``Q - lambda v v*`` deflation.

    As in :func:`all_eigenpairs_deflation`, iterates are kept orthogonal to
    the eigenvectors already found.
    """
    _require_hermitian(Q)
    n = Q.shape[0]
    ref = mat_norms(Q, "FR")
    if gamma is None:
        gamma = GAMMA_RTOL * ref
    rng = np.random.default_rng(cfg.seed)
    pairs = []
    for stage in range(1, n + 1):
        if mat_norms(Q, "FR") <= gamma:
            break
        basis = DQMatrix.from_columns(p.vector for p in pairs) if pairs else None
        res = _power_dq(Q, start_vector(n, cfg, rng), cfg, ref, basis)
        res = PowerResult(res.value, canonicalize(res.vector), res.iterations, res.residuals, res.converged)
        if not res.converged:
            _fail(cfg, res, stage=stage, partial=Spectrum(pairs))
        pairs.append(res)
        Q = Q - outer(res.vector, res.vector) * res.value
    if len(pairs) < n:
        pairs = _complete(pairs, n)
    return Spectrum(_sort_pairs(pairs))

"""Pose graph optimization by penalized block coordinate descent.

The unknown poses ``x`` enter only through the rank-one Gram matrix
``x x*``.  Each iteration updates ``X1`` (Hermitian, unit entries, unit
diagonal) in closed form and then ``X2`` as a rank-one approximation of
``X1``.  The four variants differ in how that rank-one term is computed and
in their stopping rules:

=========  ======================================  ====  ============
variant    rank-one step                            rho1  window stop
=========  ======================================  ====  ============
DEMP       power method, quaternion arithmetic      1.1   no
DEMP1      power method, quaternion arithmetic      1.0   yes
DBDEMP     power method on the adjoint              1.0   yes
DBDEMP1    F*-norm rank-one approximation           1.0   yes
=========  ======================================  ====  ============
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TextIO

import numpy as np

from ..eig import PowerConfig, power_method, power_method_adjoint
from ..errors import CalibrationFailure, FormatError, NoGroundTruth
from ..linalg import DQMatrix, DQVector, mat_norms, outer, unit_project_entries
from ..lowrank import rank1_approx_Fstar
from ..scalar import DualQuaternion
from .graphs import Graph, edge_count, random_graph, random_unit_dq_vector

VARIANTS = ("DEMP", "DEMP1", "DBDEMP", "DBDEMP1")
NOISE_RTOL = 0.05
CALIBRATION_STEPS = 30


@dataclass(frozen=True)
class PGOInstance:
    graph: Graph
    Q: DQMatrix  # observations on edges, zero elsewhere
    ground_truth: DQVector | None = None
    noise_level: float = 0.0
    obs_rate: float = 0.0

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def observations(self) -> dict:
        return {(i, j): self.Q[i, j] for i, j in sorted(self.graph.edges)}

    def clean(self) -> DQMatrix:
        """``P_E(x x*)``."""
        return _masked(outer(self._gt(), self._gt()), self.graph.indicator())

    def realized_noise(self) -> float:
        C = self.clean()
        return mat_norms(self.Q - C, "FR") / mat_norms(C, "FR")

    def _gt(self) -> DQVector:
        if self.ground_truth is None:
            raise NoGroundTruth("instance carries no ground truth")
        return self.ground_truth


@dataclass(frozen=True)
class PGOConfig:
    variant: str = "DBDEMP1"
    rho0: float = 0.01
    rho1: float | None = None  # None: 1.1 for DEMP, 1.0 otherwise
    beta: float = 1e-6
    k_max: int = 200
    window: int = 2
    inner: PowerConfig = field(default_factory=lambda: PowerConfig(max_iters=1000, tol=1e-12, strict=False))

    def __post_init__(self):
        v = self.variant.upper()
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "variant", v)
        if self.rho1 is None:
            object.__setattr__(self, "rho1", 1.1 if v == "DEMP" else 1.0)
        if not self.rho0 > 0:
            raise ValueError("rho0 must be positive")
        if self.rho1 < 1:
            raise ValueError("rho1 must be >= 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.k_max < 1 or self.window < 1:
            raise ValueError("k_max and window must be >= 1")


@dataclass(frozen=True)
class PGOResult:
    X1: DQMatrix
    X2: DQMatrix
    iterations: int
    residual_history: tuple
    rho_history: tuple
    e_Q: float | None
    success: bool


def _masked(M: DQMatrix, mask) -> DQMatrix:
    return DQMatrix._wrap(*(b * mask for b in M.blocks))


def _divide(M: DQMatrix, w) -> DQMatrix:
    return DQMatrix._wrap(*(b / w for b in M.blocks))


def _unit_diagonal(M: DQMatrix) -> DQMatrix:
    blocks = [b.copy() for b in M.blocks]
    for k, b in enumerate(blocks):
        np.fill_diagonal(b, 1.0 if k == 0 else 0.0)
    return DQMatrix._wrap(*blocks)


def metric_e_Q(inst: PGOInstance, X2: DQMatrix) -> float:
    """``||x x* - X2||_FR / ||x x*||_FR``."""
    x = inst._gt()
    Q0 = outer(x, x)
    return mat_norms(Q0 - X2, "FR") / mat_norms(Q0, "FR")


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------


def _noisy(clean: DQMatrix, mask, sigma: float, noise) -> DQMatrix:
    st, du = clean.parts()
    pert = DQMatrix.from_parts(st + sigma * noise[..., :4], du + sigma * noise[..., 4:])
    return _masked(unit_project_entries(_masked(pert, mask) + _off(mask)), mask)


def _off(mask) -> DQMatrix:
    # unit placeholders off the edge set keep the projection well defined
    return DQMatrix.from_real(1.0 - mask)


def make_pgo_instance(n: int, s: float, l_noise: float, rng) -> PGOInstance:
    """Random instance with ``n`` poses, observation rate ``s`` and relative noise ``l_noise``.

    The noise scale is found by bisection on a fixed perturbation draw so the
    realized relative noise is within 5% of ``l_noise``.
    """
    if l_noise < 0:
        raise ValueError("noise level must be non-negative")
    x = random_unit_dq_vector(n, rng)
    for _ in range(100):
        G = random_graph(n, s, True, rng)
        if G.is_connected():
            break
    mask = G.indicator()
    clean = _masked(outer(x, x), mask)
    if l_noise == 0:
        return PGOInstance(G, clean, x, 0.0, s)

    noise = rng.standard_normal((n, n, 8))
    base = mat_norms(clean, "FR")

    def realized(sigma):
        return mat_norms(_noisy(clean, mask, sigma, noise) - clean, "FR") / base

    lo, hi = 0.0, l_noise
    for _ in range(60):
        if realized(hi) >= l_noise:
            break
        lo, hi = hi, 2 * hi
    else:
        raise CalibrationFailure(f"cannot reach relative noise {l_noise}")
    for _ in range(CALIBRATION_STEPS):
        mid = 0.5 * (lo + hi)
        r = realized(mid)
        if abs(r - l_noise) <= NOISE_RTOL * l_noise:
            return PGOInstance(G, _noisy(clean, mask, mid, noise), x, l_noise, s)
        lo, hi = (mid, hi) if r < l_noise else (lo, mid)
    raise CalibrationFailure(f"bisection did not reach {l_noise} within 5%")


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def pgo_solve(inst: PGOInstance, cfg: PGOConfig = PGOConfig()) -> PGOResult:
    n = inst.n
    mask = inst.graph.indicator()
    denom_obs = mask + mask.T
    Qsym = inst.Q + inst.Q.H

    v = DQVector.from_real(np.full(n, 1.0 / math.sqrt(n)))
    X2 = outer(v, v)
    X1 = _unit_diagonal(X2)
    rho = cfg.rho0
    history, rhos = [], []
    window = cfg.variant != "DEMP"

    for k in range(1, cfg.k_max + 1):
        rhos.append(rho)
        num = Qsym + (X2 + X2.H) * rho
        X1 = _unit_diagonal(unit_project_entries(_divide(num, denom_obs + 2 * rho)))

        if cfg.variant == "DBDEMP1":
            approx = rank1_approx_Fstar(X1, cfg.inner, v)
            X2 = approx.approx
            v = approx.used_pairs[0][2]
        else:
            solver = power_method_adjoint if cfg.variant == "DBDEMP" else power_method
            pair = solver(X1, v, cfg.inner)
            v = pair.vector
            X2 = outer(v, v) * pair.value
        rho *= cfg.rho1

        R = mat_norms(X1 - X2, "FR")
        history.append(R)
        if R <= cfg.beta:
            break
        d = cfg.window
        if window and k >= d + 1:
            tail = history[-(d + 1) :]
            if max(tail) - min(tail) <= cfg.beta:
                break

    e_q = metric_e_Q(inst, X2) if inst.ground_truth is not None else None
    ok = e_q is not None and e_q <= max(inst.noise_level, 1e-5)
    return PGOResult(X1, X2, len(history), tuple(history), tuple(rhos), e_q, ok)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _fmt(q: DualQuaternion) -> str:
    return " ".join(repr(float(c)) for c in q.as_array())


def dump_instance(inst: PGOInstance, fp: TextIO) -> None:
    """Write ``# pgo`` header, one observation per line, then ``gt`` lines (1-based)."""
    fp.write(f"# pgo n={inst.n} s={float(inst.obs_rate)!r} noise={float(inst.noise_level)!r}\n")
    for (i, j), q in inst.observations.items():
        fp.write(f"{i + 1} {j + 1} {_fmt(q)}\n")
    if inst.ground_truth is not None:
        for i, q in enumerate(inst.ground_truth.entries()):
            fp.write(f"gt {i + 1} {_fmt(q)}\n")


def _floats(toks, lineno):
    try:
        vals = [float(t) for t in toks]
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from exc
    if not all(math.isfinite(v) for v in vals):
        raise FormatError("non-finite value", lineno)
    return vals


def _index(tok, n, lineno):
    try:
        i = int(tok)
    except ValueError as exc:
        raise FormatError(f"bad index {tok!r}", lineno) from exc
    if not 1 <= i <= n:
        raise FormatError(f"index {i} outside [1, {n}]", lineno)
    return i - 1


def load_instance(fp: TextIO) -> PGOInstance:
    n = s = noise = None
    obs, gt = {}, {}
    lineno = 0
    for lineno, raw in enumerate(fp, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            toks = line[1:].split()
            if toks[:1] == ["pgo"] and n is None:
                try:
                    kv = dict(t.split("=", 1) for t in toks[1:])
                    n, s, noise = int(kv["n"]), float(kv["s"]), float(kv["noise"])
                except (ValueError, KeyError) as exc:
                    raise FormatError(f"bad header {line!r}", lineno) from exc
            continue
        if n is None:
            raise FormatError("data before '# pgo n=.. s=.. noise=..' header", lineno)
        toks = line.split()
        if toks[0] == "gt":
            if len(toks) != 10:
                raise FormatError(f"ground truth line needs 10 fields, got {len(toks)}", lineno)
            i = _index(toks[1], n, lineno)
            gt[i] = _floats(toks[2:], lineno)
            continue
        if len(toks) != 10:
            raise FormatError(f"observation line needs 10 fields, got {len(toks)}", lineno)
        i, j = _index(toks[0], n, lineno), _index(toks[1], n, lineno)
        if i == j:
            raise FormatError("self loop", lineno)
        if (i, j) in obs:
            raise FormatError(f"duplicate edge ({i + 1}, {j + 1})", lineno)
        q = DualQuaternion.from_array(_floats(toks[2:], lineno))
        if not q.is_unit():
            raise FormatError("observation is not a unit dual quaternion", lineno)
        obs[(i, j)] = q
    if n is None:
        raise FormatError("missing '# pgo' header", lineno or None)
    expected = edge_count(n, s, True)
    if len(obs) != expected:
        raise FormatError(f"expected {expected} observations, found {len(obs)} (truncated?)", lineno)
    if gt and len(gt) != n:
        raise FormatError(f"expected {n} ground truth lines, found {len(gt)}", lineno)

    st = np.zeros((n, n, 4))
    du = np.zeros((n, n, 4))
    for (i, j), q in obs.items():
        a = q.as_array()
        st[i, j], du[i, j] = a[:4], a[4:]
    graph = Graph(n, frozenset(obs), True)
    x = None
    if gt:
        arr = np.array([gt[i] for i in range(n)])
        x = DQVector.from_parts(arr[:, :4], arr[:, 4:])
    return PGOInstance(graph, DQMatrix.from_parts(st, du), x, noise, s)


def with_variant(cfg: PGOConfig, variant: str) -> PGOConfig:
    return replace(cfg, variant=variant, rho1=None)

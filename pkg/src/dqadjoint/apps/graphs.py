"""Random graphs, dual quaternion Laplacians and the pentagon test matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..eig import Spectrum
from ..errors import DimensionMismatch, InfeasibleCount, LengthMismatch, NonUnitEntry
from ..linalg import DQMatrix, DQVector, unit_project_entries, vec_norms
from ..scalar import DualQuaternion, Quaternion

CONNECT_RETRIES = 100


@dataclass(frozen=True)
class Graph:
    """Edges are 0-based ``(i, j)`` pairs; undirected edges satisfy ``i < j``."""

    n: int
    edges: frozenset
    directed: bool = False

    def indicator(self) -> np.ndarray:
        """Matrix with 1 at every stored edge position."""
        D = np.zeros((self.n, self.n))
        for i, j in self.edges:
            D[i, j] = 1.0
        return D

    def adjacency(self) -> np.ndarray:
        D = self.indicator()
        return np.maximum(D, D.T) if not self.directed else D

    def is_connected(self) -> bool:
        """Weak connectivity by union-find."""
        parent = list(range(self.n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in self.edges:
            parent[find(i)] = find(j)
        return len({find(i) for i in range(self.n)}) <= 1


def random_unit_dq(rng) -> DualQuaternion:
    """Unit dual quaternion with a uniformly random rotation part."""
    st = rng.standard_normal(4)
    st /= np.linalg.norm(st)
    w = 0.5 * rng.standard_normal(4)
    du = w - st * float(st @ w)
    return DualQuaternion(Quaternion(*st), Quaternion(*du))


def random_unit_dq_vector(n: int, rng) -> DQVector:
    st = rng.standard_normal((n, 4))
    st /= np.linalg.norm(st, axis=1, keepdims=True)
    w = 0.5 * rng.standard_normal((n, 4))
    du = w - st * np.sum(st * w, axis=1, keepdims=True)
    return DQVector.from_parts(st, du)


def edge_count(n: int, s: float, directed: bool) -> int:
    return math.floor(s * n * (n - 1)) if directed else math.floor(s * n * n / 2)


def random_graph(n: int, s: float, directed: bool, rng) -> Graph:
    """Uniform edge set of the size implied by the sparsity ``s``.

    Undirected graphs are redrawn until connected, at most 100 times; the
    last draw is returned even when disconnected.
    """
    if not 0 < s <= 1:
        raise InfeasibleCount(f"sparsity {s} outside (0, 1]")
    m = edge_count(n, s, directed)
    if directed:
        pool = [(i, j) for i in range(n) for j in range(n) if i != j]
    else:
        pool = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if m > len(pool):
        raise InfeasibleCount(f"{m} edges requested but only {len(pool)} possible")
    for _ in range(CONNECT_RETRIES):
        idx = rng.choice(len(pool), size=m, replace=False)
        g = Graph(n, frozenset(pool[k] for k in idx), directed)
        if directed or g.is_connected():
            break
    return g


def _check_unit(q: DQVector, tol=1e-10):
    st, du = q.parts()
    ok = np.all(np.abs(np.sum(st * st, axis=1) - 1) <= tol) and np.all(np.abs(np.sum(st * du, axis=1)) <= tol)
    if not ok:
        raise NonUnitEntry("every entry of q must be a unit dual quaternion")


def build_laplacian(G: Graph, q: DQVector) -> DQMatrix:
    """``L = D - A`` with ``a_ij = q_i* q_j`` on edges."""
    if len(q) != G.n:
        raise DimensionMismatch(f"graph has {G.n} vertices but q has {len(q)} entries")
    _check_unit(q)
    Adj = G.adjacency()
    A = _gram_on(q, Adj)
    return DQMatrix.from_real(np.diag(Adj.sum(axis=1))) - A


def _gram_on(q: DQVector, mask) -> DQMatrix:
    """Entries ``q_i* q_j`` where ``mask`` is nonzero, zero elsewhere."""
    # q_i* = conj(c1) - c2 j entrywise
    a1, a2, a3, a4 = (x[:, None] for x in (np.conj(q.b1), -q.b2, np.conj(q.b3), -q.b4))
    b1, b2, b3, b4 = (x[None, :] for x in q.blocks)

    def prod(x1, x2, y1, y2):
        return x1 * y1 - x2 * np.conj(y2), x1 * y2 + x2 * np.conj(y1)

    s = prod(a1, a2, b1, b2)
    d1 = prod(a1, a2, b3, b4)
    d2 = prod(a3, a4, b1, b2)
    blocks = (s[0], s[1], d1[0] + d2[0], d1[1] + d2[1])
    return DQMatrix._wrap(*(b * mask for b in blocks))


# values printed with four decimals; projected back onto unit dual quaternions
PENTAGON_Q_ST = [
    [-0.5103, -0.2661, -0.2632, -0.7743],
    [0.2881, -0.6705, -0.2305, -0.6437],
    [-0.1236, 0.1789, -0.7519, -0.6223],
    [-0.5605, -0.2485, -0.6001, -0.5138],
    [-0.5946, -0.1002, -0.2584, -0.7547],
]
PENTAGON_Q_DU = [
    [0.2645, -0.4286, 0.4180, -0.1691],
    [-0.3885, -0.5378, 0.2295, 0.3042],
    [-0.9227, -0.9461, 0.1770, -0.3027],
    [-0.2963, -0.3621, 0.6937, -0.3117],
    [-0.2488, 0.2520, 0.0635, 0.1408],
]


def pentagon_q() -> DQVector:
    raw = DQMatrix.from_parts(np.array(PENTAGON_Q_ST)[:, None, :], np.array(PENTAGON_Q_DU)[:, None, :])
    return unit_project_entries(raw).column(0)


def cycle_graph(n: int) -> Graph:
    return Graph(n, frozenset(tuple(sorted((i, (i + 1) % n))) for i in range(n)), False)


def build_pentagon() -> DQMatrix:
    """5-cycle matrix with ``p_ij = q_i* q_j`` on edges and ``p_ii = i eps``.

    The diagonal dual part is the 1-based row index, a real number.
    """
    q = pentagon_q()
    A = _gram_on(q, cycle_graph(5).adjacency())
    return A + DQMatrix.from_real(np.zeros((5, 5)), np.diag(np.arange(1.0, 6.0)))


def metric_e_lambda(Q: DQMatrix, spec: Spectrum) -> float:
    """Mean eigenpair residual ``||Q u - u lambda||_2R`` over the spectrum."""
    n = Q.shape[0]
    if len(spec) != n:
        raise LengthMismatch(f"spectrum has {len(spec)} pairs for a {n} x {n} matrix")
    return sum(vec_norms(Q @ p.vector - p.vector * p.value, "twoR") for p in spec) / n

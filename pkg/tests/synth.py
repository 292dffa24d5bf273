"""Test oracles and random instance builders.

Nothing here calls the eigen-solvers; spectra are planted through explicit
unitary factors so that the expected answer is known before any routine runs.
"""

import itertools

import numpy as np

from dqadjoint.linalg import DQMatrix, DQVector, conj_transpose
from dqadjoint.scalar import DualNumber, DualQuaternion, Quaternion

# basis products e_a * e_b = sign * e_c for the units 1, i, j, k
_TABLE = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def table_mul(p, q):
    """Quaternion product by bilinear extension of the unit table."""
    out = [0.0] * 4
    for a, b in itertools.product(range(4), repeat=2):
        s, c = _TABLE[a, b]
        out[c] += s * p[a] * q[b]
    return out


def rand_dq(rng, scale=1.0):
    return DualQuaternion.from_array(rng.uniform(-scale, scale, 8))


def rand_dq_matrix(rng, m, n=None):
    n = m if n is None else n
    return DQMatrix.from_parts(rng.uniform(-1, 1, (m, n, 4)), rng.uniform(-1, 1, (m, n, 4)))


def rand_dq_vector(rng, n):
    return DQVector.from_parts(rng.uniform(-1, 1, (n, 4)), rng.uniform(-1, 1, (n, 4)))


def rand_hermitian(rng, n):
    A = rand_dq_matrix(rng, n)
    return (A + conj_transpose(A)) * 0.5


def entrywise_matmul(A, B):
    """Matrix product by scalar dual quaternion loops."""
    m, k = A.shape
    n = B.shape[1]
    rows = []
    for i in range(m):
        row = []
        for j in range(n):
            acc = DualQuaternion()
            for t in range(k):
                acc = acc + A[i, t] * B[t, j]
            row.append(acc)
        rows.append(row)
    return DQMatrix.from_entries(rows)


def rand_unit_dq(rng):
    st = rng.standard_normal(4)
    st /= np.linalg.norm(st)
    w = rng.standard_normal(4)
    du = w - st * (st @ w)
    return DualQuaternion(Quaternion(*st), Quaternion(*du))


def dual_givens(n, p, q, theta, phi):
    """Real rotation in the (p, q) plane by the dual angle ``theta + phi eps``."""
    c, s = np.cos(theta), np.sin(theta)
    st = np.eye(n)
    du = np.zeros((n, n))
    st[p, p] = st[q, q] = c
    st[p, q], st[q, p] = -s, s
    du[p, p] = du[q, q] = -s * phi
    du[p, q], du[q, p] = -c * phi, c * phi
    return DQMatrix.from_real(st, du)


def rand_unitary(rng, n, rotations=None):
    """Product of unit dual quaternion diagonals and dual Givens rotations."""
    U = DQMatrix.diag([rand_unit_dq(rng) for _ in range(n)])
    for _ in range(0 if n < 2 else rotations or 2 * n):
        p, q = rng.choice(n, 2, replace=False)
        G = dual_givens(n, p, q, rng.uniform(0, 2 * np.pi), rng.standard_normal())
        D = DQMatrix.diag([rand_unit_dq(rng) for _ in range(n)])
        U = D @ G @ U
    return U


def planted(rng, values, rotations=None):
    """Hermitian ``U diag(values) U*`` with a random unitary U; returns (Q, U)."""
    n = len(values)
    U = rand_unitary(rng, n, rotations)
    D = DQMatrix.from_real(np.diag([v.st for v in values]), np.diag([v.du for v in values]))
    return U @ D @ conj_transpose(U), U


def separated_values(rng, n, gap=0.5):
    """Dual numbers with distinct standard magnitudes at least ``gap`` apart."""
    mags = 1.0 + gap * np.arange(n) + rng.uniform(0, gap / 4, n)
    signs = rng.choice([-1.0, 1.0], n)
    return [DualNumber(m * s, rng.uniform(-2, 2)) for m, s in zip(mags, signs)]


def match_values(got, want, tol):
    """Greedy matching of two dual number lists; returns the worst mismatch."""
    want = list(want)
    worst = 0.0
    for g in got:
        d = [max(abs(g.st - w.st), abs(g.du - w.du)) for w in want]
        k = int(np.argmin(d))
        worst = max(worst, d[k])
        want.pop(k)
    return worst


def _rel(a, b):
    return float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(b))))


def _dc_rel(X, Y):
    return max(_rel(X.st, Y.st), _rel(X.du, Y.du))


def _dual_rel(a, b):
    return max(abs(a.st - b.st), abs(a.du - b.du)) / max(1.0, abs(b.st), abs(b.du))


def homomorphism_errors(rng, n=4):
    """Worst relative deviation of each adjoint identity on one random triple."""
    from dqadjoint.adjoint import to_adjoint
    from dqadjoint.linalg import mat_norms

    P, Q, P1 = (rand_dq_matrix(rng, n) for _ in range(3))
    JP = to_adjoint(P)
    fP, fJ = mat_norms(P, "F"), mat_norms(JP, "F")
    sP, sJ = mat_norms(P, "Fstar"), mat_norms(JP, "Fstar")
    return {
        "product": _dc_rel(to_adjoint(P @ Q), JP @ to_adjoint(Q)),
        "sum": _dc_rel(to_adjoint(P + P1), JP + to_adjoint(P1)),
        "star": _dc_rel(to_adjoint(conj_transpose(P)), JP.H),
        "F": _dual_rel(fJ * fJ, 2 * (fP * fP)),
        "Fstar": _dual_rel(sJ * sJ, 2 * (sP * sP)),
    }

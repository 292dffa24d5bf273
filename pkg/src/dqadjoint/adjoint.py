"""Dual complex adjoint representation of dual quaternion matrices and vectors.

``to_adjoint`` maps ``Q = A1 + A2 j + (A3 + A4 j) eps`` to::

    [[A1, A2], [-conj(A2), conj(A1)]] + [[A3, A4], [-conj(A4), conj(A3)]] eps

The image of an m x n matrix is 2m x 2n and the map respects sums, products
and conjugate transposes.  ``from_adjoint`` reads the top block row back, so
``from_adjoint(to_adjoint(Q)) == Q`` holds exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import NotAdjointStructured, OddLength
from .linalg import DCMatrix, DCVector, DQMatrix, DQVector, mat_norms

STRUCTURE_TOL = 1e-10


def _assemble(a1, a2):
    return np.block([[a1, a2], [-np.conj(a2), np.conj(a1)]])


def to_adjoint(Q: DQMatrix) -> DCMatrix:
    return DCMatrix._wrap(_assemble(Q.b1, Q.b2), _assemble(Q.b3, Q.b4))


def from_adjoint(P: DCMatrix, tol: float = STRUCTURE_TOL) -> DQMatrix:
    rows, cols = P.shape
    if rows % 2 or cols % 2:
        raise NotAdjointStructured(f"shape {P.shape} is not even in both dimensions")
    m, n = rows // 2, cols // 2
    scale = tol * max(1.0, mat_norms(P, "FR"))
    blocks = []
    for M in (P.st, P.du):
        a1, a2 = M[:m, :n], M[:m, n:]
        err = np.linalg.norm(M[m:, :n] + np.conj(a2)) + np.linalg.norm(M[m:, n:] - np.conj(a1))
        if err > scale:
            raise NotAdjointStructured(f"block structure violated by {err:.3e}")
        blocks += [a1.copy(), a2.copy()]
    return DQMatrix._wrap(*blocks)


def vec_to_adjoint(v: DQVector) -> DCVector:
    """F(v): stack (v1, -conj v2) and (v3, -conj v4)."""
    return DCVector._wrap(
        np.concatenate([v.b1, -np.conj(v.b2)]),
        np.concatenate([v.b3, -np.conj(v.b4)]),
    )


def _halves(u: DCVector):
    if len(u) % 2:
        raise OddLength(f"length {len(u)} is odd")
    n = len(u) // 2
    return u.st[:n], u.st[n:], u.du[:n], u.du[n:]


def vec_from_adjoint(u: DCVector) -> DQVector:
    """Inverse of :func:`vec_to_adjoint`; defined on every even-length vector."""
    u1, u2, u3, u4 = _halves(u)
    return DQVector._wrap(u1.copy(), -np.conj(u2), u3.copy(), -np.conj(u4))


def swap_map(u: DCVector) -> DCVector:
    """H(u), which sends F(v) to F(v j)."""
    u1, u2, u3, u4 = _halves(u)
    return DCVector._wrap(
        np.concatenate([np.conj(u2), -np.conj(u1)]),
        np.concatenate([np.conj(u4), -np.conj(u3)]),
    )


def is_adjoint_structured(P: DCMatrix, tol: float = STRUCTURE_TOL) -> bool:
    try:
        from_adjoint(P, tol)
    except NotAdjointStructured:
        return False
    return True

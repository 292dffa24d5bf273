"""Dense dual quaternion and dual complex matrices.

A dual quaternion matrix is stored as four complex blocks::

    Q = B1 + B2 j + (B3 + B4 j) eps

where each quaternion entry ``q0 + q1 i + q2 j + q3 k`` contributes
``q0 + q1 i`` to B1 (resp. B3) and ``q2 + q3 i`` to B2 (resp. B4).  Products
use the rule ``j z = conj(z) j`` for complex ``z``.
"""

from __future__ import annotations

import math
from typing import Iterable, TextIO

import numpy as np

from .errors import DimensionMismatch, FormatError, NotSquare, ZeroVector
from .scalar import DualNumber, DualQuaternion, Quaternion

HERMITIAN_TOL = 1e-10


def _qprod(a1, a2, b1, b2, mm):
    """(a1 + a2 j)(b1 + b2 j) with ``mm`` the underlying complex product."""
    return mm(a1, b1) - mm(a2, np.conj(b2)), mm(a1, b2) + mm(a2, np.conj(b1))


def _as_complex(a, shape=None):
    if a is None:
        return np.zeros(shape, dtype=complex)
    return np.array(a, dtype=complex)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


class _DQBase:
    """Shared storage and elementwise algebra for DQMatrix / DQVector."""

    __slots__ = ("b1", "b2", "b3", "b4")
    ndim: int

    def __init__(self, b1, b2=None, b3=None, b4=None):
        b1 = _as_complex(b1)
        b2, b3, b4 = (_as_complex(b, b1.shape) for b in (b2, b3, b4))
        if b1.ndim != self.ndim:
            raise DimensionMismatch(f"{type(self).__name__} needs {self.ndim}-d blocks, got {b1.ndim}-d")
        if not (b1.shape == b2.shape == b3.shape == b4.shape):
            raise DimensionMismatch("all four blocks must share a shape")
        for b in (b1, b2, b3, b4):
            if not np.all(np.isfinite(b)):
                raise ValueError("non-finite entry")
        self._set(b1, b2, b3, b4)

    def _set(self, b1, b2, b3, b4):
        _freeze(b1, b2, b3, b4)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        object.__setattr__(self, "b3", b3)
        object.__setattr__(self, "b4", b4)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def _wrap(cls, b1, b2, b3, b4):
        obj = object.__new__(cls)
        obj._set(np.asarray(b1), np.asarray(b2), np.asarray(b3), np.asarray(b4))
        return obj

    @classmethod
    def from_parts(cls, st, du=None):
        """Build from real arrays of shape ``(..., 4)`` (w, x, y, z)."""
        st = np.asarray(st, dtype=float)
        du = np.zeros_like(st) if du is None else np.asarray(du, dtype=float)
        return cls(
            st[..., 0] + 1j * st[..., 1],
            st[..., 2] + 1j * st[..., 3],
            du[..., 0] + 1j * du[..., 1],
            du[..., 2] + 1j * du[..., 3],
        )

    @classmethod
    def from_real(cls, st, du=None):
        """Real-valued standard and dual parts (no i, j, k components)."""
        st = np.asarray(st, dtype=float)
        du = np.zeros_like(st) if du is None else np.asarray(du, dtype=float)
        z = np.zeros(st.shape, dtype=complex)
        return cls(st.astype(complex), z, du.astype(complex), z.copy())

    def parts(self) -> tuple[np.ndarray, np.ndarray]:
        """Real ``(..., 4)`` arrays for the standard and dual parts."""

        def split(c1, c2):
            return np.stack([c1.real, c1.imag, c2.real, c2.imag], axis=-1)

        return split(self.b1, self.b2), split(self.b3, self.b4)

    @property
    def shape(self):
        return self.b1.shape

    @property
    def blocks(self):
        return self.b1, self.b2, self.b3, self.b4

    @property
    def st(self):
        """Standard part as the same type with a zero dual part."""
        z = np.zeros(self.shape, dtype=complex)
        return type(self)._wrap(self.b1, self.b2, z, z.copy())

    @property
    def du(self):
        z = np.zeros(self.shape, dtype=complex)
        return type(self)._wrap(self.b3, self.b4, z, z.copy())

    def is_appreciable(self) -> bool:
        return bool(np.any(self.b1) or np.any(self.b2))

    def __add__(self, other):
        self._check_same(other)
        return type(self)._wrap(*(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check_same(other)
        return type(self)._wrap(*(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return type(self)._wrap(*(-a for a in self.blocks))

    def __mul__(self, s):
        """Scale by a real or a dual number (both commute with quaternions)."""
        if isinstance(s, DualNumber):
            a, b = s.st, s.du
            return type(self)._wrap(a * self.b1, a * self.b2, a * self.b3 + b * self.b1, a * self.b4 + b * self.b2)
        if isinstance(s, (int, float, np.floating, np.integer)):
            return type(self)._wrap(*(s * a for a in self.blocks))
        return NotImplemented

    __rmul__ = __mul__

    def _check_same(self, other):
        if type(other) is not type(self) or other.shape != self.shape:
            raise DimensionMismatch(f"shape mismatch: {self.shape} vs {getattr(other, 'shape', None)}")

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        return other.shape == self.shape and all(
            np.allclose(a, b, atol=atol, rtol=rtol) for a, b in zip(self.blocks, other.blocks)
        )

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.shape == self.shape
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    __hash__ = None


class DQMatrix(_DQBase):
    ndim = 2

    @classmethod
    def zeros(cls, m, n=None):
        n = m if n is None else n
        z = np.zeros((m, n), dtype=complex)
        return cls._wrap(z, z.copy(), z.copy(), z.copy())

    @classmethod
    def identity(cls, n):
        return cls.from_real(np.eye(n))

    @classmethod
    def from_entries(cls, rows: Iterable[Iterable[DualQuaternion]]):
        rows = [list(r) for r in rows]
        arr = np.array([[q.as_array() for q in r] for r in rows], dtype=float)
        return cls.from_parts(arr[..., :4], arr[..., 4:])

    @classmethod
    def diag(cls, entries):
        """Diagonal matrix from dual numbers or dual quaternions."""
        qs = [e if isinstance(e, DualQuaternion) else DualQuaternion.real(e.st, e.du) for e in entries]
        n = len(qs)
        st = np.zeros((n, n, 4))
        du = np.zeros((n, n, 4))
        for i, q in enumerate(qs):
            st[i, i] = q.st.as_tuple()
            du[i, i] = q.du.as_tuple()
        return cls.from_parts(st, du)

    def __getitem__(self, idx) -> DualQuaternion:
        i, j = idx
        return DualQuaternion(
            Quaternion.from_complex_pair(self.b1[i, j], self.b2[i, j]),
            Quaternion.from_complex_pair(self.b3[i, j], self.b4[i, j]),
        )

    def __matmul__(self, other):
        return dq_matmul(self, other)

    @property
    def H(self) -> DQMatrix:
        return conj_transpose(self)

    def column(self, j) -> DQVector:
        return DQVector._wrap(*(b[:, j] for b in self.blocks))

    def diagonal(self) -> DQVector:
        return DQVector._wrap(*(np.diagonal(b).copy() for b in self.blocks))

    def trace(self) -> DualQuaternion:
        return DualQuaternion(
            Quaternion.from_complex_pair(np.trace(self.b1), np.trace(self.b2)),
            Quaternion.from_complex_pair(np.trace(self.b3), np.trace(self.b4)),
        )

    @classmethod
    def from_columns(cls, cols):
        cols = list(cols)
        return cls._wrap(*(np.stack([c.blocks[k] for c in cols], axis=1) for k in range(4)))

    def __repr__(self):
        return f"DQMatrix(shape={self.shape})"


class DQVector(_DQBase):
    ndim = 1

    @classmethod
    def zeros(cls, n):
        z = np.zeros(n, dtype=complex)
        return cls._wrap(z, z.copy(), z.copy(), z.copy())

    @classmethod
    def from_entries(cls, entries: Iterable[DualQuaternion]):
        arr = np.array([q.as_array() for q in entries], dtype=float).reshape(-1, 8)
        return cls.from_parts(arr[:, :4], arr[:, 4:])

    @classmethod
    def basis(cls, n, i):
        e = np.zeros(n)
        e[i] = 1.0
        return cls.from_real(e)

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, i) -> DualQuaternion:
        return DualQuaternion(
            Quaternion.from_complex_pair(self.b1[i], self.b2[i]),
            Quaternion.from_complex_pair(self.b3[i], self.b4[i]),
        )

    def entries(self) -> list[DualQuaternion]:
        return [self[i] for i in range(len(self))]

    def as_column(self) -> DQMatrix:
        return DQMatrix._wrap(*(b[:, None] for b in self.blocks))

    def rmul(self, q: DualQuaternion) -> DQVector:
        """Right multiplication ``v q`` by a dual quaternion scalar."""
        s1, s2 = q.st.as_complex_pair()
        s3, s4 = q.du.as_complex_pair()
        mul = np.multiply
        st = _qprod(self.b1, self.b2, s1, s2, mul)
        d1 = _qprod(self.b1, self.b2, s3, s4, mul)
        d2 = _qprod(self.b3, self.b4, s1, s2, mul)
        return DQVector._wrap(st[0], st[1], d1[0] + d2[0], d1[1] + d2[1])

    def __repr__(self):
        return f"DQVector(len={len(self)})"


def dq_matmul(A: DQMatrix, B):
    """Matrix product of ``A`` with a DQMatrix or DQVector."""
    if A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"inner dimensions differ: {A.shape} @ {B.shape}")
    mm = np.matmul
    st = _qprod(A.b1, A.b2, B.b1, B.b2, mm)
    d1 = _qprod(A.b1, A.b2, B.b3, B.b4, mm)
    d2 = _qprod(A.b3, A.b4, B.b1, B.b2, mm)
    return type(B)._wrap(st[0], st[1], d1[0] + d2[0], d1[1] + d2[1])


def conj_transpose(A: DQMatrix) -> DQMatrix:
    # (A1 + A2 j)* = A1^H - A2^T j
    return DQMatrix._wrap(A.b1.conj().T, -A.b2.T, A.b3.conj().T, -A.b4.T)


def inner(u: DQVector, v: DQVector) -> DualQuaternion:
    """``u* v`` as a dual quaternion."""
    if u.shape != v.shape:
        raise DimensionMismatch("vector lengths differ")

    def ip(a1, a2, b1, b2):
        return np.sum(np.conj(a1) * b1 + a2 * np.conj(b2)), np.sum(np.conj(a1) * b2 - a2 * np.conj(b1))

    s = ip(u.b1, u.b2, v.b1, v.b2)
    d1 = ip(u.b1, u.b2, v.b3, v.b4)
    d2 = ip(u.b3, u.b4, v.b1, v.b2)
    return DualQuaternion(
        Quaternion.from_complex_pair(*s),
        Quaternion.from_complex_pair(d1[0] + d2[0], d1[1] + d2[1]),
    )


def outer(u: DQVector, v: DQVector) -> DQMatrix:
    """``u v*``."""
    return dq_matmul(u.as_column(), conj_transpose(v.as_column()))


def _sc_inner(a1, a2, b1, b2) -> float:
    # real scalar part of the quaternion inner product (a1 + a2 j)* (b1 + b2 j)
    return float(np.real(np.vdot(a1, b1) + np.vdot(a2, b2)))


def _fro(*blocks) -> float:
    return math.sqrt(sum(float(np.vdot(b, b).real) for b in blocks))


def vec_norms(x: DQVector, kind: str = "two"):
    """``kind='two'`` -> DualNumber 2-norm; ``kind='twoR'`` -> real magnitude."""
    if kind == "twoR":
        return _fro(*x.blocks)
    if kind != "two":
        raise ValueError(f"unknown vector norm {kind!r}")
    a = _fro(x.b1, x.b2)
    if a > 0:
        return DualNumber(a, _sc_inner(x.b1, x.b2, x.b3, x.b4) / a)
    return DualNumber(0.0, _fro(x.b3, x.b4))


def mat_norms(Q, kind: str = "F"):
    """F (dual), FR (real) or Fstar (dual) norm of a DQMatrix or DCMatrix."""
    if isinstance(Q, DCMatrix):
        st, du = (Q.st,), (Q.du,)
    else:
        st, du = (Q.b1, Q.b2), (Q.b3, Q.b4)
    a = _fro(*st)
    b = _fro(*du)
    if kind == "FR":
        return math.hypot(a, b)
    if kind == "F":
        if a > 0:
            cross = sum(float(np.vdot(s, d).real) for s, d in zip(st, du))
            return DualNumber(a, cross / a)
        return DualNumber(0.0, b)
    if kind == "Fstar":
        if a > 0:
            return DualNumber(a, b * b / (2 * a))
        return DualNumber(0.0, b)
    raise ValueError(f"unknown matrix norm {kind!r}")


def vec_normalize(x: DQVector) -> DQVector:
    """Project ``x`` onto the set of vectors with unit 2-norm."""
    a = _fro(x.b1, x.b2)
    if a > 0:
        u1, u2 = x.b1 / a, x.b2 / a
        w3, w4 = x.b3 / a, x.b4 / a
        c = _sc_inner(u1, u2, w3, w4)
        return DQVector._wrap(u1, u2, w3 - c * u1, w4 - c * u2)
    b = _fro(x.b3, x.b4)
    if b == 0:
        raise ZeroVector("cannot normalize the zero vector")
    z = np.zeros(len(x), dtype=complex)
    return DQVector._wrap(x.b3 / b, x.b4 / b, z, z.copy())


def is_hermitian(Q, tol: float = HERMITIAN_TOL) -> bool:
    if Q.shape[0] != Q.shape[1]:
        raise NotSquare(f"matrix of shape {Q.shape} is not square")
    if isinstance(Q, DCMatrix):
        diff = Q - Q.H
    else:
        diff = Q - conj_transpose(Q)
    return mat_norms(diff, "FR") <= tol * max(1.0, mat_norms(Q, "FR"))


def unit_project_entries(M: DQMatrix) -> DQMatrix:
    """Entrywise projection onto unit dual quaternions.

    Entries with zero standard part fall back to ``q_I/|q_I|``; the all-zero
    entry raises through :func:`dqadjoint.scalar.dq_unit_project` semantics.
    """
    n = np.sqrt(np.abs(M.b1) ** 2 + np.abs(M.b2) ** 2)
    if np.any(n == 0):
        from .scalar import dq_unit_project

        st, du = M.parts()
        out_st = np.empty_like(st)
        out_du = np.empty_like(du)
        for idx in np.ndindex(M.shape):
            q = dq_unit_project(DualQuaternion(Quaternion(*st[idx]), Quaternion(*du[idx])))
            out_st[idx] = q.st.as_tuple()
            out_du[idx] = q.du.as_tuple()
        return type(M).from_parts(out_st, out_du)
    u1, u2 = M.b1 / n, M.b2 / n
    w3, w4 = M.b3 / n, M.b4 / n
    c = np.real(np.conj(u1) * w3 + np.conj(u2) * w4)
    return type(M)._wrap(u1, u2, w3 - c * u1, w4 - c * u2)


# ---------------------------------------------------------------------------
# dual complex matrices
# ---------------------------------------------------------------------------


class _DCBase:
    __slots__ = ("st", "du")
    ndim: int

    def __init__(self, st, du=None):
        st = np.array(st, dtype=complex)
        du = np.zeros_like(st) if du is None else np.array(du, dtype=complex)
        if st.ndim != self.ndim or st.shape != du.shape:
            raise DimensionMismatch("standard and dual parts must share a shape")
        if not (np.all(np.isfinite(st)) and np.all(np.isfinite(du))):
            raise ValueError("non-finite entry")
        _freeze(st, du)
        object.__setattr__(self, "st", st)
        object.__setattr__(self, "du", du)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def _wrap(cls, st, du):
        obj = object.__new__(cls)
        st, du = np.asarray(st), np.asarray(du)
        _freeze(st, du)
        object.__setattr__(obj, "st", st)
        object.__setattr__(obj, "du", du)
        return obj

    @property
    def shape(self):
        return self.st.shape

    def __add__(self, other):
        return type(self)._wrap(self.st + other.st, self.du + other.du)

    def __sub__(self, other):
        return type(self)._wrap(self.st - other.st, self.du - other.du)

    def __neg__(self):
        return type(self)._wrap(-self.st, -self.du)

    def __mul__(self, s):
        if isinstance(s, DualNumber):
            return type(self)._wrap(s.st * self.st, s.st * self.du + s.du * self.st)
        if isinstance(s, (int, float, complex, np.number)):
            return type(self)._wrap(s * self.st, s * self.du)
        return NotImplemented

    __rmul__ = __mul__

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        return (
            other.shape == self.shape
            and np.allclose(self.st, other.st, atol=atol, rtol=rtol)
            and np.allclose(self.du, other.du, atol=atol, rtol=rtol)
        )

    __hash__ = None


class DCMatrix(_DCBase):
    ndim = 2

    @classmethod
    def identity(cls, n):
        return cls._wrap(np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex))

    def __matmul__(self, other):
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"inner dimensions differ: {self.shape} @ {other.shape}")
        return type(other)._wrap(self.st @ other.st, self.st @ other.du + self.du @ other.st)

    @property
    def H(self) -> DCMatrix:
        return DCMatrix._wrap(self.st.conj().T, self.du.conj().T)

    def column(self, j) -> DCVector:
        return DCVector._wrap(self.st[:, j], self.du[:, j])

    def __repr__(self):
        return f"DCMatrix(shape={self.shape})"


class DCVector(_DCBase):
    ndim = 1

    def __len__(self):
        return self.shape[0]

    def norm2(self) -> DualNumber:
        a = float(np.linalg.norm(self.st))
        if a > 0:
            return DualNumber(a, float(np.vdot(self.st, self.du).real) / a)
        return DualNumber(0.0, float(np.linalg.norm(self.du)))

    def norm2R(self) -> float:
        return math.hypot(float(np.linalg.norm(self.st)), float(np.linalg.norm(self.du)))

    def __repr__(self):
        return f"DCVector(len={len(self)})"


def dc_inner(u: DCVector, v: DCVector) -> complex:
    """Return ``u* v`` as a (standard, dual) pair of complex numbers."""
    return np.vdot(u.st, v.st), np.vdot(u.st, v.du) + np.vdot(u.du, v.st)


def dc_outer(u: DCVector, v: DCVector) -> DCMatrix:
    return DCMatrix._wrap(
        np.outer(u.st, v.st.conj()),
        np.outer(u.st, v.du.conj()) + np.outer(u.du, v.st.conj()),
    )


def dc_normalize(x: DCVector) -> DCVector:
    a = float(np.linalg.norm(x.st))
    if a > 0:
        u = x.st / a
        w = x.du / a
        return DCVector._wrap(u, w - np.vdot(u, w).real * u)
    b = float(np.linalg.norm(x.du))
    if b == 0:
        raise ZeroVector("cannot normalize the zero vector")
    return DCVector._wrap(x.du / b, np.zeros_like(x.du))


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------


def dump_matrix(Q: DQMatrix, fp: TextIO) -> None:
    """Write ``Q`` one nonzero entry per line, 1-based indices."""
    m, n = Q.shape
    fp.write(f"# dqmatrix m={m} n={n}\n")
    for i in range(m):
        for j in range(n):
            vals = [Q.b1[i, j], Q.b2[i, j], Q.b3[i, j], Q.b4[i, j]]
            if any(vals):
                nums = " ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in vals)
                fp.write(f"{i + 1} {j + 1} {nums}\n")


def load_matrix(fp: TextIO) -> DQMatrix:
    header = None
    entries = []
    for lineno, raw in enumerate(fp, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None and line[1:].split()[:1] == ["dqmatrix"]:
                try:
                    kv = dict(tok.split("=", 1) for tok in line[1:].split()[1:])
                    header = int(kv["m"]), int(kv["n"])
                except (ValueError, KeyError) as exc:
                    raise FormatError(f"bad header {line!r}", lineno) from exc
            continue
        if header is None:
            raise FormatError("entry before '# dqmatrix m=.. n=..' header", lineno)
        toks = line.split()
        if len(toks) != 10:
            raise FormatError(f"expected 10 fields, got {len(toks)}", lineno)
        try:
            i, j = int(toks[0]) - 1, int(toks[1]) - 1
            vals = [float(t) for t in toks[2:]]
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from exc
        if not (0 <= i < header[0] and 0 <= j < header[1]):
            raise FormatError(f"index ({i + 1}, {j + 1}) out of range", lineno)
        entries.append((i, j, vals))
    if header is None:
        raise FormatError("missing '# dqmatrix' header")
    blocks = [np.zeros(header, dtype=complex) for _ in range(4)]
    for i, j, vals in entries:
        for k in range(4):
            blocks[k][i, j] = complex(vals[2 * k], vals[2 * k + 1])
    return DQMatrix(*blocks)

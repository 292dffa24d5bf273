"""Dual numbers, dual complex numbers, quaternions and dual quaternions.

All types are frozen dataclasses; every operation returns a new value.
The infinitesimal unit satisfies eps**2 == 0, which is encoded directly in
the multiplication rules below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np

from .errors import DivisionByNonAppreciable, NonAppreciable, ZeroInput, ZeroQuaternion


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _sgn(x: float) -> float:
    # sgn(0) := 0
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# dual numbers / dual complex numbers
# ---------------------------------------------------------------------------


class _DualBase:
    st: complex
    du: complex

    def is_appreciable(self) -> bool:
        return self.st != 0

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self.st + other.st, self.du + other.du)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self.st - other.st, self.du - other.du)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return type(self)(-self.st, -self.du)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self.st * other.st, self.st * other.du + self.du * other.st)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return dual_div(self, self._coerce(other))

    def __rtruediv__(self, other):
        return dual_div(self._coerce(other), self)

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, _DualBase):
            return x
        if isinstance(x, (int, float, complex, np.number)):
            return cls(x, 0)
        return NotImplemented


@total_ordering
@dataclass(frozen=True)
class DualNumber(_DualBase):
    """Real dual number ``st + du*eps``.

    Ordering is lexicographic (standard part first) and uses exact float
    comparison; see :func:`approx_eq` for a tolerance-aware equality.
    """

    st: float
    du: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "st", float(self.st))
        object.__setattr__(self, "du", float(self.du))

    def __lt__(self, other):
        return dual_cmp(self, self._coerce(other)) is Ordering.LESS

    def __abs__(self):
        return dual_abs(self)

    def sqrt(self) -> DualNumber:
        """sqrt(a + b eps) = sqrt(a) + b / (2 sqrt(a)) eps for a > 0."""
        if self.st > 0:
            r = math.sqrt(self.st)
            return DualNumber(r, self.du / (2 * r))
        if self.st == 0 and self.du == 0:
            return DualNumber(0.0, 0.0)
        raise ValueError(f"square root undefined for {self}")

    def __repr__(self):
        return f"DualNumber({self.st!r}{self.du:+}ε)"

    def __format__(self, spec):
        spec = spec or ".4f"
        sign = "+" if self.du >= 0 else "-"
        return f"{format(self.st, spec)}{sign}{format(abs(self.du), spec)}ε"


@dataclass(frozen=True)
class DualComplex(_DualBase):
    st: complex
    du: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "st", complex(self.st))
        object.__setattr__(self, "du", complex(self.du))

    def conj(self) -> DualComplex:
        return DualComplex(self.st.conjugate(), self.du.conjugate())


def dual_div(a, b):
    """Dual (complex) division; the free constant of the 0/0 branch is 0."""
    cls = type(a)
    if b.st != 0:
        return cls(a.st / b.st, a.du / b.st - a.st * b.du / (b.st * b.st))
    if a.st == 0 and b.du != 0:
        return cls(a.du / b.du, 0)
    raise DivisionByNonAppreciable(f"cannot divide {a} by non-appreciable {b}")


def dual_abs(a: DualNumber) -> DualNumber:
    if a.st != 0:
        return DualNumber(abs(a.st), _sgn(a.st) * a.du)
    return DualNumber(0.0, abs(a.du))


def dual_cmp(a: DualNumber, b: DualNumber) -> Ordering:
    if a.st != b.st:
        return Ordering.GREATER if a.st > b.st else Ordering.LESS
    if a.du != b.du:
        return Ordering.GREATER if a.du > b.du else Ordering.LESS
    return Ordering.EQUAL


def approx_eq(a: DualNumber, b: DualNumber, atol: float = 1e-10) -> bool:
    return abs(a.st - b.st) <= atol and abs(a.du - b.du) <= atol


# ---------------------------------------------------------------------------
# quaternions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quaternion:
    """``q0 + q1 i + q2 j + q3 k``."""

    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    @classmethod
    def from_complex_pair(cls, c1: complex, c2: complex) -> Quaternion:
        """Build ``c1 + c2 j`` from two complex numbers."""
        c1, c2 = complex(c1), complex(c2)
        return cls(c1.real, c1.imag, c2.real, c2.imag)

    def as_complex_pair(self) -> tuple[complex, complex]:
        return complex(self.q0, self.q1), complex(self.q2, self.q3)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.q0, self.q1, self.q2, self.q3)

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a - b for a, b in zip(self.as_tuple(), other.as_tuple())))

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.q0, -self.q1, -self.q2, -self.q3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion(*(a * other for a in self.as_tuple()))

    def __rmul__(self, other):
        return Quaternion(*(other * a for a in self.as_tuple()))

    def __truediv__(self, s: float) -> Quaternion:
        return Quaternion(*(a / s for a in self.as_tuple()))

    def conj(self) -> Quaternion:
        return Quaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def norm(self) -> float:
        return math.sqrt(self.q0**2 + self.q1**2 + self.q2**2 + self.q3**2)

    def sc(self) -> float:
        """Scalar part (q + q*) / 2 as a plain real."""
        return self.q0

    def is_zero(self) -> bool:
        return self.q0 == 0 and self.q1 == 0 and self.q2 == 0 and self.q3 == 0

    def inv(self) -> Quaternion:
        return quat_inv(self)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    p0, p1, p2, p3 = p.as_tuple()
    q0, q1, q2, q3 = q.as_tuple()
    # [p0 q0 - p.q,  p0 q + q0 p + p x q]
    return Quaternion(
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + q0 * p1 + p2 * q3 - p3 * q2,
        p0 * q2 + q0 * p2 + p3 * q1 - p1 * q3,
        p0 * q3 + q0 * p3 + p1 * q2 - p2 * q1,
    )


def quat_inv(p: Quaternion) -> Quaternion:
    n2 = p.q0**2 + p.q1**2 + p.q2**2 + p.q3**2
    if n2 == 0:
        raise ZeroQuaternion("zero quaternion has no inverse")
    return p.conj() / n2


QZERO = Quaternion()
QONE = Quaternion(1.0)


# ---------------------------------------------------------------------------
# dual quaternions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualQuaternion:
    st: Quaternion = QZERO
    du: Quaternion = QZERO

    @classmethod
    def from_array(cls, a) -> DualQuaternion:
        """From 8 reals: standard (w, x, y, z) then dual (w, x, y, z)."""
        a = [float(x) for x in a]
        if len(a) != 8:
            raise ValueError("need exactly 8 components")
        return cls(Quaternion(*a[:4]), Quaternion(*a[4:]))

    def as_array(self) -> tuple[float, ...]:
        return self.st.as_tuple() + self.du.as_tuple()

    @classmethod
    def real(cls, st: float, du: float = 0.0) -> DualQuaternion:
        return cls(Quaternion(st), Quaternion(du))

    def is_appreciable(self) -> bool:
        return not self.st.is_zero()

    def __add__(self, other: DualQuaternion) -> DualQuaternion:
        return DualQuaternion(self.st + other.st, self.du + other.du)

    def __sub__(self, other: DualQuaternion) -> DualQuaternion:
        return DualQuaternion(self.st - other.st, self.du - other.du)

    def __neg__(self) -> DualQuaternion:
        return DualQuaternion(-self.st, -self.du)

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return dq_mul(self, other)
        if isinstance(other, DualNumber):
            return dq_mul(self, DualQuaternion.real(other.st, other.du))
        return DualQuaternion(self.st * other, self.du * other)

    def __rmul__(self, other):
        if isinstance(other, DualNumber):
            return dq_mul(DualQuaternion.real(other.st, other.du), self)
        return DualQuaternion(other * self.st, other * self.du)

    def conj(self) -> DualQuaternion:
        return DualQuaternion(self.st.conj(), self.du.conj())

    def abs(self) -> DualNumber:
        return dq_abs_mag(self)[0]

    def mag(self) -> float:
        return dq_abs_mag(self)[1]

    def inv(self) -> DualQuaternion:
        return dq_inv(self)

    def sc(self) -> DualNumber:
        return DualNumber(self.st.q0, self.du.q0)

    def is_unit(self, tol: float = 1e-10) -> bool:
        return approx_eq(self.abs(), DualNumber(1.0, 0.0), tol)


DQZERO = DualQuaternion()
DQONE = DualQuaternion(QONE, QZERO)


def dq_mul(p: DualQuaternion, q: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(p.st * q.st, p.st * q.du + p.du * q.st)


def dq_abs_mag(p: DualQuaternion) -> tuple[DualNumber, float]:
    """Dual absolute value and real magnitude of ``p``."""
    nst = p.st.norm()
    mag = math.sqrt(nst**2 + p.du.norm() ** 2)
    if not p.st.is_zero():
        return DualNumber(nst, quat_mul(p.st.conj(), p.du).sc() / nst), mag
    return DualNumber(0.0, p.du.norm()), mag


def dq_inv(p: DualQuaternion) -> DualQuaternion:
    if p.st.is_zero():
        raise NonAppreciable("dual quaternion with zero standard part is not invertible")
    si = quat_inv(p.st)
    return DualQuaternion(si, -(si * p.du * si))


def dq_unit_project(q: DualQuaternion) -> DualQuaternion:
    """Nearest unit dual quaternion to ``q``.

    The degenerate branch (zero standard part) returns ``q_I / |q_I|`` with a
    zero dual part.
    """
    if not q.st.is_zero():
        n = q.st.norm()
        ust = q.st / n
        qi = q.du / n
        return DualQuaternion(ust, qi - ust * quat_mul(ust.conj(), qi).sc())
    if q.du.is_zero():
        raise ZeroInput("cannot project the zero dual quaternion")
    return DualQuaternion(q.du / q.du.norm(), QZERO)

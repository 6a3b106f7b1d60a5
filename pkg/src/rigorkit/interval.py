"""Directed-rounding interval arithmetic on binary64 endpoints.

Every rigorous claim in the toolkit bottoms out here: each operation
returns an interval that provably contains the exact real-arithmetic
image of its operand sets.

Outward rounding is implemented by computing endpoints in the default
round-to-nearest mode and then nudging them outward *only when the
computed endpoint is provably inexact*.  Exactness is decided with the
TwoSum trick for addition and exact integer-ratio comparisons for
multiplication, division and square root, so exactly representable
results keep exact endpoints ([1,2]+[3,4] is [4,6], not a widened box).
No hardware rounding mode is ever switched: all operations are pure
functions and freely shareable between threads.

Infinite endpoints are permitted for constraint-bound bookkeeping only
(a distance cap of +inf); arithmetic on non-finite intervals raises
NonFiniteOperand.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    DivisionByZeroInterval,
    DomainError,
    EmptyIntersection,
    NonFiniteOperand,
    ParseError,
)

__all__ = [
    "Interval",
    "SqrtResult",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "pow_int",
    "sqrt_interval",
    "atan_interval",
    "from_decimal_string",
    "parse_interval_literal",
    "format_interval_literal",
    "intersect",
    "hull",
    "next_up",
    "next_down",
]

_INF = math.inf


def next_up(x: float) -> float:
    return math.nextafter(x, _INF)


def next_down(x: float) -> float:
    return math.nextafter(x, -_INF)


# ---------------------------------------------------------------------------
# Directed-rounding scalar kernels.
#
# Each computes in round-to-nearest, decides the sign of the rounding
# error exactly, and nudges one step outward only if needed.
# ---------------------------------------------------------------------------

def _add_down(x: float, y: float) -> float:
    s = x + y
    if math.isinf(s):
        # Positive overflow: largest finite float is a valid lower bound.
        return next_down(s) if s > 0 else s
    bb = s - x
    err = (x - (s - bb)) + (y - bb)
    return next_down(s) if err < 0.0 else s


def _add_up(x: float, y: float) -> float:
    s = x + y
    if math.isinf(s):
        return next_up(s) if s < 0 else s
    bb = s - x
    err = (x - (s - bb)) + (y - bb)
    return next_up(s) if err > 0.0 else s


def _sub_down(x: float, y: float) -> float:
    return _add_down(x, -y)


def _sub_up(x: float, y: float) -> float:
    return _add_up(x, -y)


def _mul_err_sign(x: float, y: float, p: float) -> int:
    # sign of exact(x*y) - p, all arguments finite
    nx, dx = x.as_integer_ratio()
    ny, dy = y.as_integer_ratio()
    np_, dp = p.as_integer_ratio()
    lhs = nx * ny * dp
    rhs = np_ * dx * dy
    return (lhs > rhs) - (lhs < rhs)


def _mul_down(x: float, y: float) -> float:
    p = x * y
    if math.isinf(p):
        return next_down(p) if p > 0 else p
    return next_down(p) if _mul_err_sign(x, y, p) < 0 else p


def _mul_up(x: float, y: float) -> float:
    p = x * y
    if math.isinf(p):
        return next_up(p) if p < 0 else p
    return next_up(p) if _mul_err_sign(x, y, p) > 0 else p


def _div_err_sign(x: float, y: float, q: float) -> int:
    # sign of exact(x/y) - q; y != 0, all finite
    nx, dx = x.as_integer_ratio()
    ny, dy = y.as_integer_ratio()
    nq, dq = q.as_integer_ratio()
    num = nx * dy * dq - nq * dx * ny
    if ny < 0:
        num = -num
    return (num > 0) - (num < 0)


def _div_down(x: float, y: float) -> float:
    q = x / y
    if math.isinf(q):
        return next_down(q) if q > 0 else q
    return next_down(q) if _div_err_sign(x, y, q) < 0 else q


def _div_up(x: float, y: float) -> float:
    q = x / y
    if math.isinf(q):
        return next_up(q) if q < 0 else q
    return next_up(q) if _div_err_sign(x, y, q) > 0 else q


def _sqrt_err_sign(x: float, s: float) -> int:
    # sign of sqrt(x) - s for x >= 0, s >= 0: same as sign of x - s*s
    nx, dx = x.as_integer_ratio()
    ns, ds = s.as_integer_ratio()
    lhs = nx * ds * ds
    rhs = ns * ns * dx
    return (lhs > rhs) - (lhs < rhs)


def _sqrt_down(x: float) -> float:
    s = math.sqrt(x)
    return next_down(s) if _sqrt_err_sign(x, s) < 0 else s


def _sqrt_up(x: float) -> float:
    s = math.sqrt(x)
    return next_up(s) if _sqrt_err_sign(x, s) > 0 else s


# atan clamps: the result must stay inside (-pi/2, pi/2) widened outward.
_HALF_PI_UP = next_up(math.pi / 2)


def _atan_down(x: float) -> float:
    # math.atan is within 1 ulp on every libm we target; widening the
    # endpoint by two steps makes the enclosure unconditional.
    t = next_down(next_down(math.atan(x)))
    return max(t, -_HALF_PI_UP)


def _atan_up(x: float) -> float:
    t = next_up(next_up(math.atan(x)))
    return min(t, _HALF_PI_UP)


# ---------------------------------------------------------------------------
# The Interval type
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of binary64 values, lo <= hi, never NaN."""

    lo: float
    hi: float

    def __post_init__(self):
        lo = self.lo
        hi = self.hi
        if not isinstance(lo, float):
            lo = float(lo)
            object.__setattr__(self, "lo", lo)
        if not isinstance(hi, float):
            hi = float(hi)
            object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise NonFiniteOperand("interval endpoints may not be NaN")
        if lo > hi:
            raise ValueError(f"interval lower endpoint {lo!r} exceeds upper {hi!r}")

    # -- constructors --------------------------------------------------

    @classmethod
    def point(cls, v: float) -> "Interval":
        return cls(v, v)

    # -- queries -------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if self.lo == self.hi:
            return self.lo
        m = 0.5 * (self.lo + self.hi)
        if math.isinf(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        # Guard against rounding drifting outside the interval.
        return min(max(m, self.lo), self.hi)

    @property
    def mag(self) -> float:
        """max |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        """min |x| over the interval."""
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- operators (delegate to the module-level ops) -------------------

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)


def _coerce(v) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, (int, float)):
        return Interval(float(v), float(v))
    raise TypeError(f"cannot use {type(v).__name__} as an interval operand")


def _require_finite(*intervals: Interval) -> None:
    for a in intervals:
        if not a.is_finite:
            raise NonFiniteOperand(
                f"arithmetic on non-finite interval [{a.lo}, {a.hi}]; "
                "infinite endpoints are bookkeeping-only"
            )


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def add(a: Interval, b: Interval) -> Interval:
    _require_finite(a, b)
    return Interval(_add_down(a.lo, b.lo), _add_up(a.hi, b.hi))


def sub(a: Interval, b: Interval) -> Interval:
    _require_finite(a, b)
    return Interval(_sub_down(a.lo, b.hi), _sub_up(a.hi, b.lo))


def neg(a: Interval) -> Interval:
    # Exact; permitted even on semi-infinite bookkeeping intervals.
    return Interval(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    _require_finite(a, b)
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    # Sign-case analysis keeps the number of directed roundings at two
    # except in the mixed*mixed case.
    if al >= 0.0:
        if bl >= 0.0:
            return Interval(_mul_down(al, bl), _mul_up(ah, bh))
        if bh <= 0.0:
            return Interval(_mul_down(ah, bl), _mul_up(al, bh))
        return Interval(_mul_down(ah, bl), _mul_up(ah, bh))
    if ah <= 0.0:
        if bl >= 0.0:
            return Interval(_mul_down(al, bh), _mul_up(ah, bl))
        if bh <= 0.0:
            return Interval(_mul_down(ah, bh), _mul_up(al, bl))
        return Interval(_mul_down(al, bh), _mul_up(al, bl))
    if bl >= 0.0:
        return Interval(_mul_down(al, bh), _mul_up(ah, bh))
    if bh <= 0.0:
        return Interval(_mul_down(ah, bl), _mul_up(al, bl))
    return Interval(
        min(_mul_down(al, bh), _mul_down(ah, bl)),
        max(_mul_up(al, bl), _mul_up(ah, bh)),
    )


def div(a: Interval, b: Interval) -> Interval:
    _require_finite(a, b)
    if b.lo <= 0.0 <= b.hi:
        raise DivisionByZeroInterval(
            f"denominator [{b.lo}, {b.hi}] contains zero"
        )
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if bl > 0.0:
        if al >= 0.0:
            return Interval(_div_down(al, bh), _div_up(ah, bl))
        if ah <= 0.0:
            return Interval(_div_down(al, bl), _div_up(ah, bh))
        return Interval(_div_down(al, bl), _div_up(ah, bl))
    # bh < 0
    if al >= 0.0:
        return Interval(_div_down(ah, bh), _div_up(al, bl))
    if ah <= 0.0:
        return Interval(_div_down(ah, bl), _div_up(al, bh))
    return Interval(_div_down(ah, bh), _div_up(al, bh))


def _pow_nonneg_down(x: float, k: int) -> float:
    # x >= 0, k >= 1: square-and-multiply, rounding every step down.
    acc = None
    base = x
    while k:
        if k & 1:
            acc = base if acc is None else _mul_down(acc, base)
        k >>= 1
        if k:
            base = _mul_down(base, base)
    return acc


def _pow_nonneg_up(x: float, k: int) -> float:
    acc = None
    base = x
    while k:
        if k & 1:
            acc = base if acc is None else _mul_up(acc, base)
        k >>= 1
        if k:
            base = _mul_up(base, base)
    return acc


def pow_int(a: Interval, k: int) -> Interval:
    """a**k with integer exponent; handles even/odd monotonicity so the
    dependency problem of repeated multiplication is avoided."""
    if not isinstance(k, int):
        raise TypeError("exponent must be an integer")
    if k == 0:
        return Interval(1.0, 1.0)
    if k < 0:
        return div(Interval(1.0, 1.0), pow_int(a, -k))
    _require_finite(a)
    if k == 1:
        return a
    if k % 2 == 1:
        lo = -_pow_nonneg_up(-a.lo, k) if a.lo < 0 else _pow_nonneg_down(a.lo, k)
        hi = -_pow_nonneg_down(-a.hi, k) if a.hi < 0 else _pow_nonneg_up(a.hi, k)
        return Interval(lo, hi)
    lo_mag = a.mig
    hi_mag = a.mag
    return Interval(_pow_nonneg_down(lo_mag, k), _pow_nonneg_up(hi_mag, k))


class SqrtResult(NamedTuple):
    """sqrt enclosure plus a flag recording whether a slightly-negative
    lower endpoint had to be clamped to zero."""

    interval: Interval
    clamped: bool


def sqrt_interval(a: Interval) -> SqrtResult:
    _require_finite(a)
    if a.hi < 0.0:
        raise DomainError(f"sqrt of certainly-negative interval [{a.lo}, {a.hi}]")
    clamped = a.lo < 0.0
    lo = 0.0 if clamped else _sqrt_down(a.lo)
    hi = _sqrt_up(a.hi)
    return SqrtResult(Interval(lo, hi), clamped)


def atan_interval(a: Interval) -> Interval:
    """Enclosure of arctangent; monotone, so endpoint evaluation suffices."""
    _require_finite(a)
    return Interval(_atan_down(a.lo), _atan_up(a.hi))


# ---------------------------------------------------------------------------
# Set operations
# ---------------------------------------------------------------------------

def intersect(a: Interval, b: Interval) -> Interval:
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        raise EmptyIntersection(
            f"[{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] do not intersect"
        )
    return Interval(lo, hi)


def hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


# ---------------------------------------------------------------------------
# Decimal text conversion
# ---------------------------------------------------------------------------

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def from_decimal_string(s: str) -> Interval:
    """Tight enclosure (width <= 1 ulp, exact when representable) of the
    exact value of a signed decimal numeral.

    The conversion goes through exact rational arithmetic, so it never
    depends on the platform's decimal-to-binary rounding behaviour.
    """
    text = s.strip()
    if not _DECIMAL_RE.match(text):
        raise ParseError(f"invalid decimal numeral {s!r}")
    exact = Fraction(text)
    try:
        f = exact.numerator / exact.denominator
    except OverflowError:
        raise ParseError(f"decimal numeral {s!r} overflows binary64") from None
    approx = Fraction(f)
    if approx == exact:
        return Interval(f, f)
    if approx < exact:
        return Interval(f, next_up(f))
    return Interval(next_down(f), f)


def decimal_to_nearest_float(s: str) -> float:
    """Correctly-rounded binary64 value of a decimal numeral, computed via
    exact rational arithmetic (platform-mode independent)."""
    enclosure = from_decimal_string(s)
    if enclosure.is_point:
        return enclosure.lo
    exact = Fraction(s.strip())
    lo, hi = enclosure.lo, enclosure.hi
    return lo if exact - Fraction(lo) <= Fraction(hi) - exact else hi


def parse_interval_literal(s: str) -> Interval:
    """Parse the toolkit's textual interval form.

    "lo..hi" is an explicit interval; a bare numeral is a tight enclosure
    of that decimal; "inf"/"-inf" endpoints are allowed for bookkeeping.
    """
    text = s.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo = _parse_endpoint(lo_text, upper=False)
        hi = _parse_endpoint(hi_text, upper=True)
        if lo > hi:
            raise ParseError(f"interval literal {s!r} has lo > hi")
        return Interval(lo, hi)
    if text in ("inf", "+inf"):
        return Interval(_INF, _INF)
    if text == "-inf":
        return Interval(-_INF, -_INF)
    return from_decimal_string(text)


def _parse_endpoint(text: str, upper: bool) -> float:
    t = text.strip()
    if t in ("inf", "+inf"):
        return _INF
    if t == "-inf":
        return -_INF
    enclosure = from_decimal_string(t)
    # Outward choice keeps the literal's exact decimal value inside.
    return enclosure.hi if upper else enclosure.lo


def format_interval_literal(a: Interval) -> str:
    """Literal whose outward re-parse reproduces the interval exactly:
    endpoints are written as value-exact decimals (repr when its decimal
    value already equals the float, else the finite exact expansion)."""

    def fmt(x: float) -> str:
        if x == _INF:
            return "inf"
        if x == -_INF:
            return "-inf"
        r = repr(x)
        if Fraction(r) == Fraction(x):
            return r
        from decimal import Decimal
        return format(Decimal(x), "f")

    if a.lo == a.hi and a.is_finite:
        return fmt(a.lo)
    return f"{fmt(a.lo)}..{fmt(a.hi)}"

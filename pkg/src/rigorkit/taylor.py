"""Rigorous upper bounds over boxes via degree-1 Taylor expansion with an
interval second-derivative remainder, plus derivative sign determination.

The bound for a box with center c and half-widths w is

    upper = sup f(c) + sum_i sup|df_i(c)| * w_i
          + 1/2 * sum_ij sup|H_ij(box)| * w_i * w_j

computed entirely in outward-rounded interval arithmetic.  The accuracy
improves quadratically as the box shrinks, which is what drives the
adaptive subdivision in the prover.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import interval as iv
from .errors import (
    BoundUnavailable,
    DivisionByZeroInterval,
    DomainError,
    EmptyIntersection,
    NonFiniteOperand,
)
from .expr import Evaluator
from .interval import Interval

__all__ = ["Box", "TaylorBound", "PartialSign", "taylor_upper_bound",
           "partial_sign", "partial_signs"]

_EVAL_ERRORS = (DivisionByZeroInterval, DomainError, NonFiniteOperand,
                EmptyIntersection, OverflowError)


@dataclass(frozen=True, slots=True)
class Box:
    """Axis-aligned box: a tuple of finite intervals, one per variable."""

    dims: tuple[Interval, ...]

    def __post_init__(self):
        dims = tuple(self.dims)
        object.__setattr__(self, "dims", dims)
        for d in dims:
            if not d.is_finite:
                raise NonFiniteOperand("box components must be finite")

    @classmethod
    def from_bounds(cls, bounds: Sequence[tuple[float, float]]) -> "Box":
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @property
    def n(self) -> int:
        return len(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, i: int) -> Interval:
        return self.dims[i]

    def widths(self) -> tuple[float, ...]:
        return tuple(d.width for d in self.dims)

    def midpoint(self) -> tuple[float, ...]:
        return tuple(d.mid for d in self.dims)

    def center_box(self) -> "Box":
        return Box(tuple(Interval.point(d.mid) for d in self.dims))

    def volume(self) -> float:
        v = 1.0
        for d in self.dims:
            v *= d.width
        return v

    def replace(self, i: int, component: Interval) -> "Box":
        dims = list(self.dims)
        dims[i] = component
        return Box(tuple(dims))

    def split(self, i: int) -> tuple["Box", "Box"]:
        d = self.dims[i]
        m = d.mid
        return self.replace(i, Interval(d.lo, m)), self.replace(i, Interval(m, d.hi))

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(d.contains(x) for d, x in zip(self.dims, point))


class PartialSign(enum.Enum):
    STRICTLY_POSITIVE = "strictly_positive"
    STRICTLY_NEGATIVE = "strictly_negative"
    UNKNOWN = "unknown"


@dataclass(frozen=True, slots=True)
class TaylorBound:
    """Certified upper bound of a function over a box.  Only `upper` is
    contractual; the other fields are the audit trail."""

    upper: float
    center_value: Interval
    gradient_at_center: tuple[Interval, ...]
    hessian_norm_bound: float


def _half_widths(box: Box, center: tuple[float, ...]) -> tuple[float, ...]:
    # Upward-rounded radius around the (possibly off-center) midpoint, so
    # |x_i - c_i| <= w_i holds for every x in the box.
    out = []
    for d, c in zip(box.dims, center):
        left = iv.sub(Interval.point(c), Interval.point(d.lo)).hi
        right = iv.sub(Interval.point(d.hi), Interval.point(c)).hi
        out.append(max(left, right, 0.0))
    return tuple(out)


def taylor_upper_bound(ev: Evaluator, box: Box) -> TaylorBound:
    """Upper bound of the compiled function over the box.

    Raises BoundUnavailable if interval evaluation fails anywhere in the
    chain (callers treat that as bound = +inf).
    """
    if ev.arity != box.n:
        raise ValueError(f"evaluator arity {ev.arity} != box dimension {box.n}")
    try:
        center = box.midpoint()
        w = _half_widths(box, center)
        center_box = tuple(Interval.point(c) for c in center)
        germ = ev.germ(center_box)
        total = germ.f
        for i in range(box.n):
            if w[i] != 0.0:
                total = iv.add(total, iv.mul(
                    Interval.point(germ.df[i].mag), Interval.point(w[i])))
        half = Interval(0.5, 0.5)
        hess_norm = 0.0
        for i in range(box.n):
            if w[i] == 0.0:
                continue
            for j in range(i, box.n):
                if w[j] == 0.0:
                    continue
                h = ev.hessian_entry(box.dims, i, j)
                hess_norm = max(hess_norm, h.mag)
                term = iv.mul(Interval.point(h.mag),
                              iv.mul(Interval.point(w[i]), Interval.point(w[j])))
                if i != j:
                    total = iv.add(total, term)
                else:
                    total = iv.add(total, iv.mul(half, term))
        return TaylorBound(
            upper=total.hi,
            center_value=germ.f,
            gradient_at_center=germ.df,
            hessian_norm_bound=hess_norm,
        )
    except _EVAL_ERRORS as exc:
        raise BoundUnavailable(str(exc)) from exc


def partial_signs(ev: Evaluator, box: Box) -> list[PartialSign]:
    """Certified signs of all first partials over the box, from a single
    forward-mode germ evaluation."""
    try:
        germ = ev.germ(box.dims)
    except _EVAL_ERRORS:
        return [PartialSign.UNKNOWN] * box.n
    out = []
    for d in germ.df:
        if d.lo > 0.0:
            out.append(PartialSign.STRICTLY_POSITIVE)
        elif d.hi < 0.0:
            out.append(PartialSign.STRICTLY_NEGATIVE)
        else:
            out.append(PartialSign.UNKNOWN)
    return out


def partial_sign(ev: Evaluator, box: Box, i: int) -> PartialSign:
    """Certified sign of the i-th first partial over the box.  Never
    claims a sign the interval enclosure does not certify."""
    return partial_signs(ev, box)[i]

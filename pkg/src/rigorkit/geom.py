"""Pivot-based preprocessing and rigorous coordinate checks for point
configurations with distance constraints.

All coordinates are interval triples, so every derived quantity is an
enclosure.  The module certifies only what interval arithmetic proves
about the final extremal configuration of each reduction: a verdict of
NoSuchConfiguration means the extremal configuration rigorously violates
a constraint; everything else is Inconclusive.  Whether the pivot
reduction applies in a given parameter regime is the caller's
responsibility.

The coordinate gauge is fixed throughout: first point at the origin,
second on the positive x axis, third in the upper half of the xy plane,
fourth (when placed) with z >= 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import interval as iv
from .errors import (
    DegenerateAxis,
    DivisionByZeroInterval,
    DomainError,
    NonFiniteOperand,
    ParseError,
    PivotInfeasible,
)
from .interval import Interval

__all__ = [
    "Vec3",
    "DistanceSpec",
    "EdgeMark",
    "Model",
    "PointConfig",
    "Verdict",
    "CheckResult",
    "LinkStatus",
    "linked_line_model",
    "pivot",
    "rigid_realization",
    "cayley_menger_det",
    "line_links_triangle",
    "check_simplex_interior_point",
    "check_face_escape",
    "check_segment_through_triangle",
    "check_linked_line",
    "parse_distance_spec",
]

Vec3 = tuple[Interval, Interval, Interval]

_ZERO = Interval(0.0, 0.0)
_ONE = Interval(1.0, 1.0)


def _pt(x: Interval, y: Interval, z: Interval) -> Vec3:
    return (x, y, z)


def _v_add(a: Vec3, b: Vec3) -> Vec3:
    return (iv.add(a[0], b[0]), iv.add(a[1], b[1]), iv.add(a[2], b[2]))


def _v_sub(a: Vec3, b: Vec3) -> Vec3:
    return (iv.sub(a[0], b[0]), iv.sub(a[1], b[1]), iv.sub(a[2], b[2]))


def _v_scale(s: Interval, a: Vec3) -> Vec3:
    return (iv.mul(s, a[0]), iv.mul(s, a[1]), iv.mul(s, a[2]))


def _v_dot(a: Vec3, b: Vec3) -> Interval:
    return iv.add(iv.add(iv.mul(a[0], b[0]), iv.mul(a[1], b[1])), iv.mul(a[2], b[2]))


def _v_cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        iv.sub(iv.mul(a[1], b[2]), iv.mul(a[2], b[1])),
        iv.sub(iv.mul(a[2], b[0]), iv.mul(a[0], b[2])),
        iv.sub(iv.mul(a[0], b[1]), iv.mul(a[1], b[0])),
    )


def _dist2(a: Vec3, b: Vec3) -> Interval:
    d = _v_sub(a, b)
    return _v_dot(d, d)


def _dist(a: Vec3, b: Vec3) -> Interval:
    return iv.sqrt_interval(_dist2(a, b)).interval


class _Straddle(Exception):
    """A sign decision straddled zero: no verdict may be claimed."""


def _sqrt_nonneg(x: Interval, what: str) -> Interval:
    """sqrt of a quantity that must be >= 0 for the configuration to
    exist: certainly negative raises PivotInfeasible, straddling zero
    clamps (sound: real solutions, if any, are inside)."""
    if x.hi < 0.0:
        raise PivotInfeasible(f"{what} is certainly negative ({x.lo}, {x.hi})")
    return iv.sqrt_interval(x).interval


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

class EdgeMark(enum.Enum):
    CABLE = "cable"      # upper distance bound, pivot outward to the cap
    STRUT = "strut"      # lower distance bound, pivot inward to the floor
    UNMARKED = "unmarked"


@dataclass(frozen=True, slots=True)
class Model:
    """Edge marks guiding pivot directions; marks only on pairs present
    in the accompanying distance spec."""

    marks: dict

    def mark(self, i: int, j: int) -> EdgeMark:
        return self.marks.get((min(i, j), max(i, j)), EdgeMark.UNMARKED)


@dataclass(frozen=True, slots=True)
class DistanceSpec:
    """Pairwise lower/upper distance thresholds; +inf upper caps allowed."""

    labels: tuple[str, ...]
    dmin: dict
    dmax: dict

    def lower(self, i: int, j: int) -> Interval:
        return self.dmin.get((min(i, j), max(i, j)), _ZERO)

    def upper(self, i: int, j: int) -> Interval:
        return self.dmax.get((min(i, j), max(i, j)), Interval(math.inf, math.inf))

    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, slots=True)
class PointConfig:
    points: tuple[Vec3, ...]

    def distance(self, i: int, j: int) -> Interval:
        return _dist(self.points[i], self.points[j])

    def replace(self, i: int, p: Vec3) -> "PointConfig":
        pts = list(self.points)
        pts[i] = p
        return PointConfig(tuple(pts))


class Verdict(enum.Enum):
    NO_SUCH_CONFIGURATION = "no_such_configuration"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, slots=True)
class CheckResult:
    verdict: Verdict
    reason: str = ""
    witness: Optional[Interval] = None

    @property
    def refuted(self) -> bool:
        return self.verdict is Verdict.NO_SUCH_CONFIGURATION


class LinkStatus(enum.Enum):
    LINKED = "linked"
    NOT_LINKED = "not_linked"
    UNKNOWN = "unknown"


def linked_line_model() -> Model:
    """The pivot model used by check_linked_line on points (0, p1, p2,
    p3, q): cables (pivot outward to the cap) on every frame pair and on
    (0, q); a strut (pivot inward to the floor) on (q, p1)."""
    marks = {}
    for pair in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)]:
        marks[pair] = EdgeMark.CABLE
    marks[(1, 4)] = EdgeMark.STRUT
    return Model(marks)


# ---------------------------------------------------------------------------
# Coordinate realization
# ---------------------------------------------------------------------------

def _sq(d: Interval) -> Interval:
    return iv.pow_int(d, 2)


def _place_third(d01: Interval, d02: Interval, d12: Interval) -> tuple[Vec3, Vec3, Vec3]:
    """p0 at origin, p1 on +x at distance d01, p2 in the upper xy plane."""
    p0 = _pt(_ZERO, _ZERO, _ZERO)
    p1 = _pt(d01, _ZERO, _ZERO)
    x2 = iv.div(iv.sub(iv.add(_sq(d01), _sq(d02)), _sq(d12)),
                iv.mul(Interval(2.0, 2.0), d01))
    y2sq = iv.sub(_sq(d02), _sq(x2))
    y2 = _sqrt_nonneg(y2sq, "triangle height squared")
    p2 = _pt(x2, y2, _ZERO)
    return p0, p1, p2


def _place_apex(p0: Vec3, p1: Vec3, p2: Vec3, d01: Interval,
                r0: Interval, r1: Interval, r2: Interval) -> Vec3:
    """Point at distances r0, r1, r2 from p0, p1, p2, on the z >= 0 side.
    Assumes the base triangle is in the gauge position."""
    x2, y2 = p2[0], p2[1]
    x = iv.div(iv.sub(iv.add(_sq(d01), _sq(r0)), _sq(r1)),
               iv.mul(Interval(2.0, 2.0), d01))
    num = iv.sub(iv.sub(iv.add(iv.add(_sq(x2), _sq(y2)), _sq(r0)), _sq(r2)),
                 iv.mul(iv.mul(Interval(2.0, 2.0), x2), x))
    y = iv.div(num, iv.mul(Interval(2.0, 2.0), y2))
    z_sq = iv.sub(iv.sub(_sq(r0), _sq(x)), _sq(y))
    z = _sqrt_nonneg(z_sq, "apex height squared")
    return _pt(x, y, z)


def rigid_realization(d: Sequence[Sequence[Interval]]) -> PointConfig:
    """Coordinates for up to 4 points with prescribed pairwise distance
    enclosures, in the fixed gauge.  Raises PivotInfeasible when a height
    is certainly negative (unrealizable)."""
    m = len(d)
    if m < 2 or m > 4:
        raise ValueError("rigid_realization supports 2..4 points")
    if m == 2:
        return PointConfig((_pt(_ZERO, _ZERO, _ZERO), _pt(d[0][1], _ZERO, _ZERO)))
    p0, p1, p2 = _place_third(d[0][1], d[0][2], d[1][2])
    if m == 3:
        return PointConfig((p0, p1, p2))
    p3 = _place_apex(p0, p1, p2, d[0][1], d[0][3], d[1][3], d[2][3])
    return PointConfig((p0, p1, p2, p3))


def cayley_menger_det(d: Sequence[Sequence[Interval]]) -> Interval:
    """Bordered Cayley-Menger determinant of an m-point distance matrix;
    for 4 points it equals 288 V^2, so a certainly negative enclosure
    certifies non-realizability in R^3."""
    m = len(d)
    size = m + 1
    rows: list[list[Interval]] = [[_ZERO] * size for _ in range(size)]
    for j in range(1, size):
        rows[0][j] = _ONE
        rows[j][0] = _ONE
    for i in range(m):
        for j in range(m):
            if i != j:
                rows[i + 1][j + 1] = _sq(d[min(i, j)][max(i, j)])
    return _det(rows)


def _det(rows: list[list[Interval]]) -> Interval:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = _ZERO
    for j in range(n):
        minor = [[rows[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = iv.mul(rows[0][j], _det(minor))
        total = iv.add(total, term) if j % 2 == 0 else iv.sub(total, term)
    return total


# ---------------------------------------------------------------------------
# Pivot
# ---------------------------------------------------------------------------

def pivot(config: PointConfig, axis: tuple[int, int], moving: int,
          target: tuple[int, Interval], side: int = 1) -> PointConfig:
    """Reposition the moving point on its pivot circle (the circle in the
    perpendicular bisecting plane of the axis points, at constant
    distances to both) so that its distance to the target point equals
    the target enclosure.

    `side` selects which of the two intersection points to take (+1 / -1
    with respect to the oriented axis-target frame)."""
    i1, i2 = axis
    p1, p2 = config.points[i1], config.points[i2]
    q = config.points[moving]
    i3, t_dist = target
    p3 = config.points[i3]

    u = _v_sub(p2, p1)
    l2 = _v_dot(u, u)
    if l2.lo <= 0.0:
        raise DegenerateAxis("axis points may coincide")
    r1_sq = _dist2(q, p1)
    r2_sq = _dist2(q, p2)
    alpha = iv.div(iv.add(iv.sub(r1_sq, r2_sq), l2), iv.mul(Interval(2.0, 2.0), l2))
    h_sq = iv.sub(r1_sq, iv.mul(_sq_i(alpha), l2))
    if not (h_sq.lo > 0.0):
        raise DegenerateAxis(
            f"moving point not certainly off the axis (h^2 in [{h_sq.lo}, {h_sq.hi}])")
    h = iv.sqrt_interval(h_sq).interval

    v = _v_sub(p3, p1)
    beta = iv.div(_v_dot(v, u), l2)
    w = _v_sub(v, _v_scale(beta, u))
    w2 = _v_dot(w, w)
    if not (w2.lo > 0.0):
        raise DegenerateAxis("target point not certainly off the axis")

    diff = iv.sub(alpha, beta)
    s_num = iv.sub(iv.add(iv.add(iv.mul(_sq_i(diff), l2), h_sq), w2), _sq(t_dist))
    s_val = iv.div(s_num, iv.mul(Interval(2.0, 2.0), h))

    gamma_sq = iv.sub(_ONE, iv.div(_sq_i(s_val), w2))
    if gamma_sq.hi < 0.0:
        raise PivotInfeasible("target distance unreachable on the pivot circle")
    gamma = iv.sqrt_interval(gamma_sq).interval

    cvec = _v_cross(u, w)
    c2 = _v_dot(cvec, cvec)
    if not (c2.lo > 0.0):
        raise DegenerateAxis("axis and target direction certainly collinear")
    coef = iv.div(iv.mul(h, gamma), iv.sqrt_interval(c2).interval)
    if side < 0:
        coef = iv.neg(coef)

    q_new = _v_add(
        _v_add(p1, _v_scale(alpha, u)),
        _v_add(_v_scale(iv.div(iv.mul(h, s_val), w2), w), _v_scale(coef, cvec)),
    )
    return config.replace(moving, q_new)


def _sq_i(x: Interval) -> Interval:
    return iv.pow_int(x, 2)


# ---------------------------------------------------------------------------
# Linking
# ---------------------------------------------------------------------------

def line_links_triangle(q: Vec3, p1: Vec3, p2: Vec3, p3: Vec3) -> LinkStatus:
    """Does the line through the origin and q pass through the interior
    of triangle (p1, p2, p3)?  Certified by the signs of the three triple
    products det[p_i, p_{i+1}, q]: all strictly positive or all strictly
    negative means linked; certainly mixed strict signs means not linked;
    anything straddling zero is Unknown."""
    dets = [
        _v_dot(_v_cross(p1, p2), q),
        _v_dot(_v_cross(p2, p3), q),
        _v_dot(_v_cross(p3, p1), q),
    ]
    if all(d.lo > 0.0 for d in dets) or all(d.hi < 0.0 for d in dets):
        return LinkStatus.LINKED
    pos = any(d.lo > 0.0 for d in dets)
    neg = any(d.hi < 0.0 for d in dets)
    if pos and neg:
        return LinkStatus.NOT_LINKED
    return LinkStatus.UNKNOWN


# ---------------------------------------------------------------------------
# Problem 1: no interior point far from all simplex vertices
# ---------------------------------------------------------------------------

def check_simplex_interior_point(edge_bounds: Sequence[Interval],
                                 r: Interval) -> CheckResult:
    """Edges of the simplex are capped by edge_bounds (order: d01, d02,
    d03, d12, d13, d23); is there an interior point at distance >= r from
    every vertex?

    Pivot preprocessing binds all edges at their caps and moves the
    candidate point to distance exactly r from three vertices (on the
    interior side); the verdict then hinges on the rigorously computed
    distance to the fourth vertex."""
    if len(edge_bounds) != 6:
        raise ValueError("need 6 edge bounds: d01 d02 d03 d12 d13 d23")
    if not (r.lo > 0.0):
        return CheckResult(Verdict.INCONCLUSIVE, reason="r must be positive")
    d01, d02, d03, d12, d13, d23 = edge_bounds
    cm = cayley_menger_det([[None, d01, d02, d03],
                            [d01, None, d12, d13],
                            [d02, d12, None, d23],
                            [d03, d13, d23, None]])
    # use entries symmetrically: cayley_menger_det reads d[min][max]
    if cm.hi < 0.0:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="unrealizable simplex (Cayley-Menger negative)",
                           witness=cm)
    if cm.lo < 0.0:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason="realizability undecided (Cayley-Menger straddles zero)")
    try:
        p0, p1, p2 = _place_third(d01, d02, d12)
        p3 = _place_apex(p0, p1, p2, d01, d03, d13, d23)
        q = _place_apex(p0, p1, p2, d01, r, r, r)
    except PivotInfeasible as exc:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason=f"extremal configuration not constructible: {exc}")
    except (DivisionByZeroInterval, DomainError, NonFiniteOperand) as exc:
        return CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
    fourth = _dist(q, p3)
    if fourth.hi < r.lo:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="distance from the pivoted interior point to the "
                                  "fourth vertex is rigorously below r",
                           witness=fourth)
    return CheckResult(Verdict.INCONCLUSIVE, witness=fourth)


# ---------------------------------------------------------------------------
# Problem 1, 2D sub-verification: no escape through a face
# ---------------------------------------------------------------------------

def check_face_escape(edge_bounds: Sequence[Interval], r: Interval) -> CheckResult:
    """Planar analog: triangle edges capped (order d01, d02, d12), point
    in the triangle's plane at distance exactly r from two vertices on
    the interior side; verdict from the rigorous distance to the third."""
    if len(edge_bounds) != 3:
        raise ValueError("need 3 edge bounds: d01 d02 d12")
    if not (r.lo > 0.0):
        return CheckResult(Verdict.INCONCLUSIVE, reason="r must be positive")
    d01, d02, d12 = edge_bounds
    try:
        p0, p1, p2 = _place_third(d01, d02, d12)
        x = iv.div(_sq(d01), iv.mul(Interval(2.0, 2.0), d01))  # = d01/2 for equal radii
        y_sq = iv.sub(_sq(r), _sq_i(x))
        y = _sqrt_nonneg(y_sq, "planar point height squared")
    except PivotInfeasible as exc:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason=f"extremal configuration not constructible: {exc}")
    except (DivisionByZeroInterval, DomainError, NonFiniteOperand) as exc:
        return CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
    q = _pt(x, y, _ZERO)
    third = _dist(q, p2)
    if third.hi < r.lo:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="planar point at distance r from two vertices is "
                                  "rigorously closer than r to the third",
                           witness=third)
    return CheckResult(Verdict.INCONCLUSIVE, witness=third)


# ---------------------------------------------------------------------------
# Problem 2: segment through a triangle, endpoints far from vertices
# ---------------------------------------------------------------------------

def check_segment_through_triangle(r1: Interval, r2: Interval,
                                   r3: Interval) -> CheckResult:
    """Triangle of circumradius at most r1, segment of length at most r2
    through its interior, both endpoints at distance >= r3 from every
    vertex.

    The pivot-extremal model puts both endpoints on the circumaxis at
    distance exactly r3 from all vertices of a circumradius-r1 triangle,
    giving the minimal achievable length 2 sqrt(r3^2 - r1^2) for that
    family (any triangle shape: on the axis all vertex distances
    coincide, and shrinking the circumradius only raises the required
    height).  The verdict compares that enclosure with r2; as everywhere
    in this module, transferring the extremal refutation to the full
    problem is the pivot argument's job and should be confirmed per
    instance (the shipped instance is brute-force checked in the tests)."""
    for name, val in (("r1", r1), ("r3", r3)):
        if not (val.lo > 0.0):
            return CheckResult(Verdict.INCONCLUSIVE, reason=f"{name} must be positive")
    h_sq = iv.sub(_sq(r3), _sq(r1))
    if h_sq.hi <= 0.0:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason="endpoints may reach the triangle plane (r3 <= r1)")
    if h_sq.lo < 0.0:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason="axis height straddles zero")
    h = iv.sqrt_interval(h_sq).interval
    min_len = iv.mul(Interval(2.0, 2.0), h)
    if min_len.lo > r2.hi:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="minimal achievable segment length rigorously "
                                  "exceeds r2",
                           witness=min_len)
    return CheckResult(Verdict.INCONCLUSIVE, witness=min_len)


# ---------------------------------------------------------------------------
# Problem 3: five points with a linking condition
# ---------------------------------------------------------------------------

def check_linked_line(spec: DistanceSpec, sweep_cells: int = 256) -> CheckResult:
    """Five points 0, p1, p2, p3, q with pairwise distance bounds; the
    line (0, q) must link the triangle (p1, p2, p3).

    Stage 1 refutes by pure distance accounting (triangle inequality on
    the caps).  Stage 2 binds the cable/strut model (0-p_i and p_i-p_j at
    their caps, |0 q| at its cap, |q p1| at its floor), which pins the
    configuration down to one circle for q, and sweeps that circle by
    interval subdivision: NoSuchConfiguration only if every cell
    rigorously violates a distance bound or the linking sign test."""
    if spec.n() != 5:
        raise ValueError("spec must cover exactly 5 points: 0 p1 p2 p3 q")

    # Stage 1: pair and triangle-inequality accounting on the caps.
    for i in range(5):
        for j in range(i + 1, 5):
            lo = spec.lower(i, j)
            hi = spec.upper(i, j)
            if lo.lo > hi.hi:
                return CheckResult(
                    Verdict.NO_SUCH_CONFIGURATION,
                    reason=f"dmin({i},{j}) exceeds dmax({i},{j})")
    for i in range(5):
        for j in range(5):
            for k in range(5):
                if len({i, j, k}) < 3:
                    continue
                need = spec.lower(i, k)
                via = iv_add_caps(spec.upper(i, j), spec.upper(j, k))
                if via is not None and need.lo > via:
                    return CheckResult(
                        Verdict.NO_SUCH_CONFIGURATION,
                        reason=f"triangle inequality: dmin({i},{k}) > "
                               f"dmax({i},{j}) + dmax({j},{k})")

    # Stage 2 binds the marked edges of the model: cables need finite
    # caps, the strut needs a positive floor.
    model = linked_line_model()
    frame_pairs = [p for p, m in sorted(model.marks.items())
                   if m is EdgeMark.CABLE]
    caps = {}
    for (i, j) in frame_pairs:
        cap = spec.upper(i, j)
        if not cap.is_finite:
            return CheckResult(Verdict.INCONCLUSIVE,
                               reason=f"no finite cap on ({i},{j}); cannot bind model")
        caps[(i, j)] = cap
    q_floor = spec.lower(1, 4)
    if not (q_floor.lo > 0.0):
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason="dmin(p1,q) must be positive to bind the strut")

    try:
        frame = rigid_realization([
            [None, caps[(0, 1)], caps[(0, 2)], caps[(0, 3)]],
            [None, None, caps[(1, 2)], caps[(1, 3)]],
            [None, None, None, caps[(2, 3)]],
            [None, None, None, None],
        ])
    except PivotInfeasible:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="bound frame is unrealizable")
    except (DivisionByZeroInterval, DomainError, NonFiniteOperand) as exc:
        return CheckResult(Verdict.INCONCLUSIVE, reason=str(exc))
    origin, p1, p2, p3 = frame.points

    # q lives on the circle |q| = cap(0,q), |q - p1| = floor(q,p1):
    # q = alpha u + h (c w_hat + s c_hat),  c^2 + s^2 = 1.
    big_r = caps[(0, 4)]
    u = _v_sub(p1, origin)
    l2 = _v_dot(u, u)
    alpha = iv.div(iv.sub(iv.add(_sq(big_r), l2), _sq(q_floor)),
                   iv.mul(Interval(2.0, 2.0), l2))
    h_sq = iv.sub(_sq(big_r), iv.mul(_sq_i(alpha), l2))
    if h_sq.hi < 0.0:
        return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                           reason="bound circle for q is empty")
    if h_sq.lo <= 0.0:
        return CheckResult(Verdict.INCONCLUSIVE,
                           reason="bound circle for q degenerates")
    h = iv.sqrt_interval(h_sq).interval

    # orthonormal-ish frame perpendicular to u (built from p2's offset)
    v = _v_sub(p2, origin)
    beta = iv.div(_v_dot(v, u), l2)
    w = _v_sub(v, _v_scale(beta, u))
    w2 = _v_dot(w, w)
    if not (w2.lo > 0.0):
        return CheckResult(Verdict.INCONCLUSIVE, reason="degenerate sweep frame")
    w_unit = _v_scale(iv.div(_ONE, iv.sqrt_interval(w2).interval), w)
    cvec = _v_cross(u, w)
    c2 = _v_dot(cvec, cvec)
    c_unit = _v_scale(iv.div(_ONE, iv.sqrt_interval(c2).interval), cvec)
    base = _v_scale(alpha, u)

    pairs_to_check = [(2, p2), (3, p3)]

    def cell_refuted(c_iv: Interval, s_sign: int) -> bool:
        s_sq = iv.sub(_ONE, _sq_i(c_iv))
        s_sq = Interval(max(s_sq.lo, 0.0), max(s_sq.hi, 0.0))
        s_iv = iv.sqrt_interval(s_sq).interval
        if s_sign < 0:
            s_iv = iv.neg(s_iv)
        q = _v_add(base, _v_add(_v_scale(iv.mul(h, c_iv), w_unit),
                                _v_scale(iv.mul(h, s_iv), c_unit)))
        for idx, pt in pairs_to_check:
            d = _dist(q, pt)
            lo_req = spec.lower(idx, 4)
            hi_req = spec.upper(idx, 4)
            if d.hi < lo_req.lo:
                return True
            if hi_req.is_finite and d.lo > hi_req.hi:
                return True
        status = line_links_triangle(q, p1, p2, p3)
        return status is LinkStatus.NOT_LINKED

    for s_sign in (1, -1):
        grid = [Interval(-1.0 + 2.0 * t / sweep_cells,
                         -1.0 + 2.0 * (t + 1) / sweep_cells)
                for t in range(sweep_cells)]
        for cell in grid:
            if not cell_refuted(cell, s_sign):
                return CheckResult(Verdict.INCONCLUSIVE,
                                   reason="a sweep cell could not be refuted")
    return CheckResult(Verdict.NO_SUCH_CONFIGURATION,
                       reason="every cell of the cable/strut-bound sweep violates "
                              "a distance bound or the linking test (verdict is "
                              "relative to the pivot binding; see linked_line_model)")


def iv_add_caps(a: Interval, b: Interval) -> Optional[float]:
    """Upper end of a cap sum, or None when either cap is infinite."""
    if not (a.is_finite and b.is_finite):
        return None
    return iv.add(a, b).hi


# ---------------------------------------------------------------------------
# Distance-spec files
# ---------------------------------------------------------------------------

def parse_distance_spec(text: str) -> DistanceSpec:
    """Labeled dmin/dmax tables:

        points 0 p1 p2 p3 q
        dmin p1 q 2.0
        dmax 0 q 2.51        # 'inf' allowed
    """
    labels: Optional[tuple[str, ...]] = None
    dmin: dict = {}
    dmax: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0].lower()
        if kw == "points":
            labels = tuple(parts[1:])
            continue
        if kw not in ("dmin", "dmax"):
            raise ParseError(f"line {lineno}: unknown keyword {kw!r}", position=lineno)
        if labels is None:
            raise ParseError(f"line {lineno}: 'points' must come first", position=lineno)
        try:
            i = labels.index(parts[1])
            j = labels.index(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: unknown point label", position=lineno) from None
        val = iv.parse_interval_literal(parts[3])
        key = (min(i, j), max(i, j))
        (dmin if kw == "dmin" else dmax)[key] = val
    if labels is None:
        raise ParseError("missing 'points' declaration")
    return DistanceSpec(labels, dmin, dmax)

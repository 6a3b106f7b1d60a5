"""Rigorous certification of linear-program upper bounds.

The primal form is

    max c.x   subject to   Aeq x = beq,  Aineq x <= bineq,  x free,

where every variable additionally has finite lower/upper bounds whose
rows are part of Aineq (this keeps both the primal and the dual feasible
and bounded for the problems we care about).

`certify_upper_bound` turns *any* approximate dual vector (y free,
z >= 0) into a rigorous bound: the residual row vector

    delta = c - y Aeq - z Aineq

is computed in interval arithmetic, |delta . x| is bounded over the
variable box by D, and

    c.x <= D + y.beq + z.bineq

holds for every feasible x no matter how bad the dual approximation was.
A bad dual just yields a loose bound.

`solve_approx` is a stand-in for an industrial solver: a dense
floating-point solve with no rigor claim, used only to produce candidate
duals for certification.  External duals can be supplied through the
dual-file interface instead.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from . import interval as iv
from .errors import AugmentationError, NoProgress, ParseError
from .interval import Interval

__all__ = [
    "LpProblem",
    "DualSolution",
    "BoundCertificate",
    "make_problem",
    "clamp_dual",
    "certify_upper_bound",
    "augment_with_t",
    "solve_approx",
    "problem_to_text",
    "problem_from_text",
    "dual_to_text",
    "dual_from_text",
]

Matrix = tuple[tuple[float, ...], ...]
Vector = tuple[float, ...]


@dataclass(frozen=True, slots=True)
class LpProblem:
    """Immutable LP data.  `aineq` includes the 2n variable-bound rows;
    `n_core_ineq` is the number of rows that precede them (used only by
    the serializer so files do not duplicate bound rows)."""

    aeq: Matrix
    beq: Vector
    aineq: Matrix
    bineq: Vector
    c: Vector
    var_bounds: tuple[Interval, ...]
    n_core_ineq: int

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m_eq(self) -> int:
        return len(self.beq)

    @property
    def m_ineq(self) -> int:
        return len(self.bineq)


def make_problem(c: Sequence[float],
                 var_bounds: Sequence[Interval],
                 aineq: Sequence[Sequence[float]] = (),
                 bineq: Sequence[float] = (),
                 aeq: Sequence[Sequence[float]] = (),
                 beq: Sequence[float] = ()) -> LpProblem:
    """Build an LpProblem, appending the variable-bound rows
    x_i <= ub_i and -x_i <= -lb_i to the inequality block."""
    n = len(c)
    bounds = tuple(var_bounds)
    if len(bounds) != n:
        raise ValueError("var_bounds length must match objective length")
    for b in bounds:
        if not b.is_finite:
            raise ValueError("every variable must have finite bounds")
    rows = [tuple(float(v) for v in row) for row in aineq]
    rhs = [float(v) for v in bineq]
    if len(rows) != len(rhs):
        raise ValueError("aineq/bineq length mismatch")
    erows = [tuple(float(v) for v in row) for row in aeq]
    erhs = [float(v) for v in beq]
    if len(erows) != len(erhs):
        raise ValueError("aeq/beq length mismatch")
    for row in rows + erows:
        if len(row) != n:
            raise ValueError("constraint row length must match objective length")
    n_core = len(rows)
    for i, b in enumerate(bounds):
        upper = [0.0] * n
        upper[i] = 1.0
        rows.append(tuple(upper))
        rhs.append(b.hi)
        lower = [0.0] * n
        lower[i] = -1.0
        rows.append(tuple(lower))
        rhs.append(-b.lo)
    return LpProblem(
        aeq=tuple(erows), beq=tuple(erhs),
        aineq=tuple(rows), bineq=tuple(rhs),
        c=tuple(float(v) for v in c),
        var_bounds=bounds,
        n_core_ineq=n_core,
    )


@dataclass(frozen=True, slots=True)
class DualSolution:
    y: Vector
    z: Vector
    clamped: bool = False


def clamp_dual(y: Sequence[float], z: Sequence[float]) -> DualSolution:
    """Zero out negative inequality multipliers; y stays free."""
    clamped = False
    cleaned = []
    for v in z:
        v = float(v)
        if v < 0.0:
            cleaned.append(0.0)
            clamped = True
        else:
            cleaned.append(v)
    return DualSolution(tuple(float(v) for v in y), tuple(cleaned), clamped)


@dataclass(frozen=True, slots=True)
class BoundCertificate:
    bound: float
    delta_bound: float
    residual: tuple[Interval, ...]
    inputs_digest: str


def certify_upper_bound(p: LpProblem, d: DualSolution) -> BoundCertificate:
    """Rigorous upper bound on max c.x from an approximate dual.

    Sound for any y and any z >= 0: the residual bound D absorbs every
    approximation error.
    """
    if len(d.y) != p.m_eq or len(d.z) != p.m_ineq:
        raise ValueError(
            f"dual dimensions ({len(d.y)}, {len(d.z)}) do not match problem "
            f"({p.m_eq}, {p.m_ineq})"
        )
    for v in d.z:
        if v < 0.0:
            raise ValueError("z must be componentwise nonnegative; clamp_dual first")

    n = p.n
    # delta = c - y Aeq - z Aineq, in interval arithmetic
    delta = [Interval.point(p.c[j]) for j in range(n)]
    for i, yi in enumerate(d.y):
        if yi == 0.0:
            continue
        yi_iv = Interval.point(yi)
        row = p.aeq[i]
        for j in range(n):
            if row[j] != 0.0:
                delta[j] = iv.sub(delta[j], iv.mul(yi_iv, Interval.point(row[j])))
    for i, zi in enumerate(d.z):
        if zi == 0.0:
            continue
        zi_iv = Interval.point(zi)
        row = p.aineq[i]
        for j in range(n):
            if row[j] != 0.0:
                delta[j] = iv.sub(delta[j], iv.mul(zi_iv, Interval.point(row[j])))

    # D = sum_j sup(|delta_j| * max(|lo_j|, |hi_j|))
    d_total = Interval.point(0.0)
    for j in range(n):
        mag_bound = p.var_bounds[j].mag
        term = iv.mul(Interval.point(delta[j].mag), Interval.point(mag_bound))
        d_total = iv.add(d_total, term)

    bound_total = d_total
    for i, yi in enumerate(d.y):
        bound_total = iv.add(bound_total, iv.mul(Interval.point(yi), Interval.point(p.beq[i])))
    for i, zi in enumerate(d.z):
        bound_total = iv.add(bound_total, iv.mul(Interval.point(zi), Interval.point(p.bineq[i])))

    digest = hashlib.sha256(
        (problem_to_text(p) + "\n" + dual_to_text(d.y, d.z)).encode()
    ).hexdigest()
    return BoundCertificate(
        bound=bound_total.hi,
        delta_bound=d_total.hi,
        residual=tuple(delta),
        inputs_digest=digest,
    )


def augment_with_t(p: LpProblem, k: float) -> LpProblem:
    """K-t augmentation: add a variable t with objective weight K, column
    bineq on the inequality block (and beq on the equality block), and
    bounds 0 <= t <= 1.  The result is feasible at (x=0, t=1) provided 0
    lies within every variable's bounds, which is validated here.

    If the original optimum M exceeds K, the augmented optimum is still M
    and is attained with t = 0."""
    for i, b in enumerate(p.var_bounds):
        if not b.contains(0.0):
            raise AugmentationError(
                f"variable x{i} bounds [{b.lo}, {b.hi}] exclude 0; translate "
                "variables before augmenting"
            )
    rows = [row + (p.bineq[i],) for i, row in enumerate(p.aineq)]
    rhs = list(p.bineq)
    n_core = len(rows)
    t_col = p.n
    upper = [0.0] * (p.n + 1)
    upper[t_col] = 1.0
    rows.append(tuple(upper))
    rhs.append(1.0)
    lower = [0.0] * (p.n + 1)
    lower[t_col] = -1.0
    rows.append(tuple(lower))
    rhs.append(0.0)
    erows = tuple(row + (p.beq[i],) for i, row in enumerate(p.aeq))
    return LpProblem(
        aeq=erows, beq=p.beq,
        aineq=tuple(rows), bineq=tuple(rhs),
        c=p.c + (float(k),),
        var_bounds=p.var_bounds + (Interval(0.0, 1.0),),
        n_core_ineq=n_core,
    )


def solve_approx(p: LpProblem) -> tuple[Vector, tuple[Vector, Vector], float]:
    """Floating-point primal/dual solve (no rigor claim) intended only as
    input to certify_upper_bound.  Dense; adequate to n, m <= 500.

    Returns (primal x, (raw y, raw z), reported objective).  Raises
    NoProgress if the underlying solver fails; the certification path then
    falls back to externally supplied duals."""
    import numpy as np
    from scipy.optimize import linprog

    a_ub = np.array(p.aineq, dtype=float) if p.m_ineq else None
    b_ub = np.array(p.bineq, dtype=float) if p.m_ineq else None
    a_eq = np.array(p.aeq, dtype=float) if p.m_eq else None
    b_eq = np.array(p.beq, dtype=float) if p.m_eq else None
    res = linprog(
        -np.array(p.c, dtype=float),
        A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
        bounds=[(None, None)] * p.n,
        method="highs",
    )
    if res.status != 0 or res.x is None:
        raise NoProgress(f"approximate LP solve failed: {res.message}")
    y = tuple(float(-v) for v in res.eqlin.marginals) if p.m_eq else ()
    z = tuple(float(-v) for v in res.ineqlin.marginals) if p.m_ineq else ()
    return tuple(float(v) for v in res.x), (y, z), float(-res.fun)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------
#
# Problem file: line-oriented text with sections OBJ / EQ / INEQ / BOUNDS.
#   vars N
#   obj j v            objective coefficient (sparse)
#   eq r j v           equality matrix entry (row r, col j)
#   eq_rhs r v
#   ineq r j v         inequality matrix entry (core rows only)
#   ineq_rhs r v
#   bound j LITERAL    variable bounds as an interval literal "lo..hi"
# Decimal entries are parsed through the interval layer's decimal reader,
# never through platform float().  Bound rows are appended on load.

def problem_to_text(p: LpProblem) -> str:
    lines = ["lp-problem v1", f"vars {p.n}"]
    for j, v in enumerate(p.c):
        if v != 0.0:
            lines.append(f"obj {j} {v!r}")
    for r, row in enumerate(p.aeq):
        for j, v in enumerate(row):
            if v != 0.0:
                lines.append(f"eq {r} {j} {v!r}")
    for r, v in enumerate(p.beq):
        lines.append(f"eq_rhs {r} {v!r}")
    for r in range(p.n_core_ineq):
        for j, v in enumerate(p.aineq[r]):
            if v != 0.0:
                lines.append(f"ineq {r} {j} {v!r}")
    for r in range(p.n_core_ineq):
        lines.append(f"ineq_rhs {r} {p.bineq[r]!r}")
    for j, b in enumerate(p.var_bounds):
        lines.append(f"bound {j} {iv.format_interval_literal(b)}")
    return "\n".join(lines) + "\n"


def _num(token: str, lineno: int) -> float:
    try:
        return iv.decimal_to_nearest_float(token)
    except ParseError:
        raise ParseError(f"line {lineno}: bad decimal {token!r}", position=lineno) from None


def problem_from_text(text: str) -> LpProblem:
    n = None
    obj: dict[int, float] = {}
    eq_entries: dict[tuple[int, int], float] = {}
    eq_rhs: dict[int, float] = {}
    ineq_entries: dict[tuple[int, int], float] = {}
    ineq_rhs: dict[int, float] = {}
    bounds: dict[int, Interval] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0].lower()
        try:
            if kw == "lp-problem":
                continue
            elif kw == "vars":
                n = int(parts[1])
            elif kw == "obj":
                obj[int(parts[1])] = _num(parts[2], lineno)
            elif kw == "eq":
                eq_entries[(int(parts[1]), int(parts[2]))] = _num(parts[3], lineno)
            elif kw == "eq_rhs":
                eq_rhs[int(parts[1])] = _num(parts[2], lineno)
            elif kw == "ineq":
                ineq_entries[(int(parts[1]), int(parts[2]))] = _num(parts[3], lineno)
            elif kw == "ineq_rhs":
                ineq_rhs[int(parts[1])] = _num(parts[2], lineno)
            elif kw == "bound":
                bounds[int(parts[1])] = iv.parse_interval_literal(parts[2])
            else:
                raise ParseError(f"line {lineno}: unknown keyword {kw!r}", position=lineno)
        except (IndexError, ValueError):
            raise ParseError(f"line {lineno}: malformed entry {raw!r}", position=lineno) from None
    if n is None:
        raise ParseError("missing 'vars N' declaration")
    if set(bounds) != set(range(n)):
        raise ParseError("every variable needs a bound entry")
    m_eq = 1 + max((r for r, _ in eq_entries), default=-1)
    m_eq = max(m_eq, 1 + max(eq_rhs, default=-1))
    m_ineq = 1 + max((r for r, _ in ineq_entries), default=-1)
    m_ineq = max(m_ineq, 1 + max(ineq_rhs, default=-1))
    aeq = [[0.0] * n for _ in range(m_eq)]
    for (r, j), v in eq_entries.items():
        aeq[r][j] = v
    aineq = [[0.0] * n for _ in range(m_ineq)]
    for (r, j), v in ineq_entries.items():
        aineq[r][j] = v
    c = [obj.get(j, 0.0) for j in range(n)]
    return make_problem(
        c, [bounds[j] for j in range(n)],
        aineq=aineq, bineq=[ineq_rhs.get(r, 0.0) for r in range(m_ineq)],
        aeq=aeq, beq=[eq_rhs.get(r, 0.0) for r in range(m_eq)],
    )


def dual_to_text(y: Sequence[float], z: Sequence[float]) -> str:
    y_line = " ".join(repr(float(v)) for v in y)
    z_line = " ".join(repr(float(v)) for v in z)
    return f"{y_line}\n{z_line}\n"


def dual_from_text(text: str) -> tuple[Vector, Vector]:
    cleaned = [ln.split("#", 1)[0] for ln in text.splitlines()]
    while len(cleaned) < 2:
        cleaned.append("")
    y = tuple(iv.decimal_to_nearest_float(tok) for tok in cleaned[0].split())
    z = tuple(iv.decimal_to_nearest_float(tok) for tok in cleaned[1].split())
    return y, z

"""Adaptive-subdivision proof engine for f < 0 (or f <= 0) over a box.

Each cell is first *reduced*: every variable whose partial derivative has
a certified strict sign over the cell is collapsed to the extremal facet
(sup f over the cell equals sup f over the facet), which removes that
dimension from further subdivision.  The reduced cell is then bounded by
the Taylor form; cells whose bound does not certify are bisected along
their widest non-degenerate component.

Reported cells are always *footprints*: collapsed cells re-inflated to
their pre-reduction parents, so the leaves of a run exactly tile the
original domain.

The engine is deterministic: depth-first, lower half first, no clocks,
no unordered iteration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import BoundUnavailable
from .expr import Evaluator, Expr, compile_expr
from .interval import Interval
from .taylor import Box, PartialSign, partial_signs, taylor_upper_bound

__all__ = [
    "ProofTask",
    "ProverConfig",
    "ProofStatus",
    "ProofReport",
    "prove_negative",
    "prove_nonpositive",
    "reduce_cell",
]


@dataclass(frozen=True, slots=True)
class ProofTask:
    """Prove f <= -margin on the domain (strictly, for prove_negative)."""

    expr: Expr
    domain: Box
    margin: float = 0.0

    def __post_init__(self):
        if not (self.margin >= 0.0):
            raise ValueError("margin must be >= 0")


@dataclass(frozen=True, slots=True)
class ProverConfig:
    max_cells: int = 20000
    max_depth: int = 64
    min_width: float = 1e-6
    split_rule: str = "widest"
    track_cells: bool = False

    def __post_init__(self):
        if self.max_cells < 1:
            raise ValueError("max_cells must be >= 1")
        if not (self.min_width > 0.0):
            raise ValueError("min_width must be > 0")
        if self.split_rule != "widest":
            raise ValueError(f"unknown split rule {self.split_rule!r}")


class ProofStatus(enum.Enum):
    PROVEN = "proven"
    UNDECIDED = "undecided"
    EVALUATION_FAILURE = "evaluation_failure"


@dataclass(frozen=True, slots=True)
class ProofReport:
    status: ProofStatus
    cells_processed: int
    max_depth_reached: int
    best_upper_bound_seen: float
    undecided_cells: tuple[Box, ...] = ()
    failed_cells: tuple[Box, ...] = ()
    certified_cells: tuple[Box, ...] = ()

    @property
    def proven(self) -> bool:
        return self.status is ProofStatus.PROVEN


def reduce_cell(ev: Evaluator, cell: Box) -> Box:
    """Collapse every component with a certified strict derivative sign to
    its extremal endpoint.  sup f over the result equals sup f over the
    input cell."""
    signs = partial_signs(ev, cell)
    dims = list(cell.dims)
    changed = False
    for i, s in enumerate(signs):
        d = dims[i]
        if d.lo == d.hi:
            continue
        if s is PartialSign.STRICTLY_POSITIVE:
            dims[i] = Interval.point(d.hi)
            changed = True
        elif s is PartialSign.STRICTLY_NEGATIVE:
            dims[i] = Interval.point(d.lo)
            changed = True
    return Box(tuple(dims)) if changed else cell


def _pick_split_dim(cell: Box, min_width: float) -> int:
    best = -1
    best_w = min_width
    for i, d in enumerate(cell.dims):
        w = d.width
        if w > best_w:
            best = i
            best_w = w
    return best


def _run(ev: Evaluator, domain: Box, margin: float, strict: bool,
         cfg: ProverConfig) -> ProofReport:
    limit = -margin
    # Work items: (footprint, reduced-or-original cell, depth, parent_upper)
    stack = [(domain, domain, 0, math.inf)]
    processed = 0
    max_depth_seen = 0
    best_upper = -math.inf
    undecided: list[Box] = []
    failed: list[Box] = []
    certified: list[Box] = []
    exhausted = False

    while stack:
        if processed >= cfg.max_cells:
            exhausted = True
            break
        footprint, cell, depth, _parent_upper = stack.pop()
        processed += 1
        max_depth_seen = max(max_depth_seen, depth)

        cell = reduce_cell(ev, cell)
        eval_failed = False
        try:
            upper = taylor_upper_bound(ev, cell).upper
        except BoundUnavailable:
            upper = math.inf
            eval_failed = True

        ok = (upper < limit) if strict else (upper <= limit)
        if ok:
            best_upper = max(best_upper, upper)
            if cfg.track_cells:
                certified.append(footprint)
            continue

        k = _pick_split_dim(cell, cfg.min_width)
        if k < 0 or depth >= cfg.max_depth:
            best_upper = max(best_upper, upper)
            (failed if eval_failed else undecided).append(footprint)
            continue

        lo_cell, hi_cell = cell.split(k)
        lo_fp, hi_fp = footprint.replace(k, lo_cell[k]), footprint.replace(k, hi_cell[k])
        stack.append((hi_fp, hi_cell, depth + 1, upper))
        stack.append((lo_fp, lo_cell, depth + 1, upper))

    if exhausted:
        for footprint, _cell, _depth, parent_upper in stack:
            undecided.append(footprint)
            best_upper = max(best_upper, parent_upper)

    if failed:
        status = ProofStatus.EVALUATION_FAILURE
    elif undecided:
        status = ProofStatus.UNDECIDED
    else:
        status = ProofStatus.PROVEN

    def cell_key(b: Box):
        return tuple((d.lo, d.hi) for d in b.dims)

    return ProofReport(
        status=status,
        cells_processed=processed,
        max_depth_reached=max_depth_seen,
        best_upper_bound_seen=best_upper,
        undecided_cells=tuple(sorted(undecided, key=cell_key)),
        failed_cells=tuple(sorted(failed, key=cell_key)),
        certified_cells=tuple(certified),
    )


def prove_negative(task: ProofTask, cfg: ProverConfig = ProverConfig()) -> ProofReport:
    """Prove f < -margin on the domain by adaptive subdivision.

    PROVEN means the certified leaf cells cover the whole domain with a
    strict certified upper bound below -margin on each.  Equality-touching
    inequalities come back UNDECIDED, never PROVEN.
    """
    ev = compile_expr(task.expr, task.domain.n)
    return _run(ev, task.domain, task.margin, strict=True, cfg=cfg)


def prove_nonpositive(task: ProofTask, cfg: ProverConfig = ProverConfig()) -> ProofReport:
    """Prove f <= -margin on the domain (non-strict variant of
    prove_negative; certified upper bounds may touch the limit).

    This is the check used for linearization-cut admission and duality
    certificate verification, where the inequality may bind at the
    optimum."""
    ev = compile_expr(task.expr, task.domain.n)
    return _run(ev, task.domain, task.margin, strict=False, cfg=cfg)

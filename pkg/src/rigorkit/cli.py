"""Single executable exposing every subcommand, file parsing, and report
emission.

Exit codes: 0 for Proven/Certified/complete enumeration, 1 for
Undecided/Refuted/Inconclusive/Incomplete, 2 for input errors.  Reports
are written even on exit 1 and re-parse under `parse_report`; apart from
the wall-time field they are byte-identical across reruns with the same
inputs, flags and seeds.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import assembly as asm
from . import expr as ex
from . import geom
from . import graphgen as gg
from . import interval as iv
from . import lp as lpmod
from .errors import NoProgress, ParseError, RigorError
from .prover import (ProofStatus, ProofTask, ProverConfig, prove_negative)
from .taylor import Box

__all__ = ["main", "dispatch", "RunManifest", "parse_report", "parse_task_file"]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


@dataclass(frozen=True, slots=True)
class RunManifest:
    subcommand: str
    input_digests: tuple[tuple[str, str], ...]
    config_echo: tuple[tuple[str, str], ...]
    wall_time_s: float
    toolkit_version: str = __version__

    def lines(self) -> list[str]:
        out = ["rigorkit-report v1",
               f"subcommand: {self.subcommand}",
               f"toolkit_version: {self.toolkit_version}"]
        for name, digest in self.input_digests:
            out.append(f"input_digest: {name} {digest}")
        for key, val in self.config_echo:
            out.append(f"config: {key} {val}")
        out.append(f"wall_time_s: {self.wall_time_s!r}")
        return out


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_report(path: Optional[str], manifest: RunManifest,
                 body: Sequence[tuple[str, str]]) -> str:
    lines = manifest.lines()
    lines.append("---")
    for key, val in body:
        lines.append(f"{key}: {val}")
    text = "\n".join(lines) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def parse_report(text: str) -> tuple[dict, list[tuple[str, str]]]:
    """Re-parse an emitted report into (header dict, body entries)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("rigorkit-report"):
        raise ParseError("missing report schema header")
    header: dict = {"schema": lines[0], "input_digest": [], "config": []}
    body: list[tuple[str, str]] = []
    in_body = False
    for ln in lines[1:]:
        if ln == "---":
            in_body = True
            continue
        if not ln.strip():
            continue
        key, _, val = ln.partition(": ")
        if in_body:
            body.append((key, val))
        elif key in ("input_digest", "config"):
            header[key].append(val)
        else:
            header[key] = val
    return header, body


# ---------------------------------------------------------------------------
# Task files (.ineq)
# ---------------------------------------------------------------------------

def parse_task_file(text: str) -> tuple[ProofTask, dict]:
    """Arity declaration, expression text, per-variable domain interval
    literals, optional margin."""
    arity = None
    expr_text = None
    domains: dict[int, iv.Interval] = {}
    margin = 0.0
    extras: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        kw = parts[0].lower()
        rest = parts[1] if len(parts) > 1 else ""
        if kw == "arity":
            arity = int(rest)
        elif kw == "expr":
            expr_text = rest
        elif kw == "domain":
            toks = rest.split()
            if len(toks) != 2 or not toks[0].startswith("x"):
                raise ParseError(f"line {lineno}: expected 'domain xI literal'",
                                 position=lineno)
            domains[int(toks[0][1:])] = iv.parse_interval_literal(toks[1])
        elif kw == "margin":
            margin = iv.decimal_to_nearest_float(rest.strip())
        else:
            raise ParseError(f"line {lineno}: unknown keyword {kw!r}", position=lineno)
    if arity is None or expr_text is None:
        raise ParseError("task file needs 'arity' and 'expr'")
    if set(domains) != set(range(arity)):
        raise ParseError("task file must give a domain for every variable")
    e = ex.parse(expr_text, arity)
    box = Box(tuple(domains[i] for i in range(arity)))
    return ProofTask(e, box, margin), extras


def format_task_file(task: ProofTask) -> str:
    lines = [f"arity {task.domain.n}", f"expr {ex.to_text(task.expr)}"]
    for i, d in enumerate(task.domain.dims):
        lines.append(f"domain x{i} {iv.format_interval_literal(d)}")
    lines.append(f"margin {task.margin!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cells_rows(label: str, cells) -> list[tuple[str, str]]:
    rows = []
    for cell in cells:
        rows.append((label, " ".join(iv.format_interval_literal(d) for d in cell.dims)))
    return rows


def _cmd_prove(args) -> int:
    text = Path(args.task).read_text()
    task, _ = parse_task_file(text)
    cfg = ProverConfig(max_cells=args.max_cells, max_depth=args.max_depth,
                       min_width=args.min_width)
    t0 = time.perf_counter()
    report = prove_negative(task, cfg)
    wall = time.perf_counter() - t0
    manifest = RunManifest(
        "prove",
        ((Path(args.task).name, _digest(text)),),
        (("max_cells", str(cfg.max_cells)), ("max_depth", str(cfg.max_depth)),
         ("min_width", repr(cfg.min_width)), ("seed", str(args.seed)),
         ("threads", str(args.threads))),
        wall)
    body: list[tuple[str, str]] = [
        ("status", report.status.value),
        ("cells_processed", str(report.cells_processed)),
        ("max_depth_reached", str(report.max_depth_reached)),
        ("best_upper_bound_seen", repr(report.best_upper_bound_seen)),
    ]
    body += _cells_rows("undecided_cell", report.undecided_cells)
    body += _cells_rows("failed_cell", report.failed_cells)
    text_out = write_report(args.report, manifest, body)
    sys.stdout.write(text_out)
    return EXIT_OK if report.status is ProofStatus.PROVEN else EXIT_NEGATIVE


def _cmd_lp_certify(args) -> int:
    ptext = Path(args.problem).read_text()
    problem = lpmod.problem_from_text(ptext)
    digests = [(Path(args.problem).name, _digest(ptext))]
    if args.solve:
        try:
            _, (y_raw, z_raw), _ = lpmod.solve_approx(problem)
        except NoProgress as exc:
            if not args.dual:
                raise
            y_raw, z_raw = lpmod.dual_from_text(Path(args.dual).read_text())
    elif args.dual:
        dtext = Path(args.dual).read_text()
        digests.append((Path(args.dual).name, _digest(dtext)))
        y_raw, z_raw = lpmod.dual_from_text(dtext)
    else:
        raise ParseError("need --dual FILE or --solve")
    dual = lpmod.clamp_dual(y_raw, z_raw)
    t0 = time.perf_counter()
    cert = lpmod.certify_upper_bound(problem, dual)
    wall = time.perf_counter() - t0
    manifest = RunManifest(
        "lp-certify", tuple(digests),
        (("solve", str(bool(args.solve))), ("seed", str(args.seed)),
         ("threads", str(args.threads))),
        wall)
    residual_norm = max((d.mag for d in cert.residual), default=0.0)
    body = [
        ("bound", repr(cert.bound)),
        ("delta_bound", repr(cert.delta_bound)),
        ("residual_max_norm", repr(residual_norm)),
        ("inputs_digest", cert.inputs_digest),
        ("dual_clamped", str(dual.clamped)),
    ]
    out = write_report(args.report, manifest, body)
    sys.stdout.write(out)
    if args.certificate:
        Path(args.certificate).write_text(out)
    return EXIT_OK


def _cmd_assemble(args) -> int:
    ptext = Path(args.problem).read_text()
    problem = asm.problem_from_text(ptext)
    digests = [(Path(args.problem).name, _digest(ptext))]
    config_echo = [("mode", args.mode), ("seed", str(args.seed)),
                   ("threads", str(args.threads))]

    if args.mode == "fit":
        if args.bound is None or args.guess is None:
            raise ParseError("assemble fit needs --bound and --guess")
        bound = iv.decimal_to_nearest_float(args.bound)
        guess = tuple(iv.decimal_to_nearest_float(tok) for tok in args.guess.split())
        tps = asm.default_test_points(problem, seed=args.seed,
                                      n_random=args.test_points)
        t0 = time.perf_counter()
        cert = asm.fit_dual(problem, guess, bound, tps, test_seed=args.seed)
        wall = time.perf_counter() - t0
        manifest = RunManifest("assemble", tuple(digests), tuple(config_echo), wall)
        if cert is None:
            out = write_report(args.report, manifest, [("candidate", "none")])
            sys.stdout.write(out)
            return EXIT_NEGATIVE
        cert_text = asm.certificate_to_text(problem, cert)
        if args.certificate:
            Path(args.certificate).write_text(cert_text)
        out = write_report(args.report, manifest, [
            ("candidate", "written"),
            ("M", repr(cert.m_bound)),
            ("t0", repr(cert.t0)),
            ("retained_rows", " ".join(map(str, cert.retained_rows))),
        ])
        sys.stdout.write(out)
        return EXIT_OK

    if args.mode == "verify":
        if not args.certificate:
            raise ParseError("assemble verify needs --certificate")
        ctext = Path(args.certificate).read_text()
        digests.append((Path(args.certificate).name, _digest(ctext)))
        cert = asm.certificate_from_text(problem, ctext)
        cfg = ProverConfig(max_cells=args.max_cells)
        t0 = time.perf_counter()
        outcome = asm.verify_duality(problem, cert, cfg)
        wall = time.perf_counter() - t0
        manifest = RunManifest("assemble", tuple(digests), tuple(config_echo), wall)
        body = [("certified", str(outcome.certified))]
        if not outcome.certified:
            body.append(("reason", outcome.reason))
            if outcome.domain_id:
                body.append(("domain", outcome.domain_id))
        out = write_report(args.report, manifest, body)
        sys.stdout.write(out)
        return EXIT_OK if outcome.certified else EXIT_NEGATIVE

    if args.mode == "branch":
        if args.domain is None or args.slot is None or not args.out_prefix:
            raise ParseError("assemble branch needs --domain, --slot, --out-prefix")
        lo, hi = asm.branch(problem, args.domain, args.slot)
        lo_path = args.out_prefix + ".lo.asm"
        hi_path = args.out_prefix + ".hi.asm"
        Path(lo_path).write_text(asm.problem_to_text(lo))
        Path(hi_path).write_text(asm.problem_to_text(hi))
        manifest = RunManifest("assemble", tuple(digests), tuple(config_echo), 0.0)
        out = write_report(args.report, manifest,
                           [("child", lo_path), ("child", hi_path)])
        sys.stdout.write(out)
        return EXIT_OK

    raise ParseError(f"unknown assemble mode {args.mode!r}")


def _cmd_graphs(args) -> int:
    prune = gg.compile_prune_spec(args.prune) if args.prune else gg._accept_all
    cfg = gg.GeneratorConfig(n_max=args.max_vertices, prune=prune,
                             max_states=args.max_states)
    t0 = time.perf_counter()
    result = gg.generate(cfg)
    wall = time.perf_counter() - t0
    manifest = RunManifest(
        "graphs", (),
        (("max_vertices", str(args.max_vertices)),
         ("prune", args.prune or ""),
         ("max_states", str(args.max_states)),
         ("seed", str(args.seed)), ("threads", str(args.threads))),
        wall)
    body = [("complete", str(result.complete)),
            ("classes", str(len(result.terminals))),
            ("states_explored", str(result.states_explored))]
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for i, rec in enumerate(result.terminals):
        body.append(("class", rec.canonical))
        if outdir:
            fname = outdir / f"graph_{i:04d}.txt"
            fname.write_text(_terminal_file(rec))
            body.append(("class_file", str(fname)))
    out = write_report(args.report, manifest, body)
    sys.stdout.write(out)
    return EXIT_OK if result.complete else EXIT_NEGATIVE


def _terminal_file(rec: gg.TerminalRecord) -> str:
    g = rec.graph
    lines = [f"vertices {g.n_vertices}"]
    for u, nbrs in enumerate(g.rot):
        lines.append(f"rot {u} " + " ".join(map(str, nbrs)))
    for f in g.faces():
        lines.append("face " + " ".join(f"{a}-{b}" for a, b in f))
    lines.append(f"canonical {rec.canonical}")
    path_parts = [str(rec.path[0])]
    for step in rec.path[1:]:
        path_parts.append(
            "keep=" + ",".join(map(str, step.keep))
            + ";new=" + ",".join(map(str, step.news)))
    lines.append("derivation " + " ".join(path_parts))
    return "\n".join(lines) + "\n"


def _cmd_geom(args) -> int:
    config_echo = [("mode", args.mode), ("seed", str(args.seed)),
                   ("threads", str(args.threads))]
    digests: list[tuple[str, str]] = []
    t0 = time.perf_counter()
    if args.mode == "simplex":
        if len(args.edges) != 6 or args.r is None:
            raise ParseError("geom simplex needs --edges e1..e6 and --r")
        edges = [iv.parse_interval_literal(tok) for tok in args.edges]
        res = geom.check_simplex_interior_point(edges, iv.parse_interval_literal(args.r))
    elif args.mode == "segment":
        if args.r1 is None or args.r2 is None or args.r3 is None:
            raise ParseError("geom segment needs --r1 --r2 --r3")
        res = geom.check_segment_through_triangle(
            iv.parse_interval_literal(args.r1),
            iv.parse_interval_literal(args.r2),
            iv.parse_interval_literal(args.r3))
    elif args.mode == "linked":
        if not args.spec:
            raise ParseError("geom linked needs --spec FILE")
        stext = Path(args.spec).read_text()
        digests.append((Path(args.spec).name, _digest(stext)))
        res = geom.check_linked_line(geom.parse_distance_spec(stext))
    else:
        raise ParseError(f"unknown geom mode {args.mode!r}")
    wall = time.perf_counter() - t0
    manifest = RunManifest("geom", tuple(digests), tuple(config_echo), wall)
    body = [("verdict", res.verdict.value)]
    if res.reason:
        body.append(("reason", res.reason))
    if res.witness is not None:
        body.append(("witness", iv.format_interval_literal(res.witness)))
    out = write_report(args.report, manifest, body)
    sys.stdout.write(out)
    return EXIT_OK if res.refuted else EXIT_NEGATIVE


def _cmd_plan_dump(args) -> int:
    if args.task:
        task, _ = parse_task_file(Path(args.task).read_text())
        e, arity = task.expr, task.domain.n
    elif args.expr is not None and args.arity is not None:
        e = ex.parse(args.expr, args.arity)
        arity = args.arity
    else:
        raise ParseError("plan-dump needs --task FILE or --expr/--arity")
    evaluator = ex.compile_expr(e, arity)
    manifest = RunManifest("plan-dump", (),
                           (("arity", str(arity)),), 0.0)
    body = [("instruction", line) for line in evaluator.plan_lines()]
    out = write_report(args.report, manifest, body)
    sys.stdout.write(out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigorkit",
        description="rigorous numerics toolkit: interval inequality proofs, "
                    "certified LP/duality bounds, plane-graph enumeration, "
                    "geometric nonexistence checks")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap (execution is sequential; the flag is "
                             "recorded in the manifest)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--report", type=str, default=None,
                        help="write the structured report here as well as stdout")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("prove", help="prove f < -margin on a box")
    p.add_argument("--task", required=True)
    p.add_argument("--max-cells", type=int, default=20000)
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--min-width", type=float, default=1e-6)

    p = sub.add_parser("lp-certify", help="rigorous LP upper bound from a dual")
    p.add_argument("--problem", required=True)
    p.add_argument("--dual")
    p.add_argument("--solve", action="store_true",
                   help="obtain duals from the built-in approximate solver")
    p.add_argument("--certificate")

    p = sub.add_parser("assemble", help="fit/verify/branch duality certificates")
    p.add_argument("mode", choices=["fit", "verify", "branch"])
    p.add_argument("--problem", required=True)
    p.add_argument("--certificate")
    p.add_argument("--bound", type=str,
                   help="decimal M, parsed through the exact reader")
    p.add_argument("--guess", type=str,
                   help="whitespace-separated x* vector (global variable order)")
    p.add_argument("--test-points", type=int, default=16)
    p.add_argument("--max-cells", type=int, default=20000)
    p.add_argument("--domain", type=str)
    p.add_argument("--slot", type=int)
    p.add_argument("--out-prefix", type=str)

    p = sub.add_parser("graphs", help="enumerate decorated sphere graphs")
    p.add_argument("--max-vertices", type=int, required=True)
    p.add_argument("--prune", type=str, default="")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--max-states", type=int, default=500000)

    p = sub.add_parser("geom", help="geometric nonexistence checks")
    p.add_argument("mode", choices=["simplex", "segment", "linked"])
    p.add_argument("--edges", nargs=6)
    p.add_argument("--r")
    p.add_argument("--r1")
    p.add_argument("--r2")
    p.add_argument("--r3")
    p.add_argument("--spec")

    p = sub.add_parser("plan-dump", help="dump a compiled evaluation plan")
    p.add_argument("--task")
    p.add_argument("--expr")
    p.add_argument("--arity", type=int)

    return parser


_HANDLERS = {
    "prove": _cmd_prove,
    "lp-certify": _cmd_lp_certify,
    "assemble": _cmd_assemble,
    "graphs": _cmd_graphs,
    "geom": _cmd_geom,
    "plan-dump": _cmd_plan_dump,
}


def dispatch(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        return _HANDLERS[args.command](args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except RigorError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success (or query true), 1 query false, 2 input or spec error,
3 unphysical classification or failed internal certification.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from ..eeh import CHANNEL_EPS, EehTrace, diff_traces
from ..ehg import CLASS_NAMES, UnphysicalClassification, classify_report, incidence_grid
from ..gsd import GsdError, decompose, predicted_supports
from ..measures import ZERO_EPS, measure_report
from ..protocols import PRESETS, NoiseSpec, ProtocolSpec, preset
from ..qstate import StateVector, random_pure_states, state_from_json
from ..query import QuerySyntaxError, evaluate, parse, witness
from . import exporters

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_UNPHYSICAL = 0, 1, 2, 3


class CliError(Exception):
    pass


def _out(text: str, path: Optional[str] = None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})") from None


def load_state(ref: str) -> StateVector:
    if ref.startswith("preset:"):
        return state_from_json({"preset": ref[len("preset:"):]})
    return state_from_json(_load_json(ref))


def load_protocol(ref: str) -> ProtocolSpec:
    if ref in PRESETS:
        return preset(ref)
    return ProtocolSpec.from_dict(_load_json(ref))


def load_trace(path: str) -> EehTrace:
    d = _load_json(path)
    try:
        return EehTrace.from_dict(d)
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path}: malformed trace ({exc})") from None


def _fmt(x: Optional[float]) -> str:
    return "absent" if x is None else f"{x:.6f}"


def cmd_classify(args) -> int:
    psi = load_state(args.state)
    report = measure_report(psi)
    g, label = classify_report(report, args.epsilon)
    if args.format == "json":
        _out(exporters.dumps({"schema": 1, "report": report.to_dict(), "hypergraph": g.to_dict(),
                              "class": str(label)}))
    else:
        lines = [
            f"class: {label}",
            f"C12 {_fmt(report.c12)}  C13 {_fmt(report.c13)}  C23 {_fmt(report.c23)}",
            f"C1(23) {_fmt(report.c1_23)}  C2(13) {_fmt(report.c2_13)}  C3(12) {_fmt(report.c3_12)}",
            f"tau {_fmt(report.tau)}  purity {_fmt(report.purity)}",
            "edges: " + (" ".join("{%d,%d}" % p for p in g.edges) or "none"),
            f"hyperedge: {'yes' if g.has_hyperedge else 'no'}",
        ]
        _out("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gsd(args) -> int:
    form = decompose(load_state(args.state))
    support = predicted_supports(form, args.epsilon)
    if args.format == "json":
        _out(exporters.dumps({"schema": 1, "gsd": form.to_dict(), "supports": support.to_dict()}))
    else:
        lam = " ".join(f"{x:.6f}" for x in form.lam)
        flags = " ".join(k.removesuffix("_possible") for k, v in support.to_dict().items() if v) or "none"
        _out(f"lambda: {lam}\ntheta: {form.theta:.6f}\npossible: {flags}\n")
    return EXIT_OK


def cmd_run(args) -> int:
    spec = load_protocol(args.protocol)
    if args.noise is not None:
        try:
            channel = json.loads(args.noise)
        except json.JSONDecodeError as exc:
            raise CliError(f"--noise is not valid JSON ({exc})") from None
        spec = ProtocolSpec(spec.name, spec.initial, spec.steps,
                            NoiseSpec(channel, args.noise_after, not args.no_fold), spec.notes)
    trace = spec.run(args.epsilon)
    if args.out:
        _out(exporters.trace_json(trace, include_rho=args.rho), args.out)
    if args.format == "json":
        _out(exporters.dumps({"protocol": spec.name, "classes": trace.labels(),
                              "transitions": list(trace.transitions)}))
    else:
        _out(", ".join(trace.labels()) + "\n")
    return EXIT_OK


def cmd_export(args) -> int:
    trace = load_trace(args.trace)
    if args.layer is not None and not 0 <= args.layer < len(trace.layers):
        raise CliError(f"--layer {args.layer} out of range 0..{len(trace.layers) - 1}")
    if args.diff:
        other = load_trace(args.diff)
        _out(json.dumps(diff_traces(other, trace)) + "\n", args.out)
        return EXIT_OK
    fmt = args.format
    if fmt == "json":
        if args.layer is None:
            text = exporters.trace_json(trace)
        else:
            ly = trace.layers[args.layer]
            text = exporters.dumps(ly.hypergraph.to_dict())
    elif fmt == "dot":
        text = exporters.trace_dot(trace, args.weighted, args.layer)
    elif fmt == "grid":
        text = exporters.trace_grid(trace, args.weighted, args.layer)
    elif fmt == "pgm":
        text = exporters.trace_pgm(trace, args.weighted, args.layer)
    else:
        raise CliError(f"unknown export format {fmt!r}")
    _out(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        formula = parse(args.query)
    except QuerySyntaxError as exc:
        raise CliError(f"query syntax error: {exc}") from None
    trace = load_trace(args.trace) if args.trace else load_protocol(args.protocol).run()
    result = evaluate(formula, trace)
    line = "true" if result else "false"
    if args.verbose:
        w = witness(formula, trace)
        if w is not None:
            line += f" (layer {w})"
    _out(line + "\n")
    return EXIT_OK if result else EXIT_FALSE


def _scan_chunk(payload) -> list[str]:
    states, epsilon = payload
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for psi in states:
            try:
                _, label = classify_report(measure_report(psi), epsilon)
                out.append(label.kind)
            except UnphysicalClassification:
                out.append("Forbidden")
    return out


def scan(count: int, seed: int, epsilon: float = CHANNEL_EPS, jobs: int = 1) -> Counter:
    """Class histogram over ``count`` Haar-random pure states."""
    states = random_pure_states(count, seed)
    if jobs <= 1:
        kinds = _scan_chunk((states, epsilon))
    else:
        size = -(-count // jobs)
        chunks = [(states[i:i + size], epsilon) for i in range(0, count, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            kinds = [k for part in pool.map(_scan_chunk, chunks) for k in part]
    hist = Counter({name: 0 for name in CLASS_NAMES})
    hist.update(kinds)
    return hist


def cmd_scan(args) -> int:
    if args.count < 1:
        raise CliError("--count must be at least 1")
    hist = scan(args.count, args.seed, args.epsilon, args.jobs)
    if args.format == "json":
        _out(exporters.dumps({"count": args.count, "seed": args.seed, "epsilon": args.epsilon,
                              "histogram": dict(hist), "forbidden": hist["Forbidden"]}))
    else:
        lines = [f"{name}: {hist[name]}" for name in CLASS_NAMES if name != "Forbidden"]
        lines.append(f"forbidden: {hist['Forbidden']}")
        _out("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperent", description="Three-qubit entangled-hypergraph toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a three-qubit state")
    c.add_argument("--state", required=True, help="preset:NAME (ghz, w, bell0_23, plus_q1, basis:bbb) or a JSON file")
    c.add_argument("--epsilon", type=float, default=ZERO_EPS)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_classify)

    g = sub.add_parser("gsd", help="generalized Schmidt decomposition of a pure state")
    g.add_argument("--state", required=True)
    g.add_argument("--epsilon", type=float, default=ZERO_EPS, help="support threshold for the lambda products")
    g.add_argument("--format", choices=("text", "json"), default="text")
    g.set_defaults(func=cmd_gsd)

    r = sub.add_parser("run", help="run a protocol and record its EEH trace")
    r.add_argument("--protocol", required=True, help=f"preset ({', '.join(PRESETS)}) or protocol JSON file")
    r.add_argument("--noise", help="channel spec JSON inserted as noise")
    r.add_argument("--noise-after", type=int, default=0, help="step index the noise follows (default 0)")
    r.add_argument("--no-fold", action="store_true", help="insert noise as its own layer instead of folding")
    r.add_argument("--epsilon", type=float, default=CHANNEL_EPS)
    r.add_argument("--out", help="write trace JSON here")
    r.add_argument("--rho", action="store_true", help="embed density matrices in the trace JSON")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("export", help="export a stored trace")
    e.add_argument("--trace", required=True)
    e.add_argument("--format", default="json", help="json, dot, grid or pgm")
    e.add_argument("--weighted", action="store_true")
    e.add_argument("--layer", type=int)
    e.add_argument("--diff", metavar="OTHER", help="print time indices where OTHER and --trace differ")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)

    k = sub.add_parser("check", help="evaluate a temporal query on a trace")
    src = k.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace")
    src.add_argument("--protocol")
    k.add_argument("--query", required=True)
    k.add_argument("--verbose", action="store_true")
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("scan", help="classify Haar-random pure states")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--epsilon", type=float, default=CHANNEL_EPS)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except UnphysicalClassification as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_UNPHYSICAL
        except GsdError as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_UNPHYSICAL
        except (CliError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            code = EXIT_INPUT
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return code

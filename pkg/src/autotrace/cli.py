"""Command-line front end.

Subcommands: ``generate`` writes a synthetic task stream, ``run`` traces a
stream and writes the annotated output plus reports, ``replicate`` checks
that several simulated nodes agree, and ``repeats`` dumps what the miner
finds in a stream.  Exit codes: 0 ok, 1 usage, 2 parse error, 3 replicas
diverged.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .engine import EngineConfig, run_engine, run_replicated
from .evaluate import (
    CostParams,
    simulate_cost,
    traced_fraction_report,
    write_cost_csv,
    write_fraction_csv,
)
from .generators import KINDS, GeneratorSpec, generate
from .miner import BACKEND, find_repeats, generate_candidates, get_kernels
from .streamio import StreamParseError, format_events, format_tasks, parse_tasks
from .tokens import tokenize_stream

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_DIVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seconds(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text}") from None


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-trace-length", type=_positive, default=25)
    p.add_argument("--max-trace-length", type=_positive, default=None, help="default: unbounded")
    p.add_argument("--batchsize", type=_positive, default=5000)
    p.add_argument("--multi-scale-factor", type=_positive, default=250)
    p.add_argument("--workers", type=int, default=1, help="0 mines inline on the token path")


def _config(args: argparse.Namespace) -> EngineConfig:
    try:
        return EngineConfig(
            min_trace_length=args.min_trace_length,
            max_trace_length=args.max_trace_length,
            batchsize=args.batchsize,
            multi_scale_factor=args.multi_scale_factor,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_stream(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="ascii")
    return parse_tasks(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="autotrace", description="Online trace identification for task streams.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic task stream")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--iterations", type=int, default=100)
    g.add_argument("--period", type=int, default=6)
    g.add_argument("--noise-rate", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alphabet", type=int, default=50)
    g.add_argument("--length", type=int, default=1000)
    g.add_argument("--inner", type=int, default=4)
    g.add_argument("-o", "--output", default="-")

    r = sub.add_parser("run", help="trace a stream and write reports")
    r.add_argument("input", help="task stream file, or - for stdin")
    r.add_argument("--out-dir", default=".")
    _engine_flags(r)
    r.add_argument("--window", type=_positive, default=5000)
    r.add_argument("--alpha", type=_seconds, default=CostParams.alpha)
    r.add_argument("--alpha-m", type=_seconds, default=CostParams.alpha_m)
    r.add_argument("--alpha-r", type=_seconds, default=CostParams.alpha_r)
    r.add_argument("--replay-cost", type=_seconds, default=CostParams.c)

    rep = sub.add_parser("replicate", help="check that simulated nodes make identical decisions")
    rep.add_argument("input")
    _engine_flags(rep)
    rep.add_argument("--nodes", type=int, default=4)
    rep.add_argument("--seed", type=int, default=0, help="node k uses latency seed seed*nodes+k")
    rep.add_argument("--max-latency", type=float, default=0.002, help="seconds")

    m = sub.add_parser("repeats", help="dump mined candidates and selections")
    m.add_argument("input", help="task stream file, or a literal string with --chars")
    m.add_argument("--min-length", type=_positive, default=1)
    m.add_argument("--chars", action="store_true", help="treat input as a literal character string")
    m.add_argument("--backend", choices=("compiled", "python"), default=None)
    return parser


def cmd_generate(args) -> int:
    spec = GeneratorSpec(
        args.kind, args.iterations, args.period, args.noise_rate, args.seed,
        args.alphabet, args.length, args.inner,
    )
    try:
        tasks = generate(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = format_tasks(tasks)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="ascii")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    try:
        costs = CostParams(args.alpha, args.alpha_m, args.alpha_r, args.replay_cost)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tasks = _read_stream(args.input)
    run = run_engine(tasks, config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "annotated.txt").write_text(format_events(run.events), encoding="ascii")
    report = simulate_cost(run.events, costs)
    write_cost_csv(out / "cost.csv", report)
    series = traced_fraction_report(run.events, args.window)
    write_fraction_csv(out / "fraction.csv", series)
    with open(out / "decisions.log", "w", encoding="ascii") as fh:
        for index, text in run.decisions:
            fh.write(f"{index} {text}\n")
    final = series[-1][1] if series else 0.0
    print(
        f"tasks={run.tasks} replays={report.replays} traced_fraction={final:.3f} "
        f"speedup={float(report.speedup_vs_untraced(costs)):.2f} "
        f"front_path_us={run.per_token_seconds * 1e6:.1f}"
    )
    return EXIT_OK


def cmd_replicate(args) -> int:
    if args.nodes < 2:
        raise UsageError("--nodes must be at least 2")
    config = _config(args)
    tasks = _read_stream(args.input)
    seeds = [args.seed * args.nodes + k for k in range(args.nodes)]
    rep = run_replicated(tasks, config, args.nodes, seeds, args.max_latency)
    if not rep.ok:
        print(f"DIVERGED: {rep.message}", file=sys.stderr)
        return EXIT_DIVERGED
    waits = sum(len(r.waits) for r in rep.runs)
    final = rep.runs[0].trajectory[-1][2] if rep.runs[0].trajectory else 0
    print(f"nodes={rep.nodes} identical=yes waits={waits} final_wait_count={final}")
    return EXIT_OK


def cmd_repeats(args) -> int:
    backend = get_kernels(args.backend) if args.backend else None
    if args.chars:
        s, show = args.input, (lambda toks: "".join(chr(t) for t in toks))
    else:
        s = tokenize_stream(_read_stream(args.input))
        show = lambda toks: " ".join(f"{t:016x}" for t in toks)  # noqa: E731
    print(f"backend={args.backend or BACKEND} n={len(s)}")
    for c in generate_candidates(s, args.min_length, backend):
        print(f"candidate len={c.length} id={c.substring_id} start={c.start}")
    result = find_repeats(s, args.min_length, backend)
    symbols = [ord(ch) for ch in s] if args.chars else s
    for c in result.selections:
        print(f"selected len={c.length} id={c.substring_id} start={c.start}")
    for rep in result.repeats:
        print(f"repeat {show(rep.tokens)} starts={','.join(map(str, sorted(rep.starts)))}")
    print(f"coverage={sum(c.length for c in result.selections)}/{len(symbols)}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "replicate": cmd_replicate, "repeats": cmd_repeats}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"autotrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StreamParseError as exc:
        print(f"autotrace: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"autotrace: cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

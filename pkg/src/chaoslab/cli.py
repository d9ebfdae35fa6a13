"""Command line entry point: ``chaoslab <command> ...``.

Every failure prints one line ``E_<CODE>: message`` to stderr and exits 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dynamics, experiment, fractal, learning, tm
from .errors import ChaosLabError, UsageError
from .output import dumps, emit_table


def _scales(text: str) -> list:
    """``"1-10"`` or ``"1,2,5"``."""
    try:
        if "-" in text:
            a, b = text.split("-", 1)
            return list(range(int(a), int(b) + 1))
        return [int(s) for s in text.split(",") if s]
    except ValueError:
        raise UsageError(f"bad scale list {text!r}") from None


def _window(text: str) -> tuple:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"window must be 'start,end', got {text!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational: {text!r}") from None


def cmd_run(args):
    cfg = experiment.load_config(args.config)
    report = experiment.run_experiment(cfg, workers=args.workers, output_dir=args.out)
    sys.stdout.write(report.body_json())
    print(f"wrote {len(report.files)} files to {report.meta['output_dir']}", file=sys.stderr)


def cmd_tm(args):
    machine = tm.load_machine(args.machine)
    word = list(args.input)
    if args.action == "run":
        result = tm.run(machine, word, args.budget, detect_cycles=args.detect_cycles)
        sys.stdout.write(dumps({
            "outcome": result.outcome.value,
            "steps": result.steps,
            "final_state": result.final.state,
            "final_tape": "".join(result.final.tape),
            "head": result.final.head,
            "cycle": list(result.cycle) if result.cycle else None,
        }))
    else:
        trace = tm.tape_trace(machine, word, args.budget)
        values = tm.rationalize_tapes(trace, machine.godel_map(), machine.blank)
        rows = [{"step": c.steps_taken, "state": c.state, "head": c.head,
                 "tape": "".join(c.tape), "value": v} for c, v in zip(trace, values)]
        sys.stdout.write(emit_table(rows, ["step", "state", "head", "tape", "value"]))


def cmd_orbit(args):
    f = dynamics.map_from_spec(args.map)
    o = dynamics.orbit(f, _rational(args.x0), args.n)
    lo, hi = (_rational(v) for v in args.interval.split(","))
    v = dynamics.chaos_verdict(o, (lo, hi))
    sys.stdout.write(dumps({"map": f.name, "points": list(o.points), "verdict": experiment.verdict_dict(v)}))


def cmd_fractal(args):
    cover = fractal.ifs_cover(fractal.FunctionSystem.cantor(), args.depth)
    if args.action == "cover":
        sys.stdout.write(emit_table(cover.rows(), fractal.CSV_COLUMNS))
    else:
        est = fractal.box_count_dimension(cover, _scales(args.scales), args.base)
        sys.stdout.write(dumps({
            "depth": args.depth,
            "base": est.base,
            "dimension": est.dimension,
            "box_counts": [{"scale": s, "N": c} for s, c in zip(est.scales, est.counts)],
        }))


def cmd_learn(args):
    params = json.loads(args.params) if args.params else {}
    if args.functional == "tm_functional" and isinstance(params.get("machine"), str):
        params["machine"] = tm.load_machine(params["machine"])
    L = learning.builtin_functional(args.functional, params)
    grid = learning.ProbeGrid.dyadic(args.grid_depth)
    _, trace = learning.trace_accept_sets(L, L.seed, args.n, grid, args.workers)
    conv = learning.limit_sets(trace, _window(args.window) if args.window else None)
    sys.stdout.write(dumps({
        "functional": L.name,
        "converged": conv.converged,
        "first_stable_index": conv.first_stable_index,
        "window": list(conv.window),
        "limsup": learning.intervals_of(conv.limsup, grid),
        "liminf": learning.intervals_of(conv.liminf, grid),
        "churn": list(conv.churn_series),
    }))


class _Parser(argparse.ArgumentParser):
    # keep argument errors on one line like every other failure
    def error(self, message):
        self.exit(2, f"{UsageError.code}: {self.prog}: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chaoslab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    r.add_argument("--out", default=None, help=f"output directory (default: config, ${experiment.OUT_ENV}, ./out)")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("tm", help="run or trace a Turing machine")
    t.add_argument("action", choices=["run", "trace"])
    t.add_argument("machine", help="path, or builtin:<name>")
    t.add_argument("input", nargs="?", default="")
    t.add_argument("--budget", type=int, default=tm.DEFAULT_BUDGET)
    t.add_argument("--detect-cycles", action="store_true")
    t.set_defaults(func=cmd_tm)

    o = sub.add_parser("orbit", help="orbit of a named rational map")
    o.add_argument("map", help=f"one of {sorted(dynamics.MAPS)}, optionally name:param")
    o.add_argument("x0")
    o.add_argument("n", type=int)
    o.add_argument("--interval", default="0,1")
    o.set_defaults(func=cmd_orbit)

    f = sub.add_parser("fractal", help="Cantor cover CSV or box-counting dimension")
    f.add_argument("action", choices=["cover", "dim"])
    f.add_argument("--depth", type=int, default=12)
    f.add_argument("--scales", default="1-10")
    f.add_argument("--base", type=int, default=3)
    f.set_defaults(func=cmd_fractal)

    lp = sub.add_parser("learn", help="iterate a built-in functional")
    lp.add_argument("action", choices=["iterate"])
    lp.add_argument("functional", choices=["constant", "oscillator", "stump_learner", "tm_functional"])
    lp.add_argument("--params", default=None, help="JSON object of functional parameters")
    lp.add_argument("--n", type=int, default=64)
    lp.add_argument("--grid-depth", type=int, default=learning.DEFAULT_GRID_DEPTH)
    lp.add_argument("--window", default=None, help="start,end")
    lp.add_argument("--workers", type=int, default=1)
    lp.set_defaults(func=cmd_learn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ChaosLabError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"E_CONFIG: --params line {exc.lineno}: {exc.msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

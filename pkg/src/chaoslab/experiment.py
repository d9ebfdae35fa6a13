"""Config-driven experiment pipelines.

A config is a JSON object::

    {
      "kind": "tm_trace" | "learning_run" | "fractal_probe",
      "seed_label": "free text copied into the report",
      "output_dir": "out/name",          # optional
      "inputs": { ... kind-specific ... }
    }

Rationals are written as strings, ``"num/den"``.  Relative machine paths are
resolved against the config file's directory.
"""

from __future__ import annotations

import json
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from . import dynamics, fractal, learning, tm
from .errors import ConfigError
from .output import dumps, emit_plot, emit_table, rational_text

KINDS = ("tm_trace", "learning_run", "fractal_probe")
OUT_ENV = "CHAOSLAB_OUT"


@dataclass
class ExperimentConfig:
    kind: str
    inputs: dict
    output_dir: Optional[str] = None
    seed_label: str = ""
    base_dir: Optional[str] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.inputs, dict):
            raise ConfigError("'inputs' must be an object")
        for key in ("budget", "grid_depth", "iterations", "depth"):
            if key in self.inputs:
                value = self.inputs[key]
                if not isinstance(value, int) or isinstance(value, bool) or value < (1 if key != "depth" else 0):
                    raise ConfigError(f"{key!r} must be a positive integer, got {value!r}")

    def echo(self) -> dict:
        return {"kind": self.kind, "seed_label": self.seed_label, "inputs": self.inputs}


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")
    unknown = set(raw) - {"kind", "inputs", "output_dir", "seed_label"}
    if unknown:
        raise ConfigError(f"{path}: unknown top-level keys {sorted(unknown)}")
    if "kind" not in raw:
        raise ConfigError(f"{path}: missing 'kind'")
    return ExperimentConfig(raw["kind"], raw.get("inputs", {}), raw.get("output_dir"),
                            raw.get("seed_label", ""), str(path.parent))


@dataclass
class Report:
    config: dict
    verdicts: dict
    series: dict
    meta: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict, repr=False)  # name -> text

    def body(self) -> dict:
        return {"config": self.config, "verdicts": self.verdicts, "series": self.series}

    def body_json(self) -> str:
        return dumps(self.body())

    def to_json(self) -> str:
        return dumps({**self.body(), "meta": self.meta})


def _fraction(value, what) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{what}: cannot read {value!r} as a rational") from None


def verdict_dict(v: dynamics.OrbitVerdict) -> dict:
    return {
        "sample_length": v.sample_length,
        "period": list(v.period) if v.period else None,
        "sample_bounds": list(v.sample_bounds),
        "interval": list(v.interval),
        "within_interval": v.within_interval,
        "cauchy": [{"epsilon": e, "N": n} for e, n in v.cauchy],
        "chaotic_per_criterion": v.chaotic_per_criterion,
    }


# -- pipelines -------------------------------------------------------------

def _tm_trace(cfg: ExperimentConfig, workers: int) -> Report:
    inp = cfg.inputs
    if "machine" not in inp:
        raise ConfigError("tm_trace needs 'machine'")
    machine = tm.load_machine(inp["machine"], cfg.base_dir)
    word = inp.get("input", "")
    word = list(word) if isinstance(word, str) else list(word)
    budget = inp.get("budget", tm.DEFAULT_BUDGET)
    result = tm.run(machine, word, budget, detect_cycles=inp.get("detect_cycles", True))
    trace = tm.tape_trace(machine, word, budget if result.outcome is not tm.Outcome.CYCLE else result.steps)
    values = tm.rationalize_tapes(trace, machine.godel_map(), machine.blank)
    verdict = dynamics.chaos_verdict(dynamics.Orbit(tuple(values), "tape"), (0, 1))
    rows = [{"step": c.steps_taken, "state": c.state, "head": c.head,
             "tape": "".join(c.tape), "value": v} for c, v in zip(trace, values)]
    report = Report(
        config=cfg.echo(),
        verdicts={
            "outcome": result.outcome.value,
            "steps": result.steps,
            "cycle": list(result.cycle) if result.cycle else None,
            "final_tape": "".join(result.final.tape),
            "trace_length": len(trace),
            "all_in_unit_interval": all(0 <= v <= 1 for v in values),
            "orbit": verdict_dict(verdict),
        },
        series={"trace_values": values},
    )
    report.files["trace.csv"] = emit_table(rows, ["step", "state", "head", "tape", "value"])
    report.files["trace.svg"] = emit_plot({"rho(T_n)": values}, "rationalized tape", step=True)
    return report


def _learning_run(cfg: ExperimentConfig, workers: int) -> Report:
    inp = cfg.inputs
    spec = inp.get("functional")
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("learning_run needs 'functional': {'name': ..., 'params': {...}}")
    params = dict(spec.get("params", {}))
    if spec["name"] == "tm_functional" and isinstance(params.get("machine"), str):
        params["machine"] = tm.load_machine(params["machine"], cfg.base_dir)
    L = learning.builtin_functional(spec["name"], params)
    if L.seed is None:
        raise ConfigError(f"functional {L.name!r} has no default seed")
    n = inp.get("iterations", 64)
    grid = learning.ProbeGrid.dyadic(inp.get("grid_depth", learning.DEFAULT_GRID_DEPTH))
    window = tuple(inp.get("window", (0, n + 1)))
    encodings, trace = learning.trace_accept_sets(L, L.seed, n, grid, workers)
    conv = learning.limit_sets(trace, window)
    values = [e.value for e in encodings]
    orbit_verdict = dynamics.chaos_verdict(dynamics.Orbit(tuple(values), L.name), (0, 1))
    eps = _fraction(inp.get("density_epsilon", Fraction(1, len(grid) - 1)), "density_epsilon")
    last, prev = trace.memberships[-1], trace.memberships[-2] if n >= 1 else trace.memberships[-1]
    density = learning.symmetric_difference_density(prev, last, grid, eps)
    report = Report(
        config=cfg.echo(),
        verdicts={
            "functional": L.name,
            "language": L.language,
            "grid_size": len(grid),
            "window": list(conv.window),
            "tail_start": conv.tail_start,
            "converged": conv.converged,
            "first_stable_index": conv.first_stable_index,
            "limsup": learning.intervals_of(conv.limsup, grid),
            "liminf": learning.intervals_of(conv.liminf, grid),
            "limsup_size": sum(conv.limsup),
            "liminf_size": sum(conv.liminf),
            "last_step_difference": {
                "delta_size": density.delta_size,
                "intersection_size": density.intersection_size,
                "epsilon": density.epsilon,
                "density_fraction": density.density_fraction,
            },
            "encoding_orbit": verdict_dict(orbit_verdict),
        },
        series={"churn": list(conv.churn_series), "encodings": values},
    )
    report.files["churn.csv"] = emit_table(
        [{"n": conv.window[0] + k, "churn": c} for k, c in enumerate(conv.churn_series)], ["n", "churn"])
    report.files["encodings.csv"] = emit_table(
        [{"n": k, "value": v} for k, v in enumerate(values)], ["n", "value"])
    if conv.churn_series:
        report.files["churn.svg"] = emit_plot({"|S_n+1 xor S_n|": list(conv.churn_series)}, "accept-set churn", step=True)
    return report


def _system(spec) -> fractal.FunctionSystem:
    if spec in (None, "cantor"):
        return fractal.FunctionSystem.cantor()
    if isinstance(spec, dict) and "maps" in spec:
        maps = [fractal.AffineMap(_fraction(a, "scale"), _fraction(b, "offset")) for a, b in spec["maps"]]
        return fractal.FunctionSystem(tuple(maps), spec.get("label", "ifs"))
    raise ConfigError("'system' must be \"cantor\" or {\"maps\": [[scale, offset], ...]}")


def _fractal_probe(cfg: ExperimentConfig, workers: int) -> Report:
    inp = cfg.inputs
    fs = _system(inp.get("system"))
    depth = inp.get("depth", 12)
    scales = inp.get("scales", list(range(1, 11)))
    base = inp.get("base", 3)
    cover = fractal.ifs_cover(fs, depth)
    est = fractal.box_count_dimension(cover, scales, base)
    verdicts = {
        "system": fs.label,
        "depth": depth,
        "intervals": len(cover),
        "total_length": cover.total_length,
        "dimension": est.dimension,
        "box_counts": [{"scale": s, "N": c} for s, c in zip(est.scales, est.counts)],
    }
    files = {
        "cover.csv": emit_table(cover.rows(), fractal.CSV_COLUMNS),
        "box_counts.csv": emit_table([{"scale": s, "N": c} for s, c in zip(est.scales, est.counts)], ["scale", "N"]),
        "box_counts.svg": emit_plot({"N(s)": list(est.counts)}, f"box counts, base {base}"),
    }

    probe = inp.get("dense_probe")
    if probe is not None:
        oracle_name = probe.get("oracle", "cantor")
        if oracle_name == "cantor":
            oracle = fractal.cantor_contains
        elif oracle_name == "cover":
            oracle = cover.__contains__
        else:
            raise ConfigError(f"unknown membership oracle {oracle_name!r}")
        eps = [_fraction(e, "epsilon") for e in probe.get("epsilons", [Fraction(1, 3**k) for k in range(1, 7)])]
        budget = probe.get("budget", fractal.DEFAULT_PROBE_BUDGET)
        rows = []
        for x in probe.get("points", ["0"]):
            x = _fraction(x, "probe point")
            for e, w in fractal.dense_rejection_probe(oracle, x, eps, budget):
                rows.append({"x": x, "epsilon": e, "witness": w})
        verdicts["dense_rejection"] = [dict(r) for r in rows]
        verdicts["dense_rejection_all_found"] = all(r["witness"] is not None for r in rows)
        files["dense_probe.csv"] = emit_table(rows, ["x", "epsilon", "witness"])

    grid_depth = inp.get("grid_depth")
    if grid_depth is not None:
        grid = learning.ProbeGrid.dyadic(grid_depth)
        tree = fractal.tree_from_system(fs, depth) if len(fs.maps) == 2 else None
        if tree is not None:
            cells = fractal.partition(tree, grid, workers)
            routed = [0] * len(grid)
            for cell in cells:
                for i in cell.indices:
                    routed[i] = 1 if cell.label == "A" else 0
            cover_bits = grid.mask(cover.__contains__)
            verdicts["tree"] = {
                "cells": len(cells),
                "accepted_points": sum(routed),
                "agrees_with_cover": tuple(routed) == cover_bits,
            }
        offset = inp.get("offset")
        if offset is not None:
            base_depth = inp.get("offset_depth", 2)
            a = fractal.ifs_cover(fs, base_depth)
            b = a.shifted(_fraction(offset, "offset"))
            density = learning.symmetric_difference_density(
                grid.mask(a.__contains__), grid.mask(b.__contains__), grid, Fraction(1, len(grid) - 1))
            verdicts["offset_difference"] = {
                "offset": _fraction(offset, "offset"),
                "depth": base_depth,
                "delta_size": density.delta_size,
                "intersection_size": density.intersection_size,
                "density_fraction": density.density_fraction,
            }
    report = Report(cfg.echo(), verdicts, {"box_counts": list(est.counts)})
    report.files.update(files)
    return report


PIPELINES = {"tm_trace": _tm_trace, "learning_run": _learning_run, "fractal_probe": _fractal_probe}


def run_experiment(cfg: ExperimentConfig, workers: int = 1, write: bool = True,
                   output_dir: Optional[str] = None) -> Report:
    """Run one pipeline; with ``write`` the report and side files go to the output directory."""
    report = PIPELINES[cfg.kind](cfg, max(1, workers))
    report.meta = {
        "version": __version__,
        "python": platform.python_version(),
        "workers": workers,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    report.files["report.json"] = report.to_json()
    if write:
        out = Path(output_dir or cfg.output_dir or os.environ.get(OUT_ENV, "out"))
        if cfg.base_dir and not out.is_absolute() and not output_dir and cfg.output_dir:
            out = Path(cfg.base_dir) / out
        out.mkdir(parents=True, exist_ok=True)
        for name in sorted(report.files):
            (out / name).write_text(report.files[name], "utf-8", newline="")
        report.meta["output_dir"] = str(out)
    return report


__all__ = ["ExperimentConfig", "Report", "load_config", "run_experiment", "rational_text"]

"""Command-line experiment runner.

    photodistill plan      --scenario FILE|-|JSON  |  --prep ...
    photodistill simulate  (scenario) [--unitary FILE]
    photodistill sweep     --prep polarization|polarization-time --theta-min A --theta-max B --steps N
    photodistill scatter   (scenario) --samples N --seed K
    photodistill compare-u0 --samples N --seed K --kind real|complex

Errors go to stderr as JSON objects with a stable ``code``. Exit status is 0
on success, 1 for domain errors and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import baselines
from .distill import U0_PARAMS, plan, predicted_visibility
from .errors import DistillError, ValidationError
from .interference import Interferometer, simulate_distillation_circuit
from .scenario import (
    GramMatrix,
    PreparationConfig,
    Scenario,
    balance_delay,
    gram_from_states,
    polarization,
    prepare_polarization,
    prepare_polarization_time,
    scenario_from_gram,
)

COMMANDS = ("plan", "simulate", "sweep", "scatter", "compare-u0")
STOCHASTIC = {"scatter", "compare-u0"}
SWEEP_HEADER = ("theta", "v_input", "v_f_opt", "v_f_u0", "gain", "p_success")
SWEEP_THETA_RANGE = (0.0, math.pi / 6)


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    scenario: Optional[str] = None
    prep: Optional[str] = None
    theta: Optional[float] = None
    t: Optional[float] = None
    tau: float = 1.0
    states: Optional[str] = None
    unitary: Optional[str] = None
    theta_min: Optional[float] = None
    theta_max: Optional[float] = None
    steps: int = 50
    samples: Optional[int] = None
    seed: Optional[int] = None
    kind: str = "real"
    dim: int = 3
    out: Optional[str] = None
    summary: Optional[str] = None
    fmt: Optional[str] = None
    search_permutations: bool = True

    def __post_init__(self):
        if self.command in {"plan", "simulate", "scatter"}:
            if (self.scenario is None) == (self.prep is None):
                raise UsageError("give exactly one scenario source: --scenario or --prep")
        if self.command in STOCHASTIC:
            if self.seed is None:
                raise UsageError(f"{self.command} needs --seed")
            if self.samples is None or self.samples < 1:
                raise UsageError(f"{self.command} needs --samples >= 1")
        if self.command == "sweep":
            if self.prep not in ("polarization", "polarization-time"):
                raise UsageError("sweep needs --prep polarization or polarization-time")
            if self.theta_min is None or self.theta_max is None or self.steps < 1:
                raise UsageError("sweep needs --theta-min, --theta-max and --steps >= 1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photodistill", description="Optimal three-photon indistinguishability distillation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_opts(p):
        p.add_argument("--scenario", help="scenario or Gram JSON: a file path, '-' for stdin, or inline JSON")
        p.add_argument("--prep", choices=("polarization", "polarization-time", "states"))
        p.add_argument("--theta", type=float, help="half-wave-plate angle")
        p.add_argument("--t", type=float, help="delay of photon 1 (default: balanced delay)")
        p.add_argument("--tau", type=float, default=1.0, help="coherence time")
        p.add_argument("--states", help="comma-separated polarizations for --prep states, e.g. L,V,A")

    def common(p, fmt_default):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=fmt_default)
        p.add_argument("--degrees", action="store_true", help="angles given on the command line are in degrees")

    p = sub.add_parser("plan", help="optimal distillation plan")
    scenario_opts(p)
    common(p, "json")
    p.add_argument("--no-permutations", dest="search_permutations", action="store_false")

    p = sub.add_parser("simulate", help="permanent-based simulation of the verification circuit")
    scenario_opts(p)
    common(p, "json")
    p.add_argument("--unitary", help="interferometer JSON (default: the optimal plan)")

    p = sub.add_parser("sweep", help="theory curves over the preparation angle")
    p.add_argument("--prep", choices=("polarization", "polarization-time"), required=True)
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--no-permutations", dest="search_permutations", action="store_false")
    common(p, "csv")

    p = sub.add_parser("scatter", help="Haar-random unitaries versus the optimal plan")
    scenario_opts(p)
    common(p, "csv")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--summary", help="also write the summary JSON here")

    p = sub.add_parser("compare-u0", help="U0 versus optimal gain over random Gram matrices")
    common(p, "csv")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--kind", choices=("real", "complex"), default="real")
    p.add_argument("--dim", type=int, default=3, help="dimension of the random internal states")
    p.add_argument("--summary", help="also write the summary JSON here")
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    if getattr(ns, "degrees", False):
        for key in ("theta", "theta_min", "theta_max"):
            if fields.get(key) is not None:
                fields[key] = math.radians(fields[key])
    return RunConfig(**fields)


# ------------------------------------------------------------------ loading


def _read_json(source: str):
    try:
        if source == "-":
            text = sys.stdin.read()
        elif source.lstrip().startswith("{"):
            text = source
        else:
            with open(source) as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {source!r}: {exc}") from None


def load_scenario(cfg: RunConfig) -> Scenario:
    if cfg.scenario is not None:
        obj = _read_json(cfg.scenario)
        try:
            if "re" in obj:
                return scenario_from_gram(GramMatrix.from_json(obj))
            if "v" in obj:
                return Scenario.from_json(obj)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed scenario JSON: {exc}") from None
        raise UsageError("scenario JSON needs 'v'/'delta_mod' or a Gram 're'/'im' pair")
    if cfg.prep == "states":
        if not cfg.states:
            raise UsageError("--prep states needs --states")
        states = [polarization(x.strip()) for x in cfg.states.split(",")]
        if len(states) != 3:
            raise UsageError("--states needs three polarizations")
    else:
        if cfg.theta is None:
            raise UsageError(f"--prep {cfg.prep} needs --theta")
        if cfg.prep == "polarization":
            states = prepare_polarization(cfg.theta)
        else:
            t = balance_delay(cfg.theta, cfg.tau) if cfg.t is None else cfg.t
            states = prepare_polarization_time(PreparationConfig(cfg.theta, t, cfg.tau))
    return scenario_from_gram(gram_from_states(states))


# ------------------------------------------------------------------ commands


def cmd_plan(cfg: RunConfig) -> dict:
    return plan(load_scenario(cfg), cfg.search_permutations).to_json()


def cmd_simulate(cfg: RunConfig) -> dict:
    sc = load_scenario(cfg)
    if cfg.unitary is not None:
        obj = _read_json(cfg.unitary)
        u = Interferometer.from_json(obj["unitary"] if "unitary" in obj else obj)
        perm = (0, 1, 2)
    else:
        best = plan(sc)
        u, perm = best.unitary, best.permutation
    sim = simulate_distillation_circuit(u, sc.permuted(perm))
    return {"permutation": list(perm), "unitary": u.to_json(), **sim.to_json()}


def sweep_rows(
    prep: str, theta_min: float, theta_max: float, steps: int, tau: float = 1.0, search_permutations: bool = True
) -> list[dict]:
    lo, hi = SWEEP_THETA_RANGE
    if not (lo <= theta_min <= theta_max <= hi):
        raise ValidationError("theta range must satisfy 0 <= theta_min <= theta_max <= pi/6")
    rows = []
    for theta in np.linspace(theta_min, theta_max, steps):
        theta = float(theta)
        if prep == "polarization":
            states = prepare_polarization(theta)
        else:
            states = prepare_polarization_time(PreparationConfig(theta, balance_delay(theta, tau), tau))
        sc = scenario_from_gram(gram_from_states(states))
        best = plan(sc, search_permutations)
        rows.append(
            {
                "theta": theta,
                "v_input": sc.max_visibility,
                "v_f_opt": best.v_f,
                "v_f_u0": predicted_visibility(U0_PARAMS, sc),
                "gain": best.gain,
                "p_success": best.p_success,
            }
        )
    return rows


def cmd_sweep(cfg: RunConfig):
    rows = sweep_rows(cfg.prep, cfg.theta_min, cfg.theta_max, cfg.steps, cfg.tau, cfg.search_permutations)
    if cfg.fmt == "json":
        return rows
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([repr(float(r[k])) for k in SWEEP_HEADER])
    return buf.getvalue()


def cmd_scatter(cfg: RunConfig):
    sc = load_scenario(cfg)
    points = baselines.scatter(sc, cfg.samples, cfg.seed)
    opt = points[0]
    rand = [p for p in points if p.source == "random"]
    summary = {
        "scenario": sc.to_json(),
        "n_samples": cfg.samples,
        "seed": cfg.seed,
        "optimal_gain": opt.gain,
        "optimal_p_success": opt.p_success,
        "u0_gain": points[1].gain,
        "max_random_gain": max(p.gain for p in rand),
        "optimal_dominates": all(p.gain <= opt.gain + 1e-6 for p in rand),
    }
    _write_summary(cfg, summary)
    if cfg.fmt == "json":
        return summary
    buf = io.StringIO()
    baselines.write_scatter_csv(points, buf)
    return buf.getvalue()


def cmd_compare_u0(cfg: RunConfig):
    records, summary = baselines.compare_u0(cfg.samples, cfg.kind, cfg.seed, dim=cfg.dim)
    _write_summary(cfg, summary)
    if cfg.fmt == "json":
        return summary
    buf = io.StringIO()
    baselines.write_comparison_csv(records, buf)
    return buf.getvalue()


HANDLERS = {
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "scatter": cmd_scatter,
    "compare-u0": cmd_compare_u0,
}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_summary(cfg: RunConfig, summary: dict) -> None:
    if cfg.summary:
        with open(cfg.summary, "w") as fh:
            fh.write(_dumps(summary))


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _fail(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"code": code, "message": message}) + "\n")
    return status


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        result = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        return _fail(exc.code, str(exc), 2)
    except DistillError as exc:
        return _fail(exc.code, str(exc), 1)
    text = result if isinstance(result, str) else _dumps(result)
    with _output(cfg.out) as fh:
        fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

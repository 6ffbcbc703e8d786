"""Monte-Carlo baselines: Haar-random interferometers and random Gram matrices.

Per-sample random streams are spawned from the master seed with
:class:`numpy.random.SeedSequence`, so sample ``k`` is the same whether the
batch is evaluated serially or split across workers.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
from scipy.stats import binomtest

from .distill import U0, plan, u0_gain
from .interference import Interferometer, simulate_distillation_circuit
from .scenario import SAMPLING_MEASURE, Scenario, sample_random_scenario

DOMINANCE_TOL = 1e-9

SCATTER_HEADER = ("gain", "p_success", "source")
COMPARISON_HEADER = ("v12", "v13", "v23", "delta_phase", "g_opt", "g_u0")


def haar_unitary(m: int, rng_seed=None) -> Interferometer:
    """Haar-random m x m unitary: QR of a complex Ginibre matrix, with the
    phases of R's diagonal moved into Q."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rng = np.random.default_rng(rng_seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))[None, :]
    return Interferometer(q)


def spawn_seeds(rng_seed, n: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(rng_seed).spawn(n)


@dataclass(frozen=True)
class ScatterPoint:
    gain: float
    p_success: float
    source: str  # "optimal", "u0" or "random"


def scatter(s: Scenario, n_samples: int, rng_seed) -> list[ScatterPoint]:
    """Gain and success probability of ``n_samples`` Haar-random 3-mode unitaries.

    The first two points are the optimal plan and U0; random points follow
    in sample order. Random and U0 points use the identity photon ordering.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    best = plan(s)
    vmax = s.max_visibility
    sim0 = simulate_distillation_circuit(U0, s)
    points = [
        ScatterPoint(best.gain, best.p_success, "optimal"),
        ScatterPoint(sim0.v_f_sim - vmax, sim0.p_success_sim, "u0"),
    ]
    for seed in spawn_seeds(rng_seed, n_samples):
        sim = simulate_distillation_circuit(haar_unitary(3, seed), s)
        points.append(ScatterPoint(sim.v_f_sim - vmax, sim.p_success_sim, "random"))
    return points


@dataclass(frozen=True)
class ComparisonRecord:
    scenario: Scenario
    g_opt: float
    g_u0: float


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(k, n).proportion_ci(confidence_level=confidence, method="wilson")
    return (float(ci.low), float(ci.high))


def compare_u0(n_samples: int, kind: str, rng_seed, dim: int = 3) -> tuple[list[ComparisonRecord], dict]:
    """Optimal gain versus U0 gain over random pure scenarios.

    Both gains use the photon ordering that maximizes each one.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    records = []
    for seed in spawn_seeds(rng_seed, n_samples):
        sc = sample_random_scenario(kind, seed, dim=dim)
        records.append(ComparisonRecord(sc, plan(sc).gain, u0_gain(sc)[0]))
    n_neg = sum(r.g_u0 < 0.0 for r in records)
    n_better = sum(r.g_opt > r.g_u0 + 1e-12 for r in records)
    n_violations = sum(r.g_opt < r.g_u0 - DOMINANCE_TOL for r in records)
    summary = {
        "kind": kind,
        "n_samples": n_samples,
        "seed": rng_seed,
        "sampling_measure": SAMPLING_MEASURE[kind].replace("dim", str(dim)),
        "dim": dim,
        "permutation_convention": "g_opt and g_u0 each maximized over the 3 choices of verifier photon",
        "fraction_u0_negative": n_neg / n_samples,
        "fraction_u0_negative_ci95": list(wilson_interval(n_neg, n_samples)),
        "fraction_opt_better": n_better / n_samples,
        "fraction_opt_better_ci95": list(wilson_interval(n_better, n_samples)),
        "dominance_violations": n_violations,
    }
    return records, summary


def _fmt(x: float) -> str:
    return repr(float(x))


def write_scatter_csv(points: Iterable[ScatterPoint], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SCATTER_HEADER)
    for p in points:
        w.writerow((_fmt(p.gain), _fmt(p.p_success), p.source))


def write_comparison_csv(records: Iterable[ComparisonRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COMPARISON_HEADER)
    for r in records:
        sc = r.scenario
        w.writerow((_fmt(sc.v12), _fmt(sc.v13), _fmt(sc.v23), _fmt(sc.delta_phase), _fmt(r.g_opt), _fmt(r.g_u0)))

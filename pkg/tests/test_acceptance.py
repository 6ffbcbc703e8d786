"""Acceptance criteria, each at its stated tolerance and runtime budget.

A summary line per criterion is printed at the end of the pytest run.
Run alone with ``pytest tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from photodistill import (
    DistillParams,
    compare_u0,
    distillation_circuit,
    extract_params,
    fock_oracle,
    gram_from_states,
    haar_unitary,
    pattern_probability,
    plan,
    polarization,
    predicted_success,
    predicted_visibility,
    prepare_polarization,
    sample_random_scenario,
    scenario_from_data,
    scenario_from_gram,
    simulate_distillation_circuit,
    synthesize_optimal_unitary,
    u0_gain,
)
from photodistill.baselines import spawn_seeds
from photodistill.interference import CIRCUIT_INPUT, HERALD_PATTERNS, output_patterns

from .oracles import grid_audit, random_pure_states
from .test_interference import vec_states

TWO_PI = 2 * math.pi


def phase_distance(a, b):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def symmetric(v, phi=0.0):
    return scenario_from_data(v, v, v, v**1.5, phi)


def fix_phases(u):
    """Make the first row and first column real and non-negative."""
    u = u * np.exp(-1j * np.angle(u[0, :]))[None, :]
    return u * np.exp(-1j * np.angle(u[:, 0]))[:, None]


def test_closed_form_matches_simulator(criterion):
    c = criterion(1, "closed form vs permanent simulator, 1000 pairs, 1e-9, < 10 s")
    t0 = time.perf_counter()
    worst_v = worst_p = 0.0
    for k, seed in enumerate(spawn_seeds(2024, 1000)):
        u_seed, s_seed = seed.spawn(2)
        u = haar_unitary(3, u_seed)
        sc = sample_random_scenario("complex" if k % 2 else "real", s_seed)
        sim = simulate_distillation_circuit(u, sc)
        worst_v = max(worst_v, abs(sim.v_f_sim - predicted_visibility(extract_params(u), sc)))
        worst_p = max(worst_p, abs(sim.p_success_sim - predicted_success(u, sc)))
    elapsed = time.perf_counter() - t0
    c["detail"] = f"max dV={worst_v:.1e} max dP={worst_p:.1e} {elapsed:.1f}s"
    assert worst_v <= 1e-9 and worst_p <= 1e-9
    assert elapsed < 10


def test_oracle_equivalence(criterion):
    c = criterion(2, "tensor permanent vs Fock oracle, 100 instances + herald patterns, 1e-10, < 10 s")
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        states = vec_states(random_pure_states(rng))
        g = gram_from_states(states)
        u = haar_unitary(4, 10_000 + seed).entries
        for out in output_patterns(4, 3):
            worst = max(worst, abs(pattern_probability(u, CIRCUIT_INPUT, out, g) - fock_oracle(u, states, out)))
        circuit = distillation_circuit(haar_unitary(3, 20_000 + seed))
        sim = simulate_distillation_circuit(haar_unitary(3, 20_000 + seed), states)
        for pat in HERALD_PATTERNS:
            worst = max(worst, abs(sim.pattern_probs[pat] - fock_oracle(circuit, states, pat, CIRCUIT_INPUT)))
    elapsed = time.perf_counter() - t0
    c["detail"] = f"max diff={worst:.1e} {elapsed:.1f}s"
    assert worst <= 1e-10
    assert elapsed < 10


def test_u0_reproduction(criterion):
    c = criterion(3, "synthesize(1, 0) equals U0 and extract(U0) = (1, 0), 1e-12")
    r2 = math.sqrt(2)
    u0 = 0.5 * np.array([[1, 1, r2], [1, 1, -r2], [r2, -r2, 0]])
    u = synthesize_optimal_unitary(DistillParams(1.0, 0.0)).entries
    p = extract_params(u0)
    err = float(np.max(np.abs(u - u0)))
    c["detail"] = f"max entry diff={err:.1e}"
    assert err <= 1e-12
    assert abs(p.s - 1) <= 1e-12 and phase_distance(p.phi_u, 0.0) <= 1e-12


def test_fourier_reproduction(criterion):
    c = criterion(4, "synthesize(1, 4pi/3) is the 3-mode DFT up to phases, 1e-12")
    dft = np.fft.fft(np.eye(3)) / math.sqrt(3)
    u = synthesize_optimal_unitary(DistillParams(1.0, 4 * math.pi / 3)).entries
    err = float(np.max(np.abs(fix_phases(u) - fix_phases(dft))))
    c["detail"] = f"max diff after phase fixing={err:.1e}"
    assert err <= 1e-12


def test_symmetric_curve(criterion):
    c = criterion(5, "symmetric V in 0.05..0.95: (S, phi_u) = (1, 0), v_f closed form, gain > 0")
    worst = 0.0
    for v in np.round(np.arange(1, 20) * 0.05, 2):
        best = plan(symmetric(float(v)))
        assert abs(best.params.s - 1) <= 1e-6 and phase_distance(best.params.phi_u, 0.0) <= 1e-6
        worst = max(worst, abs(best.v_f - v * (1 + math.sqrt(v)) / (1 + v)))
        assert best.gain > 0
    c["detail"] = f"max v_f diff={worst:.1e}"
    assert worst <= 1e-9


def test_triad_phase_flip(criterion):
    c = criterion(6, "symmetric V <= 1/4 with phi = pi: U0 gain <= 0, plan gain >= 0 at phi_u = pi")
    for v in np.linspace(0.01, 0.25, 25):
        sc = symmetric(float(v), math.pi)
        best = plan(sc)
        assert u0_gain(sc)[0] <= 0
        assert best.gain >= 0
        assert abs(best.params.s - 1) <= 1e-6 and phase_distance(best.params.phi_u, math.pi) <= 1e-6


def test_tritter_scenario(criterion):
    c = criterion(7, "V = 1/2, phi = +pi/4: phi_u = -2pi/3, grid audit 1e-9, U0 gain <= 1e-9")
    sc = symmetric(0.5, math.pi / 4)
    best = plan(sc)
    assert abs(best.params.s - 1) <= 1e-6
    assert phase_distance(best.params.phi_u, -2 * math.pi / 3) <= 1e-6
    audit, _, _ = grid_audit(sc)
    c["detail"] = f"v_f={best.v_f:.12f} audit diff={abs(best.v_f - audit):.1e}"
    assert abs(best.v_f - audit) <= 1e-9
    assert best.v_f > 0.5 and best.gain > 0
    assert u0_gain(sc)[0] <= 1e-9
    mirrored = plan(symmetric(0.5, -math.pi / 4))
    assert phase_distance(mirrored.params.phi_u, 2 * math.pi / 3) <= 1e-6


SCATTER_SCENARIOS = {
    "polarization theta=0.61": lambda: prepare_polarization(0.61),
    "polarization theta=0.05": lambda: prepare_polarization(0.05),
    "L,V,A": lambda: [polarization(x) for x in "LVA"],
}


def test_random_unitary_dominance(criterion):
    c = criterion(8, "10000 Haar unitaries never beat plan().gain + 1e-6 in three scenarios, < 60 s")
    t0 = time.perf_counter()
    margins = []
    for k, make in enumerate(SCATTER_SCENARIOS.values()):
        sc = scenario_from_gram(gram_from_states(make()))
        best = plan(sc)
        vmax = sc.max_visibility
        top = max(
            simulate_distillation_circuit(haar_unitary(3, seed), sc).v_f_sim - vmax
            for seed in spawn_seeds(500 + k, 10000)
        )
        margins.append(best.gain - top)
        assert top <= best.gain + 1e-6
    elapsed = time.perf_counter() - t0
    c["detail"] = "margins " + ", ".join(f"{m:.2e}" for m in margins) + f" {elapsed:.1f}s"
    assert elapsed < 60


def test_u0_negative_fractions(criterion):
    c = criterion(9, "fraction(g_u0 < 0) = 0.916 real / 0.874 complex within 0.05, dominance, < 5 min")
    t0 = time.perf_counter()
    got = {}
    for kind in ("real", "complex"):
        records, summary = compare_u0(10000, kind, rng_seed=2025)
        assert summary["dominance_violations"] == 0
        assert all(r.g_opt >= r.g_u0 - 1e-9 for r in records)
        got[kind] = summary["fraction_u0_negative"]
    elapsed = time.perf_counter() - t0
    c["detail"] = f"real={got['real']:.4f} complex={got['complex']:.4f} {elapsed:.0f}s"
    assert elapsed < 300
    assert abs(got["real"] - 0.916) <= 0.05, f"real fraction {got['real']:.4f}"
    assert abs(got["complex"] - 0.874) <= 0.05, f"complex fraction {got['complex']:.4f}"


def test_round_trip(criterion):
    c = criterion(10, "extract(synthesize(p)) = p on 1000 random p incl. phi_u near pi, 1e-9")
    rng = np.random.default_rng(77)
    s_vals = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), 1000))
    phis = rng.uniform(0, TWO_PI, 1000)
    phis[:200] = math.pi + rng.uniform(-1e-3, 1e-3, 200)
    phis[0] = math.pi
    worst = 0.0
    for s, phi in zip(s_vals, phis):
        p = DistillParams(float(s), float(phi))
        back = extract_params(synthesize_optimal_unitary(p))
        worst = max(worst, abs(back.s - p.s) / max(1.0, p.s), phase_distance(back.phi_u, p.phi_u))
    c["detail"] = f"max error={worst:.1e}"
    assert worst <= 1e-9

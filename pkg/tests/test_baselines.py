import io
import math

import numpy as np
import pytest

from photodistill import (
    GramMatrix,
    compare_u0,
    gram_from_states,
    haar_unitary,
    plan,
    polarization,
    prepare_polarization,
    scatter,
    scenario_from_data,
    scenario_from_gram,
)
from photodistill.baselines import (
    COMPARISON_HEADER,
    SCATTER_HEADER,
    spawn_seeds,
    wilson_interval,
    write_comparison_csv,
    write_scatter_csv,
)

from .oracles import scipy_haar


class TestHaar:
    def test_one_mode_is_a_phase(self):
        u = haar_unitary(1, 3).entries
        assert abs(abs(u[0, 0]) - 1) < 1e-12

    def test_unitary(self):
        for seed in range(20):
            u = haar_unitary(4, seed).entries
            assert np.max(np.abs(u @ u.conj().T - np.eye(4))) < 1e-10
            np.testing.assert_allclose(np.linalg.norm(u, axis=0), 1.0, atol=1e-10)

    def test_determinism(self):
        np.testing.assert_array_equal(haar_unitary(3, 42).entries, haar_unitary(3, 42).entries)

    def test_first_moment(self):
        vals = np.array([abs(haar_unitary(3, s).entries[0, 0]) ** 2 for s in spawn_seeds(0, 10000)])
        assert vals.mean() == pytest.approx(1 / 3, abs=0.01)

    def test_moments_within_three_sigma(self):
        m, n = 3, 4000
        sq = np.array([np.abs(haar_unitary(m, s).entries) ** 2 for s in spawn_seeds(1, n)])
        # |u_ij|^2 ~ Beta(1, m-1): variance (m-1) / (m^2 (m+1))
        sigma = math.sqrt((m - 1) / (m * m * (m + 1)) / n)
        assert np.all(np.abs(sq.mean(axis=0) - 1 / m) < 3.5 * sigma)

    def test_second_moment_matches_scipy(self):
        # E|u11|^4 = 2 / (m (m+1)) for Haar; compare both samplers to it
        n, m = 4000, 3
        ours = np.mean([abs(haar_unitary(m, s).entries[0, 0]) ** 4 for s in spawn_seeds(2, n)])
        ref = np.mean([abs(scipy_haar(m, k)[0, 0]) ** 4 for k in range(n)])
        exact = 2 / (m * (m + 1))
        assert ours == pytest.approx(exact, abs=0.01)
        assert ref == pytest.approx(exact, abs=0.01)


class TestScatter:
    def test_point_count_and_order(self):
        sc = scenario_from_gram(gram_from_states(prepare_polarization(0.61)))
        pts = scatter(sc, 50, rng_seed=5)
        assert len(pts) == 52
        assert [p.source for p in pts[:2]] == ["optimal", "u0"]
        assert all(p.source == "random" for p in pts[2:])
        assert all(0 <= p.p_success <= 1 for p in pts)

    def test_symmetric_unit_visibility(self):
        sc = scenario_from_data(1, 1, 1, 1, 0)
        pts = scatter(sc, 30, rng_seed=1)
        assert pts[0].gain == 0.0
        assert all(p.gain <= 1e-12 for p in pts)

    def test_identity_gram(self):
        pts = scatter(scenario_from_gram(GramMatrix(np.eye(3))), 30, rng_seed=2)
        assert all(abs(p.gain) <= 1e-12 for p in pts)

    def test_theta_061_dominance(self):
        sc = scenario_from_gram(gram_from_states(prepare_polarization(0.61)))
        pts = scatter(sc, 500, rng_seed=3)
        assert max(p.gain for p in pts[2:]) <= pts[0].gain + 1e-6

    def test_deterministic(self):
        sc = scenario_from_gram(gram_from_states([polarization(x) for x in "LVA"]))
        assert scatter(sc, 20, rng_seed=9) == scatter(sc, 20, rng_seed=9)

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            scatter(scenario_from_data(1, 1, 1, 1, 0), 0, rng_seed=0)

    def test_csv(self):
        sc = scenario_from_data(0.5, 0.5, 0.5, math.sqrt(0.125), 0.0)
        buf = io.StringIO()
        write_scatter_csv(scatter(sc, 3, rng_seed=0), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(SCATTER_HEADER)
        assert len(lines) == 6
        g = float(lines[1].split(",")[0])
        assert g == plan(sc).gain


class TestCompareU0:
    def test_dominance_and_summary(self):
        records, summary = compare_u0(300, "real", rng_seed=11)
        assert len(records) == 300
        assert all(r.g_opt >= r.g_u0 - 1e-9 for r in records)
        assert summary["dominance_violations"] == 0
        lo, hi = summary["fraction_u0_negative_ci95"]
        assert lo <= summary["fraction_u0_negative"] <= hi
        assert "R^3" in summary["sampling_measure"] and summary["dim"] == 3

    def test_complex_kind(self):
        records, summary = compare_u0(100, "complex", rng_seed=12)
        assert all(r.g_opt >= r.g_u0 - 1e-9 for r in records)
        assert summary["kind"] == "complex"

    def test_prefix_stability(self):
        a, _ = compare_u0(20, "real", rng_seed=4)
        b, _ = compare_u0(40, "real", rng_seed=4)
        assert a == b[:20]

    def test_csv(self):
        records, _ = compare_u0(5, "real", rng_seed=0)
        buf = io.StringIO()
        write_comparison_csv(records, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == ",".join(COMPARISON_HEADER)
        assert len(lines) == 6
        assert float(lines[1].split(",")[4]) == records[0].g_opt


def test_wilson_interval():
    lo, hi = wilson_interval(916, 1000)
    assert lo < 0.916 < hi
    assert hi - lo == pytest.approx(2 * 1.96 * math.sqrt(0.916 * 0.084 / 1000), rel=0.05)

import math
from fractions import Fraction

import numpy as np
import pytest

from gidlab.attraction import (AttractionSchedule, ExperimentReport, MonteCarlo,
                               compose_schedules, effective_indices, linnik_chain,
                               run_duality_experiment, run_gss_self_attraction,
                               run_pga_experiment, run_transitivity_experiment,
                               run_un_convergence, semistable_chain, tends_to_limit,
                               validate_schedule_floor)
from gidlab.cf_core import ExponentDescriptor, check_admissible, eval_exponent

GAUSS = ExponentDescriptor.gaussian(0.5)
CAUCHY = ExponentDescriptor.stable(1.0)


class TestSchedules:
    def test_gss(self):
        s = AttractionSchedule.gss(0.5, 1.5)
        assert s.check_prefix(20) == []
        m = s.materialize(5)
        np.testing.assert_allclose(m["B"], m["p"] ** (-1 / 1.5), rtol=1e-15)

    def test_pga(self):
        s = AttractionSchedule.pga(2.5, 0.4)
        m = s.materialize(20)
        assert list(m["k"][:4]) == [2, 6, 15, 39]
        assert np.all((m["theta"] >= 0) & (m["theta"] < 1))
        assert s.check_prefix(20) == []

    def test_prefix_violations(self):
        flat = AttractionSchedule.custom(lambda n: 0.5, lambda n: 1.0)
        assert "prefix does not show p_n -> 0 and B_n -> inf" in flat.check_prefix(5)
        assert "p_n outside (0, 1)" in AttractionSchedule.custom(lambda n: 1.0).check_prefix(3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            AttractionSchedule.gss(1.0, 1.0)
        with pytest.raises(ValueError):
            AttractionSchedule.pga(0.5, 0.5)

    def test_compose(self):
        s = compose_schedules(AttractionSchedule.pga(2.0, 0.5), AttractionSchedule.pga(3.0, 0.5))
        assert [s.count(n) for n in (1, 2, 3)] == [6, 36, 216]
        assert s.B_seq(2) == pytest.approx(16.0)


class TestFloor:
    def test_examples(self):
        assert validate_schedule_floor(AttractionSchedule.custom(lambda n: Fraction(1, n)), 50).ok
        half = AttractionSchedule.custom(lambda n: 1 / (n + Fraction(1, 2)))
        assert validate_schedule_floor(half, 50).ok
        bad = validate_schedule_floor(AttractionSchedule.custom(lambda n: Fraction(1, 2 * n)), 10)
        assert not bad.ok and bad.failures == list(range(1, 11))

    def test_float_rounding(self):
        # 1/(1/93) evaluates to 92.99999999999999 in floating point
        rep = validate_schedule_floor(AttractionSchedule.custom(lambda n: 1.0 / n), 100)
        assert rep.failures == [93, 99]
        assert validate_schedule_floor(AttractionSchedule.custom(lambda n: Fraction(1, n)), 100).ok

    @pytest.mark.parametrize("p", [0.1, 0.5])
    def test_gss_reindexing(self, p):
        # [1/p^n] is strictly increasing and is the index the experiment runs at
        s = AttractionSchedule.gss(p, 1.0)
        idx = effective_indices(s, 15)
        assert all(b > a for a, b in zip(idx, idx[1:]))
        assert idx == [math.floor(s.count(n)) for n in range(1, 16)]

    def test_gss_reindexing_near_one(self):
        # for p close to 1 the first floors repeat: only eventually increasing
        idx = effective_indices(AttractionSchedule.gss(0.9, 1.0), 30)
        assert idx[:3] == [1, 1, 1]
        tail = idx[17:]
        assert all(b > a for a, b in zip(tail, tail[1:]))


class TestConvergenceSurrogate:
    def test_tends_to_limit(self):
        assert tends_to_limit([1, 0.1, 1e-3, 1e-5, 1e-7, 1e-8])
        assert tends_to_limit([0.0] * 6)
        assert not tends_to_limit([1e-7, 1e-8, 1e-9, 1e-8, 1e-9])
        assert not tends_to_limit([1e-1, 1e-2, 1e-3, 1e-4, 1e-5])
        assert not tends_to_limit([1e-9] * 3)


class TestUnConvergence:
    @pytest.mark.parametrize("desc", [GAUSS, CAUCHY], ids=["gaussian", "stable"])
    def test_exact(self, desc):
        rep = run_un_convergence(desc)
        assert rep.passed and -1.2 <= rep.rate.order <= -0.8

    def test_semistable_exact(self):
        d = ExponentDescriptor.semistable(1.0, 0.25, 0.05)
        rep = run_un_convergence(d, mc=MonteCarlo(samples=1000))
        assert rep.passed
        first = rep.rows[0]["sup_distance"]
        assert all(r["sup_distance"] <= first for r in rep.rows)
        assert any("exact track only" in n for n in rep.notes)

    def test_mc(self):
        rep = run_un_convergence(GAUSS, (10, 30, 100), mc=MonteCarlo(samples=50_000, seed=3))
        assert rep.passed and rep.metrics["ks_last"] < 0.02
        assert all(r["ks"] is not None for r in rep.rows)

    def test_ns_increasing(self):
        with pytest.raises(ValueError):
            run_un_convergence(GAUSS, (100, 10, 1000))


class TestGss:
    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_pass(self, alpha):
        rep = run_gss_self_attraction(alpha)
        assert rep.passed
        assert rep.metrics["irrational_pair_limit_gap"] <= 1e-8

    def test_worked_identity(self):
        rep = run_gss_self_attraction(2.0, (0.25,), n_max=1, grid=[1.0])
        assert rep.rows[0]["sup_distance"] == 0.0

    def test_fixed_point_example(self):
        # g1(t) = |t| at p = 1/2, t = 3: p^-1 g1(p t) = 2 * 1.5
        d = ExponentDescriptor.stable(1.0)
        assert eval_exponent(d, 3.0) == 2 * eval_exponent(d, 1.5) == 3.0


class TestPga:
    def test_decay_ratio(self):
        d = ExponentDescriptor.semistable(1.0, 0.4, 0.05)
        rep = run_pga_experiment(d)
        assert rep.passed
        assert 2.5 * 0.75 <= rep.metrics["fitted_ratio"] <= 2.5 * 1.25
        assert 2.5 * 0.75 <= rep.metrics["theta_normalised_ratio_min"]
        assert rep.metrics["theta_normalised_ratio_max"] <= 2.5 * 1.25

    def test_integer_powers_exact(self):
        for eps in (0.0, 0.05, 0.1):
            rep = run_pga_experiment(ExponentDescriptor.semistable(1.0, 0.5, eps))
            assert rep.passed
            assert all(r["sup_distance"] <= 1e-12 for r in rep.rows)

    def test_mc_track(self):
        d = ExponentDescriptor.semistable(1.0, 0.5, 0.0)
        rep = run_pga_experiment(d, mc=MonteCarlo(samples=20_000, seed=1))
        assert rep.passed and rep.metrics["ks"] < 0.02

    def test_rejects_stable(self):
        with pytest.raises(ValueError):
            run_pga_experiment(CAUCHY)


class TestDuality:
    @pytest.mark.parametrize("desc", [GAUSS, CAUCHY], ids=["gaussian", "stable"])
    @pytest.mark.parametrize("a", [2.0, 2.5])
    def test_exact(self, desc, a):
        rep = run_duality_experiment(desc, a)
        assert rep.passed and rep.metrics["prefix_agreement"]

    def test_integer_powers_zero(self):
        rep = run_duality_experiment(GAUSS, 2.0)
        assert max(r["sup_distance"] for r in rep.rows) <= 1e-12

    def test_stable_ratio(self):
        rep = run_duality_experiment(CAUCHY, 2.5)
        for track in ("classical", "geometric"):
            d = [r["sup_distance"] for r in rep.rows if r["track"] == track]
            ratio = (d[4] / d[-1]) ** (1.0 / (len(d) - 5))
            assert 2.5 * 0.75 <= ratio <= 2.5 * 1.25

    def test_errors(self):
        with pytest.raises(ValueError):
            run_duality_experiment(ExponentDescriptor.semistable(1.0, 0.5, 0.05), 2.0)
        with pytest.raises(ValueError):
            run_duality_experiment(GAUSS, 1.0)


class TestTransitivity:
    def test_linnik_chain(self):
        descs, scheds = linnik_chain()
        rep = run_transitivity_experiment(*descs, scheds)
        assert rep.passed
        f_g = [r["sup_distance"] for r in rep.rows if r["track"] == "F->G"]
        assert max(f_g) == 0.0

    def test_semistable_chain(self):
        descs, scheds = semistable_chain()
        assert check_admissible(descs[1]).admissible
        rep = run_transitivity_experiment(*descs, scheds)
        assert rep.passed

    def test_premise_unmet(self):
        # normalising a Cauchy exponent along the Gaussian scaling never converges
        s = AttractionSchedule.pga(2.0, 2 ** -0.5)
        rep = run_transitivity_experiment(CAUCHY, GAUSS, GAUSS, (s, s))
        assert rep.verdict == "inconclusive"
        assert any("premise unmet" in n for n in rep.notes)

    def test_non_increasing_counts(self):
        flat = AttractionSchedule.custom(lambda n: 0.5, lambda n: 1.0)
        with pytest.raises(ValueError):
            run_transitivity_experiment(CAUCHY, CAUCHY, CAUCHY, (flat, flat))


class TestReport:
    def test_csv_and_summary(self):
        rep = ExperimentReport("demo", "s", rows=[{"n": 1, "sup_distance": 0.5, "ks": None,
                                                   "verdict": "pass", "k": 2}],
                               verdict="pass", metrics={"m": 1.5, "flag": True})
        csv = rep.to_csv(["seed = 1"])
        assert csv.splitlines() == ["# seed = 1", "n,sup_distance,ks,verdict,k",
                                    "1,0.5,,pass,2"]
        text = rep.summary()
        assert "verdict: pass" in text and "m: 1.5" in text and "flag: true" in text

    def test_exact_tracks_reproducible(self):
        a = run_pga_experiment(ExponentDescriptor.semistable(1.0, 0.4, 0.05)).to_csv()
        b = run_pga_experiment(ExponentDescriptor.semistable(1.0, 0.4, 0.05)).to_csv()
        assert a == b

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gidlab.cf_core import (DEFAULT_GRID, CharFn, ExponentDescriptor, ExponentKind,
                            ExponentSum, GridSpec, PoleError, check_admissible,
                            check_charfn, eval_exponent, geometric_compound_cf,
                            gid_necessary_check, gss_fixed_point_residual, gv_invert,
                            gv_transform, id_cf, linnik_cf, order_collapse_check,
                            psd_witness_search, scaled_exponent,
                            semilaplace_scaling_residual, semistable_epsilon_max, un_cf)

GAUSS = ExponentDescriptor.gaussian(0.5)
CAUCHY = ExponentDescriptor.stable(1.0)
SEMI = ExponentDescriptor.semistable(1.0, 0.5, 0.05)

DESCRIPTORS = [
    GAUSS, CAUCHY, ExponentDescriptor.stable(0.5, 2.0), ExponentDescriptor.stable(1.5),
    SEMI, ExponentDescriptor.semistable(1.5, 0.4, 0.1, 0.7),
    ExponentDescriptor.semistable(0.5, 0.25, 0.0),
]


def normal_cf():
    return id_cf(ExponentDescriptor.gaussian(0.5))


class TestDescriptor:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExponentDescriptor.stable(0.0)
        with pytest.raises(ValueError):
            ExponentDescriptor.stable(2.5)
        with pytest.raises(ValueError):
            ExponentDescriptor.stable(1.0, c=0.0)
        with pytest.raises(ValueError):
            ExponentDescriptor(ExponentKind.GAUSSIAN, 1.5, 1.0)
        with pytest.raises(ValueError):
            ExponentDescriptor.semistable(1.0, 1.2)
        with pytest.raises(ValueError):
            ExponentDescriptor.semistable(1.0, 0.5, 0.2)
        with pytest.raises(ValueError):
            ExponentDescriptor(ExponentKind.STABLE, 1.0, 1.0, order_b=0.5)

    def test_multiplier_must_match_order(self):
        d = ExponentDescriptor.semistable(1.0, 0.5, 0.05, a=2.0)
        assert d.multiplier_a == 2.0
        with pytest.raises(ValueError):
            ExponentDescriptor.semistable(1.0, 0.5, 0.05, a=2.0 + 1e-9)
        assert ExponentDescriptor.semistable(1.0, 0.4).multiplier_a == pytest.approx(2.5, abs=1e-12)

    def test_period_and_describe(self):
        assert SEMI.period == pytest.approx(math.log(2.0))
        assert CAUCHY.period is None
        assert "semistable" in SEMI.describe()


class TestEvalExponent:
    def test_examples(self):
        assert eval_exponent(GAUSS, math.sqrt(2.0)) == pytest.approx(1.0, abs=1e-15)
        assert eval_exponent(SEMI, 1.0) == pytest.approx(1.05, abs=1e-15)
        for d in DESCRIPTORS:
            assert eval_exponent(d, 0.0) == 0.0

    def test_real_and_nonnegative(self):
        t = DEFAULT_GRID.points(SEMI.period)
        for d in DESCRIPTORS:
            g = eval_exponent(d, t)
            assert np.all(g.imag == 0) and np.all(g.real >= 0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            eval_exponent(CAUCHY, math.inf)
        with pytest.raises(ValueError):
            eval_exponent(CAUCHY, np.array([0.0, math.nan]))

    def test_exponent_sum(self):
        s = ExponentSum((CAUCHY, GAUSS))
        t = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(eval_exponent(s, t), np.abs(t) + 0.5 * t**2, atol=1e-14)
        assert eval_exponent(scaled_exponent(s, 2.0), 1.0) == pytest.approx(3.0)


class TestTransforms:
    def test_gv_examples(self):
        assert gv_transform(GAUSS)(math.sqrt(2.0)) == pytest.approx(0.5, abs=1e-15)
        assert gv_transform(CAUCHY)(1.0) == pytest.approx(0.5, abs=1e-15)
        for d in DESCRIPTORS:
            assert gv_transform(d)(0.0) == 1.0
            assert id_cf(d)(0.0) == 1.0

    def test_id_examples(self):
        assert id_cf(GAUSS)(1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
        assert id_cf(CAUCHY)(2.0) == pytest.approx(math.exp(-2.0), abs=1e-15)

    def test_invert_examples(self):
        one = CharFn(lambda t: np.ones_like(t) + 0j)
        assert gv_invert(one, 1.3) == 0.0
        assert gv_invert(gv_transform(GAUSS), math.sqrt(2.0)) == pytest.approx(1.0, abs=1e-15)
        two_thirds = CharFn(lambda t: np.full_like(t, 2.0 / 3.0) + 0j)
        assert gv_invert(two_thirds, 0.4) == pytest.approx(0.5, abs=1e-15)

    def test_invert_pole(self):
        zero = CharFn(lambda t: np.zeros_like(t) + 0j)
        with pytest.raises(PoleError):
            gv_invert(zero, 1.0)

    @pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d.describe())
    def test_round_trip(self, desc):
        t = DEFAULT_GRID.points(desc.period)
        err = np.abs(gv_invert(gv_transform(desc), t) - eval_exponent(desc, t))
        assert err.max() <= 1e-12 * max(1.0, np.abs(eval_exponent(desc, t)).max())

    @pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d.describe())
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_compounding_identity(self, desc, p):
        t = DEFAULT_GRID.points(desc.period)
        lhs = geometric_compound_cf(p, gv_transform(desc))(t)
        rhs = gv_transform(scaled_exponent(desc, 1.0 / p))(t)
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_compound_examples(self):
        lap = linnik_cf(2.0)
        t = np.linspace(-5, 5, 11)
        np.testing.assert_array_equal(geometric_compound_cf(1.0, lap)(t), lap(t))
        assert geometric_compound_cf(0.25, lap)(1.0) == pytest.approx(0.2, abs=1e-15)
        assert geometric_compound_cf(0.5, lap)(0.0) == 1.0

    def test_compound_rejects_bad_p(self):
        with pytest.raises(ValueError):
            geometric_compound_cf(0.0, linnik_cf(1.0))
        with pytest.raises(ValueError):
            geometric_compound_cf(1.5, linnik_cf(1.0))

    def test_compound_pole(self):
        # not a c.f.: 1 - phi = -p/q makes the denominator vanish
        fake = CharFn(lambda t: np.full_like(t, 2.0) + 0j,
                      complement=lambda t: np.full_like(t, -1.0) + 0j)
        with pytest.raises(PoleError):
            geometric_compound_cf(0.5, fake)(1.0)

    @pytest.mark.parametrize("desc", DESCRIPTORS, ids=lambda d: d.describe())
    def test_charfn_invariants(self, desc):
        t = DEFAULT_GRID.points(desc.period)
        for phi in (gv_transform(desc), id_cf(desc), un_cf(desc, 7),
                    geometric_compound_cf(0.3, gv_transform(desc))):
            check_charfn(phi, t)

    def test_check_charfn_catches_violations(self):
        with pytest.raises(AssertionError):
            check_charfn(CharFn(lambda t: 2.0 * np.cos(t) + 0j), [0.0, 1.0])
        with pytest.raises(AssertionError):
            check_charfn(CharFn(lambda t: np.exp(-t * t) + 0.1j * np.sin(t) ** 2), [0.5])


class TestUnCf:
    def test_single_summand(self):
        t = np.linspace(-4, 4, 17)
        for d in DESCRIPTORS:
            np.testing.assert_allclose(un_cf(d, 1)(t), id_cf(d)(t), rtol=0, atol=1e-15)

    def test_unit_at_zero(self):
        for n in (1, 10, 1000, 10**6):
            assert un_cf(CAUCHY, n)(0.0) == 1.0

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            un_cf(CAUCHY, 0)
        with pytest.raises(ValueError):
            un_cf(CAUCHY, 2.5)

    # 50-digit evaluation of p e^{-g p} / (1 - (1-p) e^{-g p}) at g = 1/2, p = 1/n
    UN_ORACLE = {10: 0.6610648193586416, 100: 0.6661106481485987,
                 1000: 0.6666111064814815, 10**4: 0.6666611110648148,
                 10**5: 0.6666661111106481}

    @pytest.mark.parametrize("n", sorted(UN_ORACLE))
    def test_against_high_precision(self, n):
        v = un_cf(GAUSS, n)(1.0)  # g(1) = 1/2
        assert abs(v - self.UN_ORACLE[n]) <= 1e-15
        assert abs(v - 2.0 / 3.0) < 0.06 / n

    def test_mpmath_closed_form(self):
        mp.mp.dps = 40
        for n in (13, 250, 7919):
            for t in (0.3, 2.0, 7.5):
                g = mp.mpf(t) ** 2 / 2
                p = mp.mpf(1) / n
                e = mp.exp(-g * p)
                ref = p * e / (1 - (1 - p) * e)
                assert abs(un_cf(GAUSS, n)(t) - float(ref)) <= 1e-14

    @pytest.mark.parametrize("desc", [GAUSS, CAUCHY, SEMI], ids=lambda d: d.describe())
    def test_first_order_rate(self, desc):
        limit = gv_transform(desc)
        t = DEFAULT_GRID.points(desc.period)
        errs = {n: np.abs(un_cf(desc, n)(t) - limit(t)).max()
                for n in (10, 20, 100, 200, 1000, 2000, 10**4, 2 * 10**4)}
        seq = [errs[n] for n in (10, 100, 1000, 10**4)]
        assert all(b <= a for a, b in zip(seq, seq[1:]))
        for n in (10, 100, 1000, 10**4):
            assert 1.8 <= errs[n] / errs[2 * n] <= 2.2


class TestResiduals:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_gss_fixed_point(self, alpha, p):
        assert gss_fixed_point_residual(alpha, p, DEFAULT_GRID) <= 1e-12

    def test_gss_worked_example(self):
        assert gss_fixed_point_residual(2.0, 0.25, [1.0]) == 0.0
        assert gss_fixed_point_residual(1.0, 0.5, GridSpec(step=0.1)) <= 1e-12

    @pytest.mark.parametrize("alpha", [1.0, 1.5])
    @pytest.mark.parametrize("b", [0.4, 0.5])
    @pytest.mark.parametrize("eps", [0.0, 0.05, 0.1])
    def test_semilaplace_scaling(self, alpha, b, eps):
        d = ExponentDescriptor.semistable(alpha, b, eps)
        assert semilaplace_scaling_residual(d, DEFAULT_GRID) <= 1e-12

    def test_collapse_pure_stable(self):
        d = ExponentDescriptor.semistable(1.0, 0.5, 0.0)
        for b2 in (0.25, 0.3, 1 / math.e):
            assert order_collapse_check(d, b2, DEFAULT_GRID).collapses

    def test_collapse_rational_orders(self):
        assert order_collapse_check(SEMI, 0.25, DEFAULT_GRID).collapses

    def test_collapse_irrational_order(self):
        rep = order_collapse_check(SEMI, 1 / math.e, DEFAULT_GRID)
        assert not rep.collapses
        # independent sup over the 401-point grid
        mp.mp.dps = 30

        def g(t):
            t = abs(mp.mpf(t))
            if t == 0:
                return mp.mpf(0)
            return t * (1 + mp.mpf("0.05") * mp.cos(2 * mp.pi * mp.log(t) / mp.log(2)))
        b2 = mp.e ** -1
        ref = max(abs(g(t) - g(b2 * t) / b2) for t in np.linspace(-10, 10, 401))
        assert float(ref) > 1e-3
        assert rep.residual_b2 >= float(ref) * (1 - 1e-9)

    def test_collapse_input_errors(self):
        with pytest.raises(ValueError):
            order_collapse_check(SEMI, 0.5, DEFAULT_GRID)
        with pytest.raises(ValueError):
            order_collapse_check(CAUCHY, 0.3, DEFAULT_GRID)


class TestGIDCheck:
    @pytest.mark.parametrize("phi", [linnik_cf(2.0), linnik_cf(1.0)], ids=["laplace", "linnik1"])
    def test_known_gid_laws_pass(self, phi):
        rep = gid_necessary_check(phi, [0.1, 0.5, 1.0, 2.0, 10.0], DEFAULT_GRID)
        assert rep.passed
        assert min(rep.min_eigenvalues.values()) >= -1e-8

    def test_constant_one(self):
        one = CharFn(lambda t: np.ones_like(t) + 0j)
        rep = gid_necessary_check(one, [1.0], np.linspace(-1, 1, 5))
        assert rep.passed and rep.min_eigenvalues[1.0] == pytest.approx(0.0, abs=1e-12)

    def test_pole_is_input_error(self):
        with pytest.raises(ValueError):
            gid_necessary_check(normal_cf(), [1.0], DEFAULT_GRID)

    def test_bad_r(self):
        with pytest.raises(ValueError):
            gid_necessary_check(linnik_cf(1.0), [0.0], [0.0, 1.0, 2.0])

    def test_normal_witness_search(self):
        rep = psd_witness_search(normal_cf())
        assert rep.found
        r, step, size, eig = rep.best
        # the witness is reproducible from its coordinates
        t = (np.arange(size) - (size - 1) / 2) * step
        again = gid_necessary_check(normal_cf(), [r], t)
        assert again.min_eigenvalues[r] == eig < -1e-8

    def test_witness_search_quiet_on_laplace(self):
        rep = psd_witness_search(linnik_cf(2.0))
        assert not rep.found and rep.skipped == 0


class TestAdmissibility:
    # |C(alpha - iw)| / C(alpha), C(s) = -Gamma(-s) cos(pi s / 2), evaluated in mpmath
    ORACLE = {(1.0, 0.5): 0.02905907035147468, (0.5, 0.4): 0.07272303056643625,
              (1.5, 0.25): 0.03445213587012346, (1.0, 0.4): 0.043969400424117726,
              (1.9, 0.8): 7.548510575327444e-05}

    @pytest.mark.parametrize("key", sorted(ORACLE))
    def test_epsilon_max(self, key):
        assert semistable_epsilon_max(*key) == pytest.approx(self.ORACLE[key], rel=1e-12)

    def test_epsilon_max_mpmath(self):
        mp.mp.dps = 30
        for alpha, b in ((0.3, 0.6), (1.2, 0.1), (1.7, 0.35)):
            w = 2 * mp.pi / mp.log(1 / mp.mpf(b))
            c = lambda s: -mp.gamma(-s) * mp.cos(mp.pi * s / 2)  # noqa: E731
            ref = abs(c(mp.mpf(alpha) - 1j * w)) / abs(c(mp.mpf(alpha)))
            assert semistable_epsilon_max(alpha, b) == pytest.approx(float(ref), rel=1e-12)

    def test_gaussian_has_no_room(self):
        assert semistable_epsilon_max(2.0, 0.5) == 0.0

    def test_grid_check_agrees_with_bound(self):
        inside = check_admissible(ExponentDescriptor.semistable(0.5, 0.5, 0.05))
        assert inside.admissible and inside.grid_check.passed
        outside = check_admissible(ExponentDescriptor.semistable(1.0, 0.5, 0.1))
        assert not outside.admissible and not outside.grid_check.passed

    def test_grid_check_is_only_necessary(self):
        rep = check_admissible(ExponentDescriptor.semistable(1.0, 0.4, 0.05))
        assert not rep.admissible and rep.grid_check.passed


class TestGridSpec:
    def test_default(self):
        t = DEFAULT_GRID.points()
        assert t.size == 401 and t[0] == -10.0 and t[-1] == 10.0 and 0.0 in t

    def test_log_subgrid(self):
        t = DEFAULT_GRID.points(SEMI.period)
        assert t.size > 401 and np.all(np.diff(t) > 0)
        assert np.all(np.abs(t) <= 10.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(1.0, 0.0)
        with pytest.raises(ValueError):
            GridSpec(step=0.0)
        with pytest.raises(ValueError):
            GridSpec(0.0, 0.1, 0.1)


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.05, 2.0), c=st.floats(0.01, 20.0), t=finite,
       p=st.floats(1e-6, 1.0))
def test_property_stable_algebra(alpha, c, t, p):
    d = ExponentDescriptor.stable(alpha, c)
    phi = gv_transform(d)
    v = phi(t)
    assert abs(v) <= 1.0 + 1e-12
    assert phi(-t) == pytest.approx(np.conj(v), abs=1e-12)
    lhs = geometric_compound_cf(p, phi)(t)
    rhs = gv_transform(scaled_exponent(d, 1.0 / p))(t)
    assert abs(lhs - rhs) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.1, 2.0), b=st.floats(0.05, 0.95), eps=st.floats(0.0, 0.1),
       t=st.floats(-1e3, 1e3, allow_nan=False))
def test_property_semistable_scaling(alpha, b, eps, t):
    d = ExponentDescriptor.semistable(alpha, b, eps)
    g = eval_exponent(d, t).real
    assert g >= 0.0
    assert abs(g - d.multiplier_a * eval_exponent(d, b * t).real) <= 1e-12 * max(1.0, g)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bisect_final_size, central_diff
from pgl import (
    Allocation,
    DegenerateError,
    GameParams,
    altruistic_ess_threshold,
    altruistic_stability_interval,
    check_ess,
    enumerate_uniform_ess,
    max_selfish_support,
)

GRID = [GameParams(r0, eta, c) for r0 in (0.5, 1, 2, 4) for eta in (0.001, 0.01, 0.1, 0.5)
        for c in (0.01, 0.1, 1, 5)]


class TestCheckEss:
    @pytest.mark.parametrize("params", GRID)
    def test_max_density_is_selfish_ess(self, params):
        assert check_ess(Allocation([1.0]), "selfish", params).verdict

    def test_max_density_not_altruistic(self, base):
        report = check_ess(Allocation([1.0]), "altruistic", base)
        assert not report.verdict
        assert [v.kind for v in report.violations] == ["profitable_deviation"]

    def test_disease_free_nash_but_unstable(self):
        for c in (0.01, 1, 5):
            report = check_ess(Allocation.uniform(10), "selfish", GameParams.disease_free(2, c))
            assert report.is_nash and not report.is_stable and not report.verdict
            assert {v.kind for v in report.violations} == {"nonpositive_gradient"}

    def test_cost_mismatch(self, base):
        report = check_ess(Allocation([0.6, 0.4]), "selfish", base)
        assert not report.is_nash
        assert report.violations[0].kind == "cost_mismatch"

    def test_zero_gradient_is_not_stable(self, base):
        # huge strictness epsilon turns every gradient into a failure
        report = check_ess(Allocation.uniform(2), "selfish", base, grad_atol=1e6)
        assert not report.is_stable

    def test_single_location_needs_no_gradient(self):
        report = check_ess(Allocation([1.0]), "selfish", GameParams(2, 1, 1))
        assert report.is_stable

    def test_measure_zero_location_switches_on_stability_test(self, base):
        # |N(x)| = 2, so the gradient condition now applies at x = 1
        alone = check_ess(Allocation([1.0]), "selfish", GameParams(2, 1, 1))
        paired = check_ess(Allocation([1.0, 0.0]), "selfish", GameParams(2, 1, 1))
        assert alone.verdict and not paired.verdict

    def test_sufficient_condition_gives_altruistic_ess(self):
        p = GameParams(2, 0.1, 0.3)
        a = altruistic_stability_interval(p)
        for n in range(1, 300):
            x = 1 / n
            r1 = (lambda r: (1 - 0.9 * math.exp(-2 * r)) / (1 - x * 2 * 0.9 * math.exp(-2 * r)))(
                bisect_final_size(x, 2, 0.1))
            if x < a and r1 <= p.c + p.eta:
                assert check_ess(Allocation.uniform(n), "altruistic", p).verdict


class TestEnumerate:
    @pytest.mark.parametrize("params", GRID[::5])
    @pytest.mark.parametrize("population", ["selfish", "altruistic"])
    def test_consistent_with_check_ess(self, params, population):
        found = {r.support_size for r in enumerate_uniform_ess(params, population, 60)}
        for n in range(1, 61):
            assert (n in found) == check_ess(Allocation.uniform(n), population, params).verdict

    def test_records(self, base):
        for rec in enumerate_uniform_ess(base, "altruistic", 300):
            assert rec.support_size * rec.density == pytest.approx(1, abs=1e-12)
            if rec.support_size > 1:
                assert rec.stability_margin > 0
            assert rec.location_cost <= base.c + base.eta + 1e-9

    @pytest.mark.parametrize("params", GRID)
    def test_selfish_contains_one_and_respects_bound(self, params):
        sizes = [r.support_size for r in enumerate_uniform_ess(params, "selfish", 200)]
        assert sizes[0] == 1
        assert max(sizes) <= max_selfish_support(params).m_g

    def test_altruistic_tail_is_complete(self, base):
        n0 = altruistic_ess_threshold(base)
        sizes = [r.support_size for r in enumerate_uniform_ess(base, "altruistic", 500)]
        assert set(range(n0, 501)) <= set(sizes)
        assert 1 not in sizes
        more = enumerate_uniform_ess(base, "altruistic", 1000)
        assert len(more) > len(sizes)

    def test_ordered_by_n(self, base):
        sizes = [r.support_size for r in enumerate_uniform_ess(base, "altruistic", 100)]
        assert sizes == sorted(sizes)

    def test_rejects_bad_n_max(self, base):
        with pytest.raises(ValueError):
            enumerate_uniform_ess(base, "selfish", 0)


class TestMaxSelfishSupport:
    def test_no_disease_gradient(self):
        bound = max_selfish_support(GameParams(2, 1, 1))
        assert bound.m_g == 1 and math.isnan(bound.x_bar)

    def test_sign_scan_oracle(self, base):
        # dense sign scan + bisection on a finite-difference derivative of the bisection oracle
        def deriv(x):
            return -0.05 / x**2 + central_diff(lambda t: bisect_final_size(t, 2, 0.01) / t, x, 1e-6)

        grid = np.geomspace(1e-3, 1, 2000)
        k = next(i for i in range(len(grid) - 1) if deriv(grid[i]) < 0 <= deriv(grid[i + 1]))
        lo, hi = grid[k], grid[k + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if deriv(mid) < 0 else (lo, mid)
        bound = max_selfish_support(base)
        assert bound.x_bar == pytest.approx(0.39206199, abs=1e-6)
        assert bound.x_bar == pytest.approx(lo, abs=1e-6)
        assert bound.m_g == 2


class TestStabilityInterval:
    def test_positive(self):
        assert altruistic_stability_interval(GameParams(2, 0.1, 1)) > 0

    def test_degenerate(self):
        with pytest.raises(DegenerateError):
            altruistic_stability_interval(GameParams(2, 1, 1))

    @settings(max_examples=30, deadline=None)
    @given(r0=st.sampled_from([0.5, 1, 2, 4, 8]), eta=st.floats(1e-3, 0.9))
    def test_curvature_positive_inside(self, r0, eta):
        from pgl.game import altruistic_cost_derivative

        p = GameParams(r0, eta, 1)
        a = altruistic_stability_interval(p)
        x = np.linspace(0, a, 200)[1:-1]
        assert np.all(np.asarray(altruistic_cost_derivative(x, p)) > 0)
        if a < 1:
            assert altruistic_cost_derivative(min(1.0, a + 1e-6), p) <= 1e-6

"""Tail-bound calculators and the horizon union-bound table."""

import math

import numpy as np
import pytest

from kremoval.tail_bounds import (
    azuma_bound,
    bohman_bound,
    chernoff_bound,
    union_bound_at_horizon,
)
from kremoval.trajectory import TrajectoryParams, beta


class TestAzuma:
    def test_substitution(self):
        assert azuma_bound(10, [1.0] * 100) == pytest.approx(math.exp(-0.5), rel=1e-9)

    def test_small_a_limit(self):
        assert azuma_bound(1e-9, [1.0] * 10) == pytest.approx(1.0)

    def test_doubling_a_fourth_power(self):
        c = [0.5] * 37
        assert azuma_bound(6, c) == pytest.approx(azuma_bound(3, c) ** 4, rel=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            azuma_bound(0, [1.0])
        with pytest.raises(ValueError):
            azuma_bound(1, [])
        with pytest.raises(ValueError):
            azuma_bound(1, [1.0, -0.1])


class TestBohman:
    def test_substitution(self):
        assert bohman_bound(10, 100, 0.5, 10) == pytest.approx(math.exp(-1 / 15), rel=1e-9)

    def test_hypothesis_boundary(self):
        with pytest.raises(ValueError):
            bohman_bound(50, 100, 0.5, 10)  # a = eta * l
        with pytest.raises(ValueError):
            bohman_bound(1, 100, 2.0, 10)  # eta > N/10

    def test_monotone_in_a(self):
        vals = [bohman_bound(a, 100, 0.5, 10) for a in (1, 5, 20, 49)]
        assert vals == sorted(vals, reverse=True)


class TestChernoff:
    def test_substitution(self):
        assert chernoff_bound(100, 0.5, 30) == pytest.approx(2 * math.exp(-6), rel=1e-9)

    def test_xi_at_np(self):
        assert chernoff_bound(100, 0.5, 50) == pytest.approx(2 * math.exp(-50 / 3), rel=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            chernoff_bound(100, 0.5, 0)
        with pytest.raises(ValueError):
            chernoff_bound(100, 0.5, 51)

    def test_monte_carlo_never_exceeds_bound(self):
        rng = np.random.Generator(np.random.PCG64(20240817))
        draws = rng.binomial(100, 0.5, size=100_000)
        for xi in (10, 20, 30):
            freq = float(np.mean(np.abs(draws - 50) > xi))
            assert freq <= chernoff_bound(100, 0.5, xi)


class TestBoundsRange:
    def test_all_bounds_in_range(self):
        assert 0 < azuma_bound(3, [1.0] * 7) <= 2
        assert 0 < bohman_bound(3, 100, 0.5, 10) <= 2
        assert 0 < chernoff_bound(50, 0.4, 5) <= 2


class TestUnionBound:
    def test_increasing_in_m_and_dominant(self):
        p = TrajectoryParams(k=4, n=10**6)
        ub = union_bound_at_horizon(p)
        assert ub.increasing_in_m
        assert ub.dominant_m == 3
        logs = [t.log_term for t in ub.terms]
        assert logs == sorted(logs)

    def test_analytic_exponent_matches_beta(self):
        p = TrajectoryParams(k=5, n=10**6)
        ub = union_bound_at_horizon(p)
        for t in ub.terms:
            assert t.analytic_exponent == pytest.approx(beta(5, t.m), abs=1e-12)

    def test_total_decreases_along_n_grid(self):
        prev = math.inf
        for n in (10**4, 10**5, 10**6, 10**7, 10**8):
            ub = union_bound_at_horizon(TrajectoryParams(k=4, n=n))
            assert ub.log_total < prev
            prev = ub.log_total

    def test_constant_c_scales_exponent(self):
        p = TrajectoryParams(k=4, n=10**6)
        base = union_bound_at_horizon(p, constant_c=1.0)
        half = union_bound_at_horizon(p, constant_c=0.5)
        for t1, t05 in zip(base.terms, half.terms):
            e1 = math.log(2 * math.comb(10**6, t1.m)) - t1.log_term
            e05 = math.log(2 * math.comb(10**6, t05.m)) - t05.log_term
            assert e05 == pytest.approx(e1 / 2, rel=1e-9)
        with pytest.raises(ValueError):
            union_bound_at_horizon(p, constant_c=0)

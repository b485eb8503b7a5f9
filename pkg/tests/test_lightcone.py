"""Truncation-error formula, radius scan and budget-splitting tests."""

import math

import numpy as np
import pytest

from qmv.errors import InfeasibleError
from qmv.lightcone import ErrorBudget, lr_error, max_ball_size, min_radius, split_budget


def closed_form_oracle(radius, horizon, g, degree, region_size, obs_norm):
    """Independent evaluation: plain powers instead of the exp/log route."""
    x = 4.0 * g * horizon * (degree - 1)
    return (math.sqrt(2.0 / math.pi) * region_size * obs_norm
            * (x / radius) ** radius / math.sqrt(radius))


def test_lr_error_zero_time_limit():
    assert lr_error(3, 0.0, 1.0, 4) == 0.0
    assert lr_error(3, -1.0, 1.0, 4) == 0.0
    # Also continuous: tiny horizons give tiny values.
    assert lr_error(3, 1e-12, 1.0, 4) < 1e-30


def test_lr_error_reference_value():
    # 4 g T (degree-1) = 1, L = 4: sqrt(2/pi) * 4^-4.5 = 1.5583...e-3.
    expected = math.sqrt(2.0 / math.pi) / 512.0
    assert expected == pytest.approx(1.558e-3, rel=1e-3)
    for g, horizon, degree in ((0.25, 1.0, 2), (1.0 / 12.0, 1.0, 4), (0.125, 2.0, 2)):
        got = lr_error(4, horizon, g, degree, 1, 1.0)
        assert got == pytest.approx(expected, rel=1e-12)


def test_lr_error_linear_in_region_size_and_norm():
    base = lr_error(3, 0.5, 0.8, 4, 1, 1.0)
    assert lr_error(3, 0.5, 0.8, 4, 2, 1.0) == pytest.approx(2 * base, rel=1e-12)
    assert lr_error(3, 0.5, 0.8, 4, 1, 0.5) == pytest.approx(base / 2, rel=1e-12)


def test_lr_error_matches_closed_form_on_grid():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        radius = int(rng.integers(1, 12))
        horizon = float(rng.uniform(0.01, 2.0))
        g = float(rng.uniform(0.01, 2.0))
        degree = int(rng.integers(2, 5))
        size = int(rng.integers(1, 4))
        norm = float(rng.uniform(0.1, 1.0))
        got = lr_error(radius, horizon, g, degree, size, norm)
        want = closed_form_oracle(radius, horizon, g, degree, size, norm)
        assert got == pytest.approx(want, rel=1e-12)


def test_lr_error_decreasing_beyond_the_hump():
    for g, horizon, degree in ((0.5, 0.5, 4), (1.0, 0.8, 4), (0.2, 2.0, 3)):
        x = 4 * g * horizon * (degree - 1)
        start = max(1, int(math.ceil(x * math.e)) + 1)
        vals = [lr_error(radius, horizon, g, degree) for radius in range(start, start + 8)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_lr_error_scales_as_horizon_power_radius():
    radius = 5
    t1, t2 = 0.2, 0.4
    ratio = lr_error(radius, t2, 0.7, 4) / lr_error(radius, t1, 0.7, 4)
    assert ratio == pytest.approx((t2 / t1) ** radius, rel=1e-10)


def test_min_radius_huge_budget_returns_one():
    assert min_radius(0.5, 1.0, 4, 100, 1e6, m_cap=200) == 1


def test_min_radius_is_minimal_by_exhaustive_scan():
    horizon, g, degree, n = 0.25, 1.0, 4, 16
    budget = 1e-3
    got = min_radius(horizon, g, degree, n, budget, m_cap=400)
    assert n * lr_error(got, horizon, g, degree) <= budget
    for smaller in range(1, got):
        assert n * lr_error(smaller, horizon, g, degree) > budget


def test_min_radius_cap_binding_raises():
    # Cap of 5 qubits forces radius 1; make the budget unreachable there.
    with pytest.raises(InfeasibleError):
        min_radius(0.25, 1.0, 4, 16, 1e-9, m_cap=5)
    with pytest.raises(InfeasibleError):
        min_radius(0.25, 1.0, 4, 16, 1e-3, m_cap=4)  # not even radius 1 fits


def test_min_radius_monotone_in_budget():
    horizon, g, degree, n = 0.3, 0.8, 4, 36
    budgets = [10.0, 1.0, 1e-2, 1e-4, 1e-6]
    radii = [min_radius(horizon, g, degree, n, b, m_cap=1000) for b in budgets]
    assert radii == sorted(radii)


def test_max_ball_size_formula():
    assert [max_ball_size(radius) for radius in (1, 2, 3)] == [5, 13, 25]


def test_split_budget_even_split():
    budget = split_budget(0.1, 16)
    assert budget.eps_lr_total == pytest.approx(0.05)
    assert budget.eps_cs_total == pytest.approx(0.05)
    assert budget.eps_ssc == 0.0
    assert budget.per_site_lr == pytest.approx(0.003125)
    assert budget.eps_lr_total + budget.eps_cs_total + budget.eps_ssc <= budget.delta_total + 1e-15


def test_split_budget_rejects_bad_inputs():
    with pytest.raises(ValueError):
        split_budget(0.0, 4)
    with pytest.raises(ValueError):
        split_budget(0.1, 0)
    with pytest.raises(ValueError):
        split_budget(0.1, 4, lr_fraction=1.0)


def test_split_budget_custom_fraction():
    budget = split_budget(0.2, 10, lr_fraction=0.25)
    assert budget.eps_lr_total == pytest.approx(0.05)
    assert budget.eps_cs_total == pytest.approx(0.15)
    assert isinstance(budget, ErrorBudget)

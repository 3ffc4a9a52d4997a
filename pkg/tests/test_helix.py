import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgcycles.errors import DivergenceError, DomainError
from kgcycles.helix import (
    CapacityParams, capacity, koch2d_prefractal, koch2d_series, koch3d_series, max_iteration_ratio,
    phase_measure, prefractal_area,
)

from oracles import partial_sum, segments_intersect, shoelace_area


@pytest.mark.parametrize("n, expected", [(1, 1.0), (2, math.pi / 2), (3, math.pi / 2), (4, math.pi**2 / 8)])
def test_phase_measure(n, expected):
    assert phase_measure(n) == expected


@pytest.mark.parametrize("n", [0, 5, -1])
def test_phase_measure_domain(n):
    with pytest.raises(DomainError):
        phase_measure(n)


def test_koch2d_default_beta():
    res = koch2d_series(6.3, 40)
    assert res.closed_form == pytest.approx(3 / 1.3, rel=1e-15)
    assert round(res.closed_form, 4) == 2.3077
    assert round(res.total_factor, 4) == 3.3077
    assert res.converged


def test_koch2d_first_term():
    assert koch2d_series(6.3, 1).partial_sums == [pytest.approx(3 / 6.3)]
    assert round(3 / 6.3, 5) == 0.47619


def test_koch2d_beta_10():
    res = koch2d_series(10, 40)
    assert res.closed_form == pytest.approx(0.6, rel=1e-15)
    assert res.total_factor == pytest.approx(1.6)
    assert abs(res.partial_sums[-1] - 0.6) < 1e-10
    assert res.partial_sums[-1] == pytest.approx(partial_sum(0.3, 0.5, 40), rel=1e-14)


@pytest.mark.parametrize("beta", [5, 4.9, 0])
def test_koch2d_diverges(beta):
    with pytest.raises(DivergenceError):
        koch2d_series(beta, 10)


def test_koch3d_gamma_8():
    res = koch3d_series(8, 40)
    assert res.closed_form == 4.0
    assert res.total_factor == 5.0
    assert res.partial_sums[0] == 0.5
    assert abs(res.partial_sums[-1] - partial_sum(0.5, 7 / 8, 40)) < 1e-12


def test_koch3d_gamma_14():
    res = koch3d_series(14, 60)
    assert res.closed_form == pytest.approx(4 / 7, rel=1e-15)
    assert res.partial_sums[-1] == pytest.approx(4 / 7, rel=1e-12)


@pytest.mark.parametrize("gamma", [7, 6.99])
def test_koch3d_diverges(gamma):
    with pytest.raises(DivergenceError):
        koch3d_series(gamma, 10)


def test_capacity_ratios():
    p1 = capacity(CapacityParams(1.0, 1))
    p2 = capacity(CapacityParams(1.0, 2))
    p3 = capacity(CapacityParams(1.0, 3, beta=6.3))
    assert p2 == pytest.approx(math.pi / 2)
    assert p2 / p1 == pytest.approx(1.5708, abs=5e-5)
    assert p3 / p2 == pytest.approx(koch2d_series(6.3).total_factor, rel=1e-15)
    assert round(p3 / p2, 4) == 3.3077


def test_capacity_linear_in_mean_weight():
    assert capacity(CapacityParams(2.0, 2)) == pytest.approx(math.pi, rel=1e-15)


def test_capacity_params_validation():
    with pytest.raises(DivergenceError):
        CapacityParams(1.0, 3, beta=5)
    with pytest.raises(DivergenceError):
        CapacityParams(1.0, 4, gamma=7)
    with pytest.raises(DomainError):
        CapacityParams(0.0, 2)
    with pytest.raises(DomainError):
        CapacityParams(1.0, 5)


def test_max_iteration_ratio():
    assert max_iteration_ratio(3) == 0.2
    assert max_iteration_ratio(4) == 1 / 7
    with pytest.raises(DomainError):
        max_iteration_ratio(2)


@pytest.mark.parametrize("n, count", [(0, 3), (1, 12), (3, 192)])
def test_prefractal_vertex_count(n, count):
    assert len(koch2d_prefractal(n)) == count


@pytest.mark.parametrize("n", [-1, 9, 2.5])
def test_prefractal_domain(n):
    with pytest.raises(DomainError):
        koch2d_prefractal(n)


@pytest.mark.parametrize("n", range(7))
def test_prefractal_area_and_edges(n):
    pts = koch2d_prefractal(n)
    base = shoelace_area(koch2d_prefractal(0))
    assert shoelace_area(pts) / base == pytest.approx(prefractal_area(n), abs=1e-9)
    edges = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    np.testing.assert_allclose(edges, 3.0**-n, rtol=1e-9)


@pytest.mark.parametrize("n", range(4))
def test_prefractal_simple_loop(n):
    pts = koch2d_prefractal(n)
    m = len(pts)
    segs = [(pts[i], pts[(i + 1) % m]) for i in range(m)]
    for i in range(m):
        for j in range(i + 2, m):
            if i == 0 and j == m - 1:
                continue
            assert not segments_intersect(*segs[i], *segs[j])


@pytest.mark.parametrize("beta", [5.1, 6.3, 10, 100])
def test_truncation_bound_2d(beta):
    res = koch2d_series(beta, 60)
    r = 5 / beta
    for n, s in enumerate(res.partial_sums, start=1):
        assert abs(res.closed_form - s) <= res.first_term * r**n / (1 - r) * (1 + 1e-9) + 1e-15


@given(st.floats(5.01, 1e4), st.floats(0.01, 1e4))
def test_total_factor_decreasing_in_beta(beta, delta):
    assert koch2d_series(beta + delta, 1).total_factor < koch2d_series(beta, 1).total_factor


@given(st.floats(7.01, 1e4), st.floats(0.01, 1e4))
def test_total_factor_decreasing_in_gamma(gamma, delta):
    assert koch3d_series(gamma + delta, 1).total_factor < koch3d_series(gamma, 1).total_factor


def test_total_factor_blows_up_near_bound():
    assert koch2d_series(5 + 1e-9, 1).total_factor > 1e9
    assert koch3d_series(7 + 1e-9, 1).total_factor > 1e9


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.sampled_from([1, 2, 3, 4]))
def test_capacity_linearity(f, a, n):
    lhs = capacity(CapacityParams(a * f, n))
    assert lhs == pytest.approx(a * capacity(CapacityParams(f, n)), rel=1e-12)

import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgcycles.errors import DegenerateSegmentError, RangeError, SeriesDivisionError, SingularDesignError
from kgcycles.regimes import (
    EXCLUSIVE_RIGHT, LinearFit, Segment, analyze_regimes, duration_conventions, efficiency_ratios,
    fit_line, ols_fit, paper_segmentation, segments_from_breakpoints,
)
from kgcycles.series import PerCapitaSeries, load_bundled, per_million

from oracles import normal_equations_fit


def pcs(start, values):
    return PerCapitaSeries(np.arange(start, start + len(values)), np.asarray(values, dtype=float))


@pytest.fixture(scope="module")
def bundled():
    return per_million(*load_bundled())


def test_exact_line():
    fit = ols_fit(pcs(0, [1, 3, 5]), Segment(0, 2))
    assert fit.slope == pytest.approx(2.0, abs=1e-14)
    assert fit.intercept == pytest.approx(1.0, abs=1e-14)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.sse == pytest.approx(0.0, abs=1e-24)
    assert fit.n == 3


def test_constant_series():
    fit = ols_fit(pcs(1900, [0.1] * 7), Segment(1901, 1905))
    assert (fit.slope, fit.sse, fit.r_squared) == (0.0, 0.0, 0.0)


def test_five_point_noisy_matches_normal_equations():
    x = np.array([1990, 1991, 1992, 1993, 1994])
    y = np.array([10.3, 11.9, 14.2, 15.1, 18.4])
    fit = ols_fit(PerCapitaSeries(x, y), Segment(1990, 1994))
    slope, intercept = normal_equations_fit(x, y)
    assert fit.slope == pytest.approx(slope, rel=1e-10)
    assert fit.intercept == pytest.approx(intercept, rel=1e-10)


def test_segment_outside_coverage():
    with pytest.raises(RangeError):
        ols_fit(pcs(2000, [1, 2, 3]), Segment(1999, 2001))


def test_single_point_segment():
    with pytest.raises(DegenerateSegmentError):
        ols_fit(pcs(2000, [1, 2, 3]), Segment(2001, 2001))


def test_singular_design_guard():
    with pytest.raises(SingularDesignError):
        fit_line([3, 3, 3], [1, 2, 3])


def test_bundled_k2(bundled):
    fit = ols_fit(bundled, Segment(1945, 1980))
    assert fit.slope == pytest.approx(3.749, rel=0.15)


def test_paper_segmentation_full(bundled):
    segs = paper_segmentation(bundled)
    assert [(s.start_year, s.end_year) for s in segs] == [(1840, 1945), (1945, 1980), (1980, 2006), (2006, 2013)]
    assert [s.duration for s in segs] == [105, 35, 26, 7]


@pytest.mark.filterwarnings("ignore:period 3 truncated")
def test_paper_segmentation_clipped_end():
    s = pcs(1840, np.ones(161))
    with pytest.warns(UserWarning, match="period 4"):
        segs = paper_segmentation(s)
    assert len(segs) == 3 and segs[-1] == Segment(1980, 2000)


def test_paper_segmentation_truncated_start():
    s = pcs(1900, np.ones(114))
    with pytest.warns(UserWarning, match="truncated"):
        segs = paper_segmentation(s)
    assert segs[0] == Segment(1900, 1945)
    assert len(segs) == 4


def test_paper_segmentation_exclusive_right(bundled):
    segs = paper_segmentation(bundled, EXCLUSIVE_RIGHT)
    assert [(s.start_year, s.end_year) for s in segs] == [(1840, 1944), (1945, 1979), (1980, 2005), (2006, 2013)]


def test_paper_segmentation_full_coverage_no_warning(bundled):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        paper_segmentation(bundled)


def _fit(slope):
    return LinearFit(slope, 0.0, 1.0, 0.0, 10)


def test_efficiency_ratios_paper_slopes():
    r = efficiency_ratios([_fit(s) for s in (2.887, 3.749, 12.168, 74.09)])
    np.testing.assert_allclose(r, [1.2986, 3.2457, 6.0889], atol=5e-5)


@pytest.mark.parametrize("slopes, expected", [((5, 5), [1.0]), ((1, -2), [-2.0])])
def test_efficiency_ratios_trivial(slopes, expected):
    assert efficiency_ratios([_fit(s) for s in slopes]) == expected


def test_efficiency_ratio_zero_denominator():
    with pytest.raises(SeriesDivisionError, match="segment 2"):
        efficiency_ratios([_fit(1), _fit(0), _fit(3)])


def test_breakpoints_to_segments():
    assert segments_from_breakpoints(0, 20, [10]) == [Segment(0, 10), Segment(10, 20)]
    assert segments_from_breakpoints(0, 20, [10], EXCLUSIVE_RIGHT) == [Segment(0, 9), Segment(10, 20)]
    with pytest.raises(RangeError):
        segments_from_breakpoints(0, 20, [20])


def test_duration_conventions(bundled):
    conv = duration_conventions(paper_segmentation(bundled))
    assert conv["literal"]["durations"] == [105, 35, 26, 7]
    assert conv["paper_compat"]["durations"] == [105, 35, 25, 7]
    assert conv["paper_compat"]["ratios"][:2] == [35 / 105, 25 / 105]
    assert conv["literal"]["ratios"][:2] == [35 / 105, 26 / 35]


def test_analysis_serializes():
    ra = analyze_regimes(pcs(0, np.arange(20.0) ** 1.5), [Segment(0, 10), Segment(10, 19)])
    d = ra.to_dict()
    assert set(d) == {"segmentation", "fits", "ratios", "durations"}
    assert set(d["fits"][0]) == {"slope", "intercept", "r_squared", "sse", "n"}
    assert len(d["ratios"]) == len(d["fits"]) - 1


# properties

values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=60)


@given(values, st.integers(1800, 2100))
def test_residual_identities(y, start):
    y = np.asarray(y)
    x = np.arange(start, start + len(y), dtype=float)
    fit = fit_line(x, y)
    r = y - fit.predict(x)
    scale = np.sum(np.abs(y))
    assert abs(r.sum()) <= 1e-9 * scale
    assert abs((x * r).sum()) <= 1e-9 * scale


@given(values, st.floats(-1e3, 1e3))
def test_shift_invariance(y, c):
    y = np.asarray(y)
    x = np.arange(1900, 1900 + len(y), dtype=float)
    a, b = fit_line(x, y), fit_line(x, y + c)
    # absolute floor: rounding of y + c is of order eps * |c|
    floor = 1e-14 * (np.abs(y).max() + abs(c))
    assert b.slope == pytest.approx(a.slope, rel=1e-12, abs=floor)
    assert b.intercept == pytest.approx(a.intercept + c, rel=1e-9, abs=1e-6)


@given(values, st.floats(0.01, 100))
def test_scale_equivariance(y, a):
    y = np.asarray(y)
    x = np.arange(1900, 1900 + len(y), dtype=float)
    s0, s1 = fit_line(x, y).slope, fit_line(x, a * y).slope
    assert s1 == pytest.approx(a * s0, rel=1e-12, abs=1e-12)

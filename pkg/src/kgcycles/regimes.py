"""Per-regime linear trends and slope ratios ("efficiencies") of a per-capita series."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateSegmentError, RangeError, SeriesDivisionError, SingularDesignError

#: Boundary years of the four knowledge-generating cycles, 1840-1945-1980-2006-.
PAPER_BOUNDARIES = (1840, 1945, 1980, 2006)
#: Cycle durations (years) as printed for the first three periods.
PAPER_DURATIONS = (105, 35, 25)

SHARED = "shared"
EXCLUSIVE_RIGHT = "exclusive-right"
BOUNDARY_POLICIES = (SHARED, EXCLUSIVE_RIGHT)


@dataclass(frozen=True)
class Segment:
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise ValueError(f"segment start {self.start_year} after end {self.end_year}")

    @property
    def duration(self):
        return self.end_year - self.start_year

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float
    sse: float
    n: int

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RegimeAnalysis:
    segmentation: list
    fits: list
    ratios: list
    durations: list

    def to_dict(self):
        return {
            "segmentation": [s.to_dict() for s in self.segmentation],
            "fits": [f.to_dict() for f in self.fits],
            "ratios": list(self.ratios),
            "durations": list(self.durations),
        }


def fit_line(x, y):
    """Least-squares line of ``y`` on ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 2:
        raise DegenerateSegmentError(f"need at least 2 points for a line, got {n}")
    xm = x.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise SingularDesignError("all regressor values are identical")
    if np.all(y == y[0]):
        return LinearFit(0.0, float(y[0]), 0.0, 0.0, n)
    ym = y.mean()
    dy = y - ym
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    sse = float(resid @ resid)
    sst = float(dy @ dy)
    # sst can still underflow to 0 for non-constant subnormal y
    r2 = min(max(1.0 - sse / sst, 0.0), 1.0) if sst > 0 else 0.0
    return LinearFit(slope, intercept, r2, sse, n)


def ols_fit(series, segment):
    """Fit value against calendar year over ``segment`` (inclusive)."""
    if segment.start_year < series.first_year or segment.end_year > series.last_year:
        raise RangeError(
            f"segment {segment.start_year}-{segment.end_year} outside coverage "
            f"{series.first_year}-{series.last_year}"
        )
    x, y = series.between(segment.start_year, segment.end_year)
    if len(x) < 2:
        raise DegenerateSegmentError(
            f"segment {segment.start_year}-{segment.end_year} has {len(x)} point(s)"
        )
    return fit_line(x, y)


def segments_from_breakpoints(first, last, breakpoints, policy=SHARED):
    """Turn interior breakpoint years into consecutive segments.

    With the shared policy a breakpoint closes one segment and opens the
    next; with exclusive-right it belongs to the later segment only.
    """
    if policy not in BOUNDARY_POLICIES:
        raise ValueError(f"unknown boundary policy {policy!r}")
    edges = [first, *breakpoints, last]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise RangeError(f"breakpoints {list(breakpoints)} not strictly inside {first}-{last}")
    out = []
    for i, (a, b) in enumerate(zip(edges, edges[1:])):
        end = b if (policy == SHARED or i == len(edges) - 2) else b - 1
        out.append(Segment(int(a), int(end)))
    return out


def paper_segmentation(series, policy=SHARED):
    """The four fixed periods 1840-1945, 1945-1980, 1980-2006, 2006-last, clipped to coverage."""
    first, last = series.first_year, series.last_year
    years = set(series.years.tolist())
    for b in PAPER_BOUNDARIES[1:]:
        if first < b < last and b not in years:
            raise RangeError(f"boundary year {b} missing from series")
    edges = [*PAPER_BOUNDARIES, max(last, PAPER_BOUNDARIES[-1])]
    segs = []
    for i, (a, b) in enumerate(zip(edges, edges[1:])):
        if policy == EXCLUSIVE_RIGHT and i < len(edges) - 2:
            b = b - 1
        lo, hi = max(a, first), min(b, last)
        if hi - lo < 1:
            warnings.warn(f"period {i + 1} ({a}-{b}) is absent from coverage {first}-{last}", stacklevel=2)
            continue
        if (lo, hi) != (a, b) and i < len(edges) - 2:
            warnings.warn(f"period {i + 1} truncated to {lo}-{hi}", stacklevel=2)
        segs.append(Segment(int(lo), int(hi)))
    if not segs:
        raise RangeError(f"coverage {first}-{last} overlaps none of the fixed periods")
    return segs


def efficiency_ratios(fits):
    """Successive slope ratios ``fits[i + 1].slope / fits[i].slope``."""
    if len(fits) < 2:
        raise ValueError("need at least 2 fits")
    ratios = []
    for i, (a, b) in enumerate(zip(fits, fits[1:])):
        if a.slope == 0:
            raise SeriesDivisionError(f"slope of segment {i + 1} is zero")
        ratios.append(b.slope / a.slope)
    return ratios


def analyze_regimes(series, segmentation):
    fits = [ols_fit(series, s) for s in segmentation]
    ratios = efficiency_ratios(fits) if len(fits) >= 2 else []
    return RegimeAnalysis(list(segmentation), fits, ratios, [s.duration for s in segmentation])


def duration_conventions(segmentation):
    """Literal and compat duration lists with their ratio conventions.

    The compat convention uses the printed 105/35/25 years when the
    segmentation starts with the fixed periods, and divides every later
    duration by the first one; the literal convention uses ``end - start``
    and pairwise ratios.
    """
    literal = [s.duration for s in segmentation]
    compat = list(literal)
    fixed = [Segment(a, b) for a, b in zip(PAPER_BOUNDARIES, PAPER_BOUNDARIES[1:])]
    for i, seg in enumerate(fixed):
        if i < len(segmentation) and segmentation[i] == seg:
            compat[i] = PAPER_DURATIONS[i]
    return {
        "literal": {
            "durations": literal,
            "ratios": [b / a for a, b in zip(literal, literal[1:]) if a > 0],
        },
        "paper_compat": {
            "durations": compat,
            "ratios": [d / compat[0] for d in compat[1:]] if compat and compat[0] > 0 else [],
        },
    }

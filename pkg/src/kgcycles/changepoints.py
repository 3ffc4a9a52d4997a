"""Exact least-squares changepoint search for piecewise-linear trends.

Every candidate segment's OLS cost comes from prefix sums in O(1), so the
full cost table is O(n^2) and the dynamic program over ``k`` breakpoints is
O(k n^2). The program runs over suffixes so that the forward reconstruction
can pick the earliest breakpoint at each step, which yields the
lexicographically earliest optimal placement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError
from .regimes import SHARED, BOUNDARY_POLICIES, fit_line, segments_from_breakpoints

#: Relative tolerance (against sum of y^2) under which two costs count as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class ChangepointResult:
    breakpoints: list
    total_sse: float
    per_segment_fits: list
    segments: list

    def to_dict(self):
        return {
            "breakpoints": list(self.breakpoints),
            "total_sse": self.total_sse,
            "per_segment_fits": [f.to_dict() for f in self.per_segment_fits],
        }


def interval_costs(x, y):
    """Matrix ``C[i, j]`` = OLS residual sum of squares over points ``i..j``.

    Entries with fewer than 2 points are 0; entries with ``j < i`` are inf.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x = x - x.mean()
    y = y - y.mean()

    def prefix(a):
        return np.concatenate([[0.0], np.cumsum(a)])

    px, py = prefix(x), prefix(y)
    pxx, pxy, pyy = prefix(x * x), prefix(x * y), prefix(y * y)
    n = len(x)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    m = (j - i + 1).astype(float)
    valid = m >= 2
    m = np.where(m > 0, m, 1.0)
    sx = px[j + 1] - px[i]
    sy = py[j + 1] - py[i]
    cxx = (pxx[j + 1] - pxx[i]) - sx * sx / m
    cxy = (pxy[j + 1] - pxy[i]) - sx * sy / m
    cyy = (pyy[j + 1] - pyy[i]) - sy * sy / m
    with np.errstate(divide="ignore", invalid="ignore"):
        sse = cyy - np.where(cxx > 0, cxy * cxy / cxx, 0.0)
    sse = np.where(valid, np.maximum(sse, 0.0), 0.0)
    return np.where(j >= i, sse, np.inf)


def _segment_end(t, policy):
    return t if policy == SHARED else t - 1


def min_points(k, min_len, policy=SHARED):
    """Fewest points that admit ``k`` breakpoints with ``min_len`` points per segment."""
    if policy == SHARED:
        return (k + 1) * min_len - k
    return (k + 1) * min_len


def segment_least_squares(x, y, k, min_len=2, policy=SHARED):
    """Breakpoint indices minimizing total piecewise-OLS cost.

    Returns ``(indices, cost)``; ``indices`` are positions into ``x``.
    """
    if policy not in BOUNDARY_POLICIES:
        raise ValueError(f"unknown boundary policy {policy!r}")
    if k < 1:
        raise ValueError("k must be at least 1")
    if min_len < 2:
        raise ValueError("min_len must be at least 2")
    n = len(x)
    if n < min_points(k, min_len, policy):
        raise FeasibilityError(
            f"{n} points cannot hold {k + 1} segments of at least {min_len} points ({policy} boundaries)"
        )
    cost = interval_costs(x, y)
    tol = TIE_RTOL * max(1.0, float(np.sum(np.square(np.asarray(y, dtype=float)))))
    inf = np.inf
    last = n - 1
    # best[r][s]: cheapest cover of points s..last with r segments
    best = np.full((k + 2, n), inf)
    for s in range(n):
        if last - s + 1 >= min_len:
            best[1, s] = cost[s, last]
    for r in range(2, k + 2):
        for s in range(n):
            t = np.arange(s + 1, n)
            ends = _segment_end(t, policy)
            ok = (ends - s + 1) >= min_len
            if not ok.any():
                continue
            t, ends = t[ok], ends[ok]
            cand = cost[s, ends] + best[r - 1, t]
            best[r, s] = cand.min()
    total = best[k + 1, 0]
    if not np.isfinite(total):
        raise FeasibilityError(f"no placement of {k} breakpoints satisfies min_len={min_len}")
    breaks = []
    s = 0
    for r in range(k + 1, 1, -1):
        target = best[r, s]
        for t in range(s + 1, n):
            end = _segment_end(t, policy)
            if end - s + 1 < min_len or not np.isfinite(best[r - 1, t]):
                continue
            if cost[s, end] + best[r - 1, t] <= target + tol:
                breaks.append(t)
                s = t
                break
    return breaks, float(total)


def detect_changepoints(series, k, min_len=2, policy=SHARED):
    """Globally optimal ``k`` breakpoint years for a per-capita series.

    Ties are broken towards the lexicographically earliest breakpoints.
    ``total_sse`` is the sum of the refitted per-segment residual sums.
    """
    x = series.years.astype(float)
    idx, _ = segment_least_squares(x, series.values, k, min_len, policy)
    years = [int(series.years[i]) for i in idx]
    segs = segments_from_breakpoints(series.first_year, series.last_year, years, policy)
    fits = []
    for seg in segs:
        sx, sy = series.between(seg.start_year, seg.end_year)
        fits.append(fit_line(sx, sy))
    return ChangepointResult(years, float(sum(f.sse for f in fits)), fits, segs)

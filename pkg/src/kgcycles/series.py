"""Annual indicator series: CSV ingestion, gap handling and per-million normalization."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ParseError, RangeError, SeriesDivisionError, ValidationError

PATENT_COUNT = "patent-count"
PERSONS = "persons"
PER_MILLION = "per-million"
UNITS = (PATENT_COUNT, PERSONS)

#: Longest run of missing population years that is filled by interpolation.
MAX_POPULATION_GAP = 10

BUNDLED_PATENTS = "us_utility_patents_1840_2013.csv"
BUNDLED_POPULATION = "us_population_1840_2013.csv"


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


class _YearSeries:
    years: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.years)

    @property
    def points(self):
        return list(zip(self.years.tolist(), self.values.tolist()))

    @property
    def first_year(self):
        return int(self.years[0])

    @property
    def last_year(self):
        return int(self.years[-1])

    def value_at(self, year):
        i = np.searchsorted(self.years, year)
        if i == len(self.years) or self.years[i] != year:
            raise RangeError(f"year {year} not in series")
        return float(self.values[i])

    def between(self, start, end):
        """Return ``(years, values)`` arrays for ``start <= year <= end``."""
        mask = (self.years >= start) & (self.years <= end)
        return self.years[mask], self.values[mask]

    def to_csv(self):
        out = ["year,value"]
        out += [f"{y},{_format_value(v)}" for y, v in self.points]
        return "\n".join(out) + "\n"

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.unit == other.unit
            and np.array_equal(self.years, other.years)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _format_value(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


@dataclass(frozen=True, eq=False)
class AnnualSeries(_YearSeries):
    """Raw annual counts (patents) or population, sorted by year.

    Gaps between years are allowed; :func:`fill_gaps` applies the
    interpolation policy and :meth:`gaps` reports what is missing.
    """

    years: np.ndarray
    values: np.ndarray
    unit: str
    interpolated: tuple = field(default=())

    def __post_init__(self):
        years = np.asarray(self.years)
        values = np.asarray(self.values, dtype=float)
        if self.unit not in UNITS:
            raise ValidationError(f"unknown unit {self.unit!r}; expected one of {UNITS}")
        if years.ndim != 1 or years.shape != values.shape:
            raise ValidationError("years and values must be 1-d arrays of equal length")
        if len(years) == 0:
            raise ValidationError("series is empty")
        if not np.issubdtype(years.dtype, np.integer):
            if not np.all(np.mod(years, 1) == 0):
                raise ValidationError("years must be integers")
        order = np.argsort(years, kind="stable")
        years, values = years[order].astype(np.int64), values[order]
        dup = years[1:][np.diff(years) == 0]
        if len(dup):
            raise ValidationError(f"duplicate year {int(dup[0])}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("values must be finite")
        if np.any(values < 0):
            bad = int(years[np.argmax(values < 0)])
            raise ValidationError(f"negative value in year {bad}")
        object.__setattr__(self, "years", _frozen(years, np.int64))
        object.__setattr__(self, "values", _frozen(values, float))
        object.__setattr__(self, "interpolated", tuple(int(y) for y in self.interpolated))

    def gaps(self):
        """Missing year ranges as inclusive ``(start, end)`` tuples."""
        d = np.diff(self.years)
        idx = np.nonzero(d > 1)[0]
        return [(int(self.years[i] + 1), int(self.years[i + 1] - 1)) for i in idx]


@dataclass(frozen=True, eq=False)
class PerCapitaSeries(_YearSeries):
    """Patents per million inhabitants over a contiguous run of years."""

    years: np.ndarray
    values: np.ndarray
    unit: str = PER_MILLION
    dropped_ranges: tuple = field(default=())
    interpolated_population: tuple = field(default=())

    def __post_init__(self):
        years = np.asarray(self.years, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if years.ndim != 1 or years.shape != values.shape or len(years) == 0:
            raise ValidationError("per-capita series needs equal-length, non-empty years and values")
        if np.any(np.diff(years) != 1):
            raise ValidationError("per-capita years must be strictly increasing and contiguous")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValidationError("per-capita values must be finite and non-negative")
        object.__setattr__(self, "years", _frozen(years, np.int64))
        object.__setattr__(self, "values", _frozen(values, float))


def parse_annual_csv(content, unit):
    """Parse ``year,value`` CSV text into an :class:`AnnualSeries`.

    Rows may come in any order; they are sorted by year. Line numbers in
    errors count the header as line 1.
    """
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    content = content.lstrip("﻿")
    reader = csv.reader(io.StringIO(content, newline=""))
    rows = [(i, row) for i, row in enumerate(reader, start=1) if any(c.strip() for c in row)]
    if not rows:
        raise ParseError("empty input", line=1)
    hline, header = rows[0]
    if [c.strip().lower() for c in header] != ["year", "value"]:
        raise ParseError(f"expected header 'year,value', got {','.join(header)!r}", line=hline)
    years, values = [], []
    for lineno, row in rows[1:]:
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=lineno)
        ytxt, vtxt = row[0].strip(), row[1].strip()
        try:
            year = int(ytxt)
        except ValueError:
            raise ParseError(f"year {ytxt!r} is not an integer", line=lineno) from None
        try:
            value = float(vtxt)
        except ValueError:
            raise ParseError(f"value {vtxt!r} is not numeric", line=lineno) from None
        years.append(year)
        values.append(value)
    if not years:
        raise ParseError("no data rows", line=hline)
    return AnnualSeries(np.array(years, dtype=np.int64), np.array(values), unit)


def read_annual_csv(path, unit):
    with open(path, encoding="utf-8", newline="") as f:
        return parse_annual_csv(f.read(), unit)


def load_bundled():
    """Return the bundled ``(patents, population)`` snapshot, 1840-2013."""
    pkg = resources.files("kgcycles") / "data"
    patents = parse_annual_csv(pkg.joinpath(BUNDLED_PATENTS).read_text("utf-8"), PATENT_COUNT)
    population = parse_annual_csv(pkg.joinpath(BUNDLED_POPULATION).read_text("utf-8"), PERSONS)
    return patents, population


def bundled_path(name):
    return resources.files("kgcycles") / "data" / name


def fill_gaps(series, max_gap=MAX_POPULATION_GAP):
    """Linearly interpolate runs of at most ``max_gap`` missing years.

    Only population series are interpolated; patent counts are the measured
    signal and are returned unchanged.
    """
    if series.unit != PERSONS:
        return series
    years, values = series.years.tolist(), series.values.tolist()
    new_years, new_values, filled = [], [], []
    for (y0, v0), (y1, v1) in zip(zip(years, values), zip(years[1:], values[1:])):
        new_years.append(y0)
        new_values.append(v0)
        missing = y1 - y0 - 1
        if 0 < missing <= max_gap:
            for y in range(y0 + 1, y1):
                new_years.append(y)
                new_values.append(v0 + (v1 - v0) * (y - y0) / (y1 - y0))
                filled.append(y)
    new_years.append(years[-1])
    new_values.append(values[-1])
    if not filled:
        return series
    return AnnualSeries(
        np.array(new_years), np.array(new_values), series.unit,
        interpolated=tuple(series.interpolated) + tuple(filled),
    )


def _runs(years):
    if len(years) == 0:
        return []
    cuts = np.nonzero(np.diff(years) > 1)[0] + 1
    return [r for r in np.split(years, cuts)]


def per_million(patents, population):
    """Patents per million inhabitants on the overlapping years.

    Population gaps of up to :data:`MAX_POPULATION_GAP` years are interpolated
    first. If the remaining common years are not contiguous the longest run
    is kept (earliest on ties) and the others are reported in
    ``dropped_ranges`` and as a warning.
    """
    if patents.unit != PATENT_COUNT:
        raise ValidationError(f"patents series has unit {patents.unit!r}, expected {PATENT_COUNT!r}")
    if population.unit != PERSONS:
        raise ValidationError(f"population series has unit {population.unit!r}, expected {PERSONS!r}")
    pop = fill_gaps(population)
    lo = max(patents.first_year, pop.first_year)
    hi = min(patents.last_year, pop.last_year)
    if lo > hi:
        raise RangeError(
            f"no overlapping years: patents {patents.first_year}-{patents.last_year}, "
            f"population {pop.first_year}-{pop.last_year}"
        )
    common = np.intersect1d(patents.years, pop.years)
    common = common[(common >= lo) & (common <= hi)]
    runs = _runs(common)
    if not runs:
        raise RangeError(f"no common years in {lo}-{hi}")
    best = max(runs, key=len)
    dropped = tuple((int(r[0]), int(r[-1])) for r in runs if r is not best)
    if dropped:
        warnings.warn(f"coverage split by gaps; keeping {best[0]}-{best[-1]}, dropping {dropped}", stacklevel=2)
    p = patents.values[np.searchsorted(patents.years, best)]
    n = pop.values[np.searchsorted(pop.years, best)]
    if np.any(n == 0):
        bad = int(best[np.argmax(n == 0)])
        raise SeriesDivisionError(f"population is zero in year {bad}")
    used_interp = tuple(y for y in pop.interpolated if best[0] <= y <= best[-1])
    return PerCapitaSeries(
        best, p * 1e6 / n, dropped_ranges=dropped, interpolated_population=used_interp,
    )

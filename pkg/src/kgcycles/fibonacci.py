"""Fibonacci ratio limits and cycle-duration forecasts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .errors import DomainError

PAPER_COMPAT = "paper-compat"
EXACT = "exact"
MODES = (PAPER_COMPAT, EXACT)

#: Ratio limits F1..F5 at their printed precision.
PRINTED_LIMITS = (0.618, 0.382, 0.236, 0.145, 0.09)

INV_PHI = (math.sqrt(5) - 1) / 2
#: Index at which C_i / C_(i+m) is taken as the limit.
LIMIT_INDEX = 60


def fibonacci(n):
    """First ``n`` Fibonacci numbers, starting 0, 1."""
    if n < 1:
        raise ValueError("requested an empty Fibonacci sequence")
    seq = [0, 1][:n]
    while len(seq) < n:
        seq.append(seq[-1] + seq[-2])
    return seq


@dataclass(frozen=True)
class FibRatios:
    limits: list

    def limit(self, m):
        """F_m, 1-based."""
        return self.limits[m - 1]


def ratio_limits(max_m):
    """Limits of ``C_i / C_(i+m)`` for ``m = 1..max_m``, i.e. powers of 1/phi."""
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    seq = fibonacci(LIMIT_INDEX + max_m + 1)
    limits = [float(Fraction(seq[LIMIT_INDEX], seq[LIMIT_INDEX + m])) for m in range(1, max_m + 1)]
    for m, v in enumerate(limits, start=1):
        # exact Fibonacci ratios at i = 60 agree with phi^-m far below 1e-9
        if abs(v - INV_PHI**m) > 1e-9:
            raise ArithmeticError(f"F_{m} = {v} has not converged to 1/phi^{m}")
    return FibRatios(limits)


def _nearest(value, limits):
    devs = [abs(value - f) for f in limits]
    i = min(range(len(limits)), key=devs.__getitem__)
    return i + 1, devs[i]


def duration_ratio_match(durations, base_index=0, max_m=5):
    """Ratios of later durations to ``durations[base_index]`` and their nearest limit.

    Returns a list of ``(ratio, m, deviation)`` where ``m`` is the 1-based
    index of the nearest ``F_m``.
    """
    if len(durations) < 2:
        raise ValueError("need at least 2 durations")
    if any(d <= 0 for d in durations):
        raise DomainError(f"durations must be positive, got {list(durations)}")
    if not 0 <= base_index < len(durations) - 1:
        raise DomainError(f"base_index {base_index} leaves no later durations")
    limits = ratio_limits(max_m).limits
    base = durations[base_index]
    out = []
    for d in durations[base_index + 1:]:
        r = d / base
        m, dev = _nearest(r, limits)
        out.append((r, m, dev))
    return out


@dataclass(frozen=True)
class Forecast:
    base_duration: float
    anchor_year: int
    predicted_durations: list
    predicted_change_years: list
    rounding_mode: str
    ratios_used: list
    reported_durations: list

    def to_dict(self):
        return {
            "base_duration": self.base_duration,
            "anchor_year": self.anchor_year,
            "predicted_durations": list(self.predicted_durations),
            "predicted_change_years": list(self.predicted_change_years),
            "rounding_mode": self.rounding_mode,
            "ratios_used": list(self.ratios_used),
            "reported_durations": list(self.reported_durations),
        }


def _round_sig(x, digits):
    d = Decimal(repr(x))
    if d == 0:
        return 0.0
    q = Decimal(1).scaleb(d.adjusted() - digits + 1)
    return float(d.quantize(q, rounding=ROUND_HALF_UP))


def _paper_limit(m):
    if m <= len(PRINTED_LIMITS):
        return PRINTED_LIMITS[m - 1]
    return _round_sig(INV_PHI**m, 3)


def forecast_changes(base_duration, anchor_year, start_m=4, count=2, mode=PAPER_COMPAT):
    """Future change years ``anchor + sum(base * F_m)`` for ``m = start_m, start_m + 1, ...``.

    In paper-compat mode the printed ratio values are used, each duration
    is reported at two significant figures, the years accumulate the
    reported durations, and each year is reported as its integer part. In
    exact mode the full-precision limits and fractional years are used.
    """
    if not base_duration > 0:
        raise DomainError(f"base_duration must be positive, got {base_duration}")
    if count < 1:
        raise DomainError("count must be at least 1")
    if start_m < 1:
        raise DomainError("start_m must be at least 1")
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    ms = range(start_m, start_m + count)
    if mode == EXACT:
        ratios = ratio_limits(start_m + count - 1).limits[start_m - 1:]
        durations = [base_duration * f for f in ratios]
        years, t = [], float(anchor_year)
        for d in durations:
            t += d
            years.append(t)
        return Forecast(base_duration, anchor_year, durations, years, mode, ratios, list(durations))
    ratios = [_paper_limit(m) for m in ms]
    durations = [base_duration * f for f in ratios]
    reported = [_round_sig(d, 2) for d in durations]
    years, t = [], Fraction(anchor_year)
    for d in reported:
        t += Fraction(repr(d))
        years.append(math.floor(t))
    return Forecast(base_duration, anchor_year, durations, years, mode, ratios, reported)

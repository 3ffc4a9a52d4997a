"""Knowledge-generating cycles in patent series and the N-helix capacity model."""

__version__ = "0.1.0"

from .changepoints import ChangepointResult, detect_changepoints
from .fibonacci import FibRatios, Forecast, duration_ratio_match, fibonacci, forecast_changes, ratio_limits
from .helix import (
    CapacityParams, SeriesResult, capacity, koch2d_prefractal, koch2d_series, koch3d_series,
    max_iteration_ratio, phase_measure,
)
from .regimes import LinearFit, RegimeAnalysis, Segment, efficiency_ratios, ols_fit, paper_segmentation
from .series import AnnualSeries, PerCapitaSeries, load_bundled, parse_annual_csv, per_million
from .sources import fetch_source

__all__ = [
    "AnnualSeries", "CapacityParams", "ChangepointResult", "FibRatios", "Forecast", "LinearFit",
    "PerCapitaSeries", "RegimeAnalysis", "Segment", "SeriesResult", "capacity", "detect_changepoints",
    "duration_ratio_match", "efficiency_ratios", "fetch_source", "fibonacci", "forecast_changes",
    "koch2d_prefractal", "koch2d_series", "koch3d_series", "load_bundled", "max_iteration_ratio",
    "ols_fit", "paper_segmentation", "parse_annual_csv", "per_million", "phase_measure", "ratio_limits",
]

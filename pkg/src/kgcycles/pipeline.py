"""End-to-end analysis: ingest, normalize, segment, fit, capacity model, forecast."""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .changepoints import detect_changepoints
from .errors import StageError, ValidationError
from .fibonacci import EXACT, MODES, PAPER_COMPAT, PRINTED_LIMITS, duration_ratio_match, forecast_changes, ratio_limits
from .helix import (
    DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_MEAN_WEIGHT, CapacityParams, capacity_table,
    koch2d_series, koch3d_series, max_iteration_ratio, phase_measure,
)
from .regimes import (
    PAPER_BOUNDARIES, SHARED, analyze_regimes, duration_conventions, paper_segmentation,
    segments_from_breakpoints,
)
from .series import (
    BUNDLED_PATENTS, BUNDLED_POPULATION, PATENT_COUNT, PERSONS, PerCapitaSeries, bundled_path, parse_annual_csv,
    per_million,
)
from .svg import render_prefractal_panel, render_series_plot

#: Values as printed, keyed by report quantity, with their printed decimals.
PAPER_VALUES = {
    "k1": (2.887, 3), "k2": (3.749, 3), "k3": (12.168, 3), "k4": (74.09, 2),
    "k2/k1": (1.3, 1), "k3/k2": (3.24, 2), "k4/k3": (6.09, 2),
    "P2/P1": (1.57, 2), "P3/P2": (3.3, 1),
    "koch2d_surplus": (2.3, 1), "koch3d_surplus": (4.0, 0),
    "duration_ratio_2_1": (0.33, 2), "duration_ratio_3_1": (0.238, 3),
    "forecast_year_1": (2021, 0), "forecast_year_2": (2030, 0),
}

ERRATA = {
    "patent-grant-types": "Grant types behind the published counts are unstated; the bundled snapshot "
                          "uses utility grants only.",
    "k4-insufficient-data": "The fourth period holds only a few years, so its slope k4 is the least "
                            "reliable of the four.",
    "third-duration-25-vs-26": "The third period 1980-2006 spans 26 years; the printed duration is 25.",
    "duration-ratio-base": "The printed third-period duration ratio divides by the first duration "
                           "(25/105), not by the second.",
    "duration-match-closeness": "35/105 = 0.333 is paired with F2 = 0.382, a deviation of about 15%.",
    "koch2d-factor-3.5": "With beta = 6.3 the area surplus is 2.3077 and the total factor 3.3077; a "
                         "factor of 3.5 is also printed.",
    "koch2d-beta-inequality": "Convergence requires beta > 5 (common ratio 5/beta < 1); the reversed "
                              "inequality is also printed.",
    "koch3d-omega-4V": "The geometric sum gives a volume surplus of 4V/(gamma - 7); the printed "
                       "surplus 4V holds only for gamma = 8.",
    "koch3d-factor-gamma-minus-1": "The printed total factor 1 + 4/(gamma - 1) should read "
                                   "1 + 4/(gamma - 7).",
    "koch3d-gamma-inequality": "Convergence requires gamma > 7 (common ratio 7/gamma < 1); the reversed "
                               "inequality is also printed.",
    "fib-0.145-truncation": "1/phi^4 = 0.1459 is printed as 0.145 (truncated, not rounded).",
    "paper-compat-rounding-chain": "The printed forecast chain mixes roundings (15.225 -> 15, 9.45 -> 9.5, "
                                   "2030.5 -> 2030); exact mode gives the self-consistent values.",
}


@dataclass
class PipelineConfig:
    patents_path: str | None = None
    population_path: str | None = None
    segmentation: object = "paper"
    k: int = 3
    min_len: int = 10
    boundary_policy: str = SHARED
    mean_weight: float = DEFAULT_MEAN_WEIGHT
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    mode: str = PAPER_COMPAT
    start_m: int = 4
    count: int = 2
    base_duration: float | None = None
    anchor_year: int | None = None
    output_dir: str | None = None
    plots: bool = True

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        # nested sections are accepted and flattened
        for section in ("capacity", "forecast"):
            sub = d.pop(section, None) or {}
            for key, value in sub.items():
                d.setdefault(key, value)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self):
        return asdict(self)

    def validate(self):
        seg = self.segmentation
        if not (seg in ("paper", "auto") or (isinstance(seg, (list, tuple)) and all(isinstance(y, int) for y in seg))):
            raise ValidationError(f"segmentation must be 'paper', 'auto' or a list of years, got {seg!r}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        for attr in ("patents_path", "population_path"):
            p = getattr(self, attr)
            if p is not None and not os.access(p, os.R_OK):
                raise ValidationError(f"{attr} {p!r} does not exist or is not readable")


@dataclass
class Report:
    data: dict
    figures: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(self.data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"

    def __getitem__(self, key):
        return self.data[key]


@contextlib.contextmanager
def _stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


def _read(path, default_name):
    if path is None:
        return bundled_path(default_name).read_bytes(), f"bundled:{default_name}"
    with open(path, "rb") as f:
        return f.read(), str(path)


def _compare(name, value):
    printed, decimals = PAPER_VALUES[name]
    return {
        "quantity": name,
        "value": value,
        "rounded": round(value, decimals) if decimals else int(round(value)),
        "paper_value": printed,
    }


def run_pipeline(config, write=True):
    """Run every stage and return the :class:`Report`; outputs are written only if all stages succeed."""
    with _stage("config"):
        config.validate()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        with _stage("ingest"):
            raw_p, src_p = _read(config.patents_path, BUNDLED_PATENTS)
            raw_n, src_n = _read(config.population_path, BUNDLED_POPULATION)
            patents = parse_annual_csv(raw_p, PATENT_COUNT)
            population = parse_annual_csv(raw_n, PERSONS)
        with _stage("per-million"):
            series = per_million(patents, population)
        touched = ["patent-grant-types"]
        changepoints = None
        with _stage("segmentation"):
            if config.segmentation == "paper":
                segmentation = paper_segmentation(series, config.boundary_policy)
            elif config.segmentation == "auto":
                changepoints = detect_changepoints(series, config.k, config.min_len, config.boundary_policy)
                segmentation = changepoints.segments
            else:
                segmentation = segments_from_breakpoints(
                    series.first_year, series.last_year, list(config.segmentation), config.boundary_policy
                )
        with _stage("fits"):
            regimes = analyze_regimes(series, segmentation)
            conventions = duration_conventions(segmentation)
        paper_seg = config.segmentation == "paper"
        if paper_seg and len(segmentation) == 4 and segmentation[-1].start_year == PAPER_BOUNDARIES[-1]:
            touched.append("k4-insufficient-data")
        if conventions["literal"]["durations"] != conventions["paper_compat"]["durations"]:
            touched.append("third-duration-25-vs-26")
        with _stage("capacity"):
            params = [CapacityParams(config.mean_weight, n, config.beta, config.gamma) for n in (1, 2, 3, 4)]
            table = capacity_table(config.mean_weight, config.beta, config.gamma)
            k2d = koch2d_series(config.beta, 20)
            k3d = koch3d_series(config.gamma, 20)
            cap = {
                "params": {"mean_weight": config.mean_weight, "beta": config.beta, "gamma": config.gamma},
                **table,
                "phase_measures": {f"P{p.helix_count}": phase_measure(p.helix_count) for p in params},
                "convergence_bounds": {"TH": max_iteration_ratio(3), "QH": max_iteration_ratio(4)},
                "koch2d": k2d.to_dict(),
                "koch3d": k3d.to_dict(),
            }
            touched += ["koch2d-factor-3.5", "koch2d-beta-inequality", "koch3d-omega-4V",
                        "koch3d-factor-gamma-minus-1", "koch3d-gamma-inequality"]
        with _stage("forecast"):
            base = config.base_duration if config.base_duration is not None else float(segmentation[0].duration)
            anchor = config.anchor_year if config.anchor_year is not None else int(segmentation[-1].start_year)
            forecasts = {
                mode: forecast_changes(base, anchor, config.start_m, config.count, mode).to_dict()
                for mode in (PAPER_COMPAT, EXACT)
            }
            limits = ratio_limits(max(5, config.start_m + config.count - 1)).limits
            matches = {}
            for conv in ("paper_compat", "literal"):
                durs = conventions[conv]["durations"]
                if len(durs) >= 2 and all(d > 0 for d in durs):
                    matches[conv] = [
                        {"ratio": r, "nearest_m": m, "nearest_limit": limits[m - 1], "deviation": dev}
                        for r, m, dev in duration_ratio_match(durs, 0)
                    ]
            touched += ["duration-ratio-base", "duration-match-closeness", "fib-0.145-truncation"]
            if config.mode == PAPER_COMPAT:
                touched.append("paper-compat-rounding-chain")
        with _stage("plots"):
            figures = {}
            if config.plots:
                figures["fig1.svg"] = render_series_plot(
                    series, (), f"US patents per million inhabitants, {series.first_year}-{series.last_year}"
                )
                for i, (seg, fit) in enumerate(zip(segmentation, regimes.fits), start=2):
                    years, values = series.between(seg.start_year, seg.end_year)
                    sub = PerCapitaSeries(years, values)
                    figures[f"fig{i}.svg"] = render_series_plot(
                        sub, [(seg, fit)], f"Period {seg.start_year}-{seg.end_year}, slope {fit.slope:.3f}"
                    )
                figures["koch.svg"] = render_prefractal_panel((1, 2, 3, 4))

    comparison = []
    for i, fit in enumerate(regimes.fits[:4], start=1):
        comparison.append(_compare(f"k{i}", fit.slope))
    for i, r in enumerate(regimes.ratios[:3], start=1):
        comparison.append(_compare(f"k{i + 1}/k{i}", r))
    comparison += [
        _compare("P2/P1", table["ratios"]["P2/P1"]),
        _compare("P3/P2", table["ratios"]["P3/P2"]),
        _compare("koch2d_surplus", k2d.closed_form),
        _compare("koch3d_surplus", k3d.closed_form),
    ]
    pc = matches.get("paper_compat", [])
    if len(pc) >= 2:
        comparison += [_compare("duration_ratio_2_1", pc[0]["ratio"]), _compare("duration_ratio_3_1", pc[1]["ratio"])]
    for j, y in enumerate(forecasts[PAPER_COMPAT]["predicted_change_years"][:2], start=1):
        comparison.append(_compare(f"forecast_year_{j}", y))

    data = {
        "tool": {"name": "kgcycles", "version": __version__},
        "series": {
            "unit": series.unit,
            "first_year": series.first_year,
            "last_year": series.last_year,
            "n": len(series),
            "min": float(series.values.min()),
            "max": float(series.values.max()),
            "interpolated_population_years": list(series.interpolated_population),
            "dropped_ranges": [list(r) for r in series.dropped_ranges],
        },
        "regime_analysis": {
            **regimes.to_dict(),
            "boundary_policy": config.boundary_policy,
            "duration_conventions": conventions,
        },
        "changepoints": changepoints.to_dict() if changepoints is not None else None,
        "capacity": cap,
        "forecast": {
            "base_duration": base,
            "anchor_year": anchor,
            "ratio_limits": {"exact": limits, "printed": list(PRINTED_LIMITS)},
            "duration_match": matches,
            **forecasts,
        },
        "paper_comparison": comparison,
        "warnings": sorted({str(w.message) for w in caught}),
        "errata": [{"id": key, "note": ERRATA[key]} for key in touched],
        "provenance": {
            "inputs": {
                "patents": {"source": src_p, "sha256": hashlib.sha256(raw_p).hexdigest()},
                "population": {"source": src_n, "sha256": hashlib.sha256(raw_n).hexdigest()},
            },
            # output_dir is excluded so the report depends only on inputs and parameters
            "config": {k: v for k, v in config.to_dict().items() if k != "output_dir"},
            "tool_version": __version__,
        },
    }
    report = Report(data, figures)
    if write and config.output_dir is not None:
        write_outputs(report, config.output_dir)
    return report


def write_outputs(report, output_dir):
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    for name, doc in report.figures.items():
        (out / name).write_text(doc, encoding="utf-8")

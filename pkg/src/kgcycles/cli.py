"""Command-line interface: ``kgcycles <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .changepoints import detect_changepoints
from .errors import KGCyclesError
from .fibonacci import MODES, PAPER_COMPAT, forecast_changes
from .helix import CapacityParams, capacity, fractal_factor, max_iteration_ratio, phase_measure
from .pipeline import PipelineConfig, run_pipeline, write_outputs
from .regimes import analyze_regimes, paper_segmentation, segments_from_breakpoints
from .series import PATENT_COUNT, PERSONS, load_bundled, per_million, read_annual_csv
from .sources import fetch_source
from .svg import render_prefractal_plot, render_series_plot


def _years(text):
    if text in ("paper", "auto"):
        return text
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected paper, auto or comma-separated years, got {text!r}") from None


def _data_flags(p):
    p.add_argument("--patents", metavar="PATH", help="patent counts CSV (default: bundled snapshot)")
    p.add_argument("--population", metavar="PATH", help="population CSV (default: bundled snapshot)")


def _json_flag(p):
    p.add_argument("--json", action="store_true", help="print full-precision JSON instead of a table")


def build_parser():
    parser = argparse.ArgumentParser(prog="kgcycles", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build the patents-per-million series")
    _data_flags(p)
    p.add_argument("--out", metavar="DIR", help="write per_million.csv here instead of stdout")

    p = sub.add_parser("fit", help="OLS slopes and efficiency ratios per period")
    _data_flags(p)
    p.add_argument("--segmentation", type=_years, default="paper", metavar="paper|YEARS")
    _json_flag(p)

    p = sub.add_parser("segment", help="least-squares changepoint search")
    _data_flags(p)
    p.add_argument("--k", type=int, default=3, metavar="N", help="number of breakpoints")
    p.add_argument("--min-len", type=int, default=10, metavar="N")
    _json_flag(p)

    p = sub.add_parser("capacity", help="N-helix capacity and fractal factor")
    p.add_argument("--helices", type=int, default=3, choices=(1, 2, 3, 4))
    p.add_argument("--mean-weight", type=float, default=1.0, metavar="X")
    p.add_argument("--beta", type=float, default=6.3, metavar="X")
    p.add_argument("--gamma", type=float, default=8.0, metavar="X")
    _json_flag(p)

    p = sub.add_parser("forecast", help="Fibonacci-ratio forecast of change years")
    p.add_argument("--base", type=float, default=105.0, help="base duration in years")
    p.add_argument("--anchor", type=int, default=2006, help="year the forecast starts from")
    p.add_argument("--start-m", type=int, default=4)
    p.add_argument("--count", type=int, default=2)
    p.add_argument("--mode", choices=MODES, default=PAPER_COMPAT)
    _json_flag(p)

    p = sub.add_parser("report", help="run the full pipeline and write report.json and SVGs")
    p.add_argument("--config", metavar="PATH")
    _data_flags(p)
    p.add_argument("--segmentation", type=_years, metavar="paper|auto|YEARS")
    p.add_argument("--k", type=int, metavar="N")
    p.add_argument("--min-len", type=int, metavar="N")
    p.add_argument("--beta", type=float, metavar="X")
    p.add_argument("--gamma", type=float, metavar="X")
    p.add_argument("--mean-weight", type=float, metavar="X")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser("plot", help="render SVG figures")
    p.add_argument("--figure", choices=("series", "koch"), default="series")
    _data_flags(p)
    p.add_argument("--segmentation", type=_years, default="paper", metavar="paper|YEARS")
    p.add_argument("--n", type=int, default=3, help="pre-fractal order for --figure koch")
    p.add_argument("--out", metavar="DIR", help="output directory (default: stdout)")

    p = sub.add_parser("fetch", help="download a source page into the snapshot cache")
    p.add_argument("url")
    p.add_argument("--offline", action="store_true", help="only read the cache")
    p.add_argument("--out", metavar="PATH", help="also copy the body to this file")
    return parser


def _series(args):
    if args.patents is None and args.population is None:
        patents, population = load_bundled()
    else:
        bp, bn = load_bundled()
        patents = read_annual_csv(args.patents, PATENT_COUNT) if args.patents else bp
        population = read_annual_csv(args.population, PERSONS) if args.population else bn
    return per_million(patents, population)


def _segmentation(series, choice):
    if choice == "paper":
        return paper_segmentation(series)
    if choice == "auto":
        return detect_changepoints(series, 3, 10).segments
    return segments_from_breakpoints(series.first_year, series.last_year, choice)


def _print_json(obj):
    print(json.dumps(obj, indent=2))


def cmd_ingest(args):
    series = _series(args)
    if args.out:
        path = Path(args.out) / "per_million.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(series.to_csv(), encoding="utf-8")
        print(path)
    else:
        sys.stdout.write(series.to_csv())


def cmd_fit(args):
    series = _series(args)
    ra = analyze_regimes(series, _segmentation(series, args.segmentation))
    if args.json:
        return _print_json(ra.to_dict())
    print("period      n    slope      r2")
    for seg, fit in zip(ra.segmentation, ra.fits):
        print(f"{seg.start_year}-{seg.end_year}  {fit.n:3d}  {fit.slope:8.4f}  {fit.r_squared:.4f}")
    for i, r in enumerate(ra.ratios, start=1):
        print(f"k{i + 1}/k{i} = {r:.4f}")


def cmd_segment(args):
    res = detect_changepoints(_series(args), args.k, args.min_len)
    if args.json:
        return _print_json(res.to_dict())
    print("breakpoints: " + ", ".join(str(b) for b in res.breakpoints))
    print(f"total sse: {res.total_sse:.4f}")
    for seg, fit in zip(res.segments, res.per_segment_fits):
        print(f"{seg.start_year}-{seg.end_year}  slope {fit.slope:.4f}")


def cmd_capacity(args):
    params = CapacityParams(args.mean_weight, args.helices, args.beta, args.gamma)
    out = {
        "helix_count": args.helices,
        "phase_measure": phase_measure(args.helices),
        "total_factor": fractal_factor(params),
        "capacity": capacity(params),
    }
    if args.helices in (3, 4):
        out["max_iteration_ratio"] = max_iteration_ratio(args.helices)
    if args.json:
        return _print_json(out)
    for key, value in out.items():
        print(f"{key}: {value}" if isinstance(value, int) else f"{key}: {value:.4f}")


def cmd_forecast(args):
    fc = forecast_changes(args.base, args.anchor, args.start_m, args.count, args.mode)
    if args.json:
        return _print_json(fc.to_dict())
    for d, y in zip(fc.reported_durations, fc.predicted_change_years):
        year = str(y) if isinstance(y, int) else f"{y:.4f}"
        print(f"{year}  (+{d:g} years)" if args.mode == PAPER_COMPAT else f"{year}  (+{d:.4f} years)")


def cmd_report(args):
    cfg = PipelineConfig.from_json(args.config) if args.config else PipelineConfig()
    overrides = {
        "patents_path": args.patents, "population_path": args.population,
        "segmentation": args.segmentation, "k": args.k, "min_len": args.min_len,
        "beta": args.beta, "gamma": args.gamma, "mean_weight": args.mean_weight,
        "mode": args.mode, "output_dir": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if cfg.output_dir is None:
        cfg.output_dir = "kgcycles-out"
    report = run_pipeline(cfg, write=False)
    write_outputs(report, cfg.output_dir)
    print(Path(cfg.output_dir) / "report.json")


def cmd_plot(args):
    if args.figure == "koch":
        name, doc = "koch.svg", render_prefractal_plot(args.n)
    else:
        series = _series(args)
        segs = _segmentation(series, args.segmentation)
        fits = list(zip(segs, analyze_regimes(series, segs).fits))
        name, doc = "fig1.svg", render_series_plot(series, fits, "US patents per million inhabitants")
    if args.out:
        path = Path(args.out) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(doc, encoding="utf-8")
        print(path)
    else:
        sys.stdout.write(doc)


def cmd_fetch(args):
    body = fetch_source(args.url, offline=args.offline)
    if args.out:
        Path(args.out).write_bytes(body)
    print(f"{len(body)} bytes")


COMMANDS = {
    "ingest": cmd_ingest, "fit": cmd_fit, "segment": cmd_segment, "capacity": cmd_capacity,
    "forecast": cmd_forecast, "report": cmd_report, "plot": cmd_plot, "fetch": cmd_fetch,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            COMMANDS[args.command](args)
    except (KGCyclesError, OSError, ValueError) as e:
        msg = " ".join(str(e).split())
        print(f"kgcycles: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

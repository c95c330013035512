"""Command-line front end.

Every subcommand ingests ``--in``, runs one analysis stage and writes JSON
(always, the canonical form) plus CSV tables and SVG charts when requested
through ``--format``. Exit codes: 0 success, 1 bad usage or parameters,
2 the data cannot support the computation.
"""

from __future__ import annotations

import argparse
import datetime as dt
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import serialize, svg
from .complexity import (
    complexity_profile,
    entropy_report,
    generalized_hurst,
    lyapunov_spectrum,
)
from .complexity.hurst import DEFAULT_TAUS
from .distribution import (
    PE_BAND_HI,
    PE_BAND_LO,
    PmfReport,
    conditional_cells,
    monthly_pmfs,
    pmf_report,
    pmf_stats,
)
from .errors import (
    BadFlag,
    DataError,
    NoPeCoverage,
    ParameterError,
    RegimeScopeError,
    SeriesTooShort,
    UnknownCommand,
)
from .horizons import (
    DEFAULT_LADDER,
    cagr_summary,
    forward_returns,
    horizon_summary,
    parse_ladder,
    trapping_horizon,
)
from .infoflow import driver_target, lagged_nmi, mutual_information, symbolize, transfer_entropy_detail
from .market_data import TRADING_YEAR, DailySeries, IngestConfig, eps_proxy, ingest_csv, pct_change

log = logging.getLogger("regimescope")

COMMANDS = (
    "ingest-check",
    "returns",
    "cagr",
    "pmf",
    "pe-pmf",
    "pe-monthly",
    "entropy",
    "hurst",
    "lyapunov",
    "profile",
    "mi",
    "nmi",
    "te",
    "conditional",
    "report-all",
)
FORMATS = ("json", "csv", "svg")
PE_ANNOTATIONS = (16.0, 26.0, 30.0)
MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlag(message)


def _date(text: str) -> dt.date:
    try:
        if len(text) != 10:
            raise ValueError
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    """``"1,2,3"`` or a range ``"1..5"`` (integer steps)."""
    try:
        if ".." in text and "," not in text:
            a, b = text.split("..")
            return [float(v) for v in range(int(a), int(b) + 1)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _formats(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    bad = [p for p in parts if p not in FORMATS]
    if bad or not parts:
        raise argparse.ArgumentTypeError(f"formats must be among {', '.join(FORMATS)}")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", required=True, help="input CSV (date,close[,pe])")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--from", dest="date_from", type=_date, help="first date to keep")
    common.add_argument("--to", dest="date_to", type=_date, help="last date to keep")
    common.add_argument("--format", type=_formats, default=FORMATS, help="comma list of json,csv,svg")
    common.add_argument("--horizons", default=None, help="horizon ladder, e.g. 1d,1w,2w,1m,3m,6m,1y..12y")
    common.add_argument("--series", choices=("pe", "close", "returns"), default="pe",
                        help="input of entropy/hurst/lyapunov")
    common.add_argument("--q", type=_float_list, default=[1.0, 2.0, 3.0, 4.0, 5.0], help="Hurst moment orders")
    common.add_argument("--tsallis-q", type=_float_list, default=[0.1, 2.0])
    common.add_argument("--dim", type=int, default=5, help="embedding dimension")
    common.add_argument("--delay", type=int, default=1, help="embedding delay")
    common.add_argument("--neighbors", type=int, default=None, help="neighbours per local fit (default 2*dim+2)")
    common.add_argument("--m", type=int, default=2, help="sample entropy template length")
    common.add_argument("--r", type=float, default=None, help="sample entropy tolerance (default 0.2*sigma)")
    common.add_argument("--order", type=int, default=5, help="permutation entropy order")
    common.add_argument("--k", type=int, default=1, help="transfer entropy history length")
    common.add_argument("--max-lag", type=int, default=50)
    common.add_argument("--max-years", type=int, default=None,
                        help="years for conditional (default 7) and cagr (default 12)")
    common.add_argument("--of", choices=("returns", "eps-growth"), default="returns", help="pmf target")
    common.add_argument("--cdf-at", type=_float_list, default=list(PE_ANNOTATIONS),
                        help="P/E thresholds annotated with their cumulative probability")
    common.add_argument("--both", action="store_true", help="te: also report the reverse direction")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="regimescope", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


class Context:
    """Resolved arguments, the ingested series and an output sink."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.out = Path(args.out)
        self.formats = set(args.format)
        config = IngestConfig(start=args.date_from, end=args.date_to)
        self.series = ingest_csv(args.input, config)
        self.digest = serialize.file_digest(args.input)
        self.written: list[Path] = []

    def manifest(self, command: str) -> serialize.RunManifest:
        params = {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in sorted(vars(self.args).items())
            if k not in ("input", "out", "verbose", "command")
        }
        for key in ("date_from", "date_to"):
            if params.get(key) is not None:
                params[key] = params[key].isoformat()
        return serialize.RunManifest(command, params, self.digest)

    def _write(self, name: str, text: str):
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        self.written.append(path)

    def json(self, command: str, kind: str, data):
        report = serialize.envelope(kind, self.manifest(command), data)
        self._write(f"{kind}.json", serialize.dumps(report))

    def csv(self, name: str, header, rows):
        if "csv" in self.formats:
            self._write(name, serialize.to_csv(header, rows))

    def svg(self, name: str, report, kind: str):
        if "svg" in self.formats:
            self._write(name, svg.emit_svg(report, kind))


def _ladder(args) -> list:
    return parse_ladder(args.horizons) if args.horizons else list(DEFAULT_LADDER)


def _pe_values(series: DailySeries) -> tuple[np.ndarray, np.ndarray]:
    start = series.pe_start
    if start is None:
        raise NoPeCoverage("series has no P/E values")
    return series.pe[start:], series.dates[start:]


def _analysis_series(ctx: Context) -> np.ndarray:
    if ctx.args.series == "pe":
        return _pe_values(ctx.series)[0]
    if ctx.args.series == "close":
        return np.asarray(ctx.series.close)
    return pct_change(ctx.series.close, 1)


def _error_entry(spec, exc) -> dict:
    return {"label": spec.label, "days": spec.days, "error": type(exc).__name__, "message": str(exc)}


# --- subcommands -----------------------------------------------------------


def cmd_ingest_check(ctx: Context, command: str):
    s = ctx.series
    data = {
        "rows": len(s),
        "first_date": s.dates[0] if len(s) else None,
        "last_date": s.dates[-1] if len(s) else None,
        "pe_rows": int(s.has_pe.sum()),
        "pe_start": s.dates[s.pe_start] if s.pe_start is not None else None,
        "close_min": float(s.close.min()) if len(s) else None,
        "close_max": float(s.close.max()) if len(s) else None,
    }
    if s.pe_start is not None:
        eps = eps_proxy(s)
        growth = eps.trailing_growth[~np.isnan(eps.trailing_growth)]
        data["eps_last"] = float(eps.eps[-1])
        data["eps_growth_rows"] = int(growth.size)
    ctx.json(command, "ingest", data)


def cmd_returns(ctx: Context, command: str):
    horizons, summaries, errors = {}, [], []
    for spec in _ladder(ctx.args):
        try:
            rs = forward_returns(ctx.series, spec)
        except SeriesTooShort as exc:
            errors.append(_error_entry(spec, exc))
            continue
        summ = horizon_summary(rs)
        summaries.append(summ)
        horizons[spec.label] = {
            "days": spec.days,
            "n": len(rs),
            "returns": rs.returns,
            "start_dates": rs.start_dates,
            "summary": {"min": summ.min, "max": summ.max, "mode": summ.mode, "mode_prob": summ.mode_prob},
        }
    if not summaries:
        raise SeriesTooShort("series too short for every requested horizon")
    trap = trapping_horizon(summaries)
    ctx.json(command, "returns", {
        "horizons": horizons,
        "trapping_horizon": None if trap is None else {"label": trap.label, "days": trap.days},
        "errors": errors,
    })
    ctx.csv(
        "horizon_summary.csv",
        ["Horizon", "Days", "Min Return (%)", "Max Return (%)", "Mode Return (%)", "Mode Probability", "N"],
        [[s.spec.label, s.spec.days, s.min, s.max, s.mode, s.mode_prob, s.n] for s in summaries],
    )
    ctx.svg("horizons.svg", summaries, "horizons")


def cmd_cagr(ctx: Context, command: str):
    max_years = ctx.args.max_years or 12
    rows, errors = [], []
    for years in range(1, max_years + 1):
        try:
            rows.append(cagr_summary(ctx.series, years))
        except SeriesTooShort as exc:
            errors.append({"years": years, "error": type(exc).__name__, "message": str(exc)})
    if not rows:
        raise SeriesTooShort("series shorter than one holding year")
    ctx.json(command, "cagr", {"rows": rows, "errors": errors})
    ctx.csv(
        "cagr.csv",
        ["Holding Period", "Min CAGR (%)", "Max CAGR (%)", "Mode CAGR (%)"],
        [[f"{r.years} Year", r.min_cagr, r.max_cagr, r.mode_cagr] for r in rows],
    )


def _pmf_data(rep) -> dict:
    return {
        "label": rep.label,
        "n": rep.pmf.n,
        "rule": rep.pmf.rule,
        "edges": rep.pmf.edges,
        "mids": rep.pmf.mids,
        "probs": rep.pmf.probs,
        "stats": rep.stats,
        "asymmetry": rep.asymmetry,
    }


def cmd_pmf(ctx: Context, command: str):
    reports, errors = [], []
    if ctx.args.of == "eps-growth":
        eps = eps_proxy(ctx.series)
        growth = eps.trailing_growth[~np.isnan(eps.trailing_growth)]
        if growth.size == 0:
            raise SeriesTooShort(f"trailing EPS growth needs more than {TRADING_YEAR} P/E rows")
        reports.append(pmf_report(growth, "trailing 1Y EPS growth (%)", with_asymmetry=True))
    else:
        for spec in _ladder(ctx.args):
            try:
                rs = forward_returns(ctx.series, spec)
            except SeriesTooShort as exc:
                errors.append(_error_entry(spec, exc))
                continue
            reports.append(pmf_report(rs.returns, f"{spec.label} return (%)", with_asymmetry=True))
        if not reports:
            raise SeriesTooShort("series too short for every requested horizon")
    kind = "pmf" if ctx.args.of == "returns" else "eps_growth_pmf"
    ctx.json(command, kind, {"of": ctx.args.of, "pmfs": [_pmf_data(r) for r in reports], "errors": errors})
    ctx.csv(
        f"{kind}.csv",
        ["PMF", "N", "Mode", "Mode Probability", "Mean", "Std", "-1 Sigma", "+1 Sigma", "1 Sigma Coverage",
         "-2 Sigma", "+2 Sigma", "2 Sigma Coverage", "E[R+]", "E[R-]", "RRR (magnitude)", "PRP", "NRP",
         "RRR (probability)"],
        [[r.label, r.pmf.n, r.stats.mode, r.stats.mode_prob, r.stats.mean, r.stats.std, r.stats.band1.lo,
          r.stats.band1.hi, r.stats.band1.coverage, r.stats.band2.lo, r.stats.band2.hi, r.stats.band2.coverage,
          r.asymmetry.exp_pos, r.asymmetry.exp_neg, r.asymmetry.rrr_magnitude, r.asymmetry.prp,
          r.asymmetry.nrp, r.asymmetry.rrr_probability] for r in reports],
    )
    for r in reports:
        slug = r.label.split(" ")[0] if ctx.args.of == "returns" else "eps_growth"
        ctx.svg(f"pmf_{slug}.svg", r, "pmf")


def cmd_pe_pmf(ctx: Context, command: str):
    pe, _ = _pe_values(ctx.series)
    rep = pmf_report(pe, "P/E", thresholds=ctx.args.cdf_at)
    ctx.json(command, "pe_pmf", _pmf_data(rep))
    ctx.svg("pe_pmf.svg", rep, "pmf")


def cmd_pe_monthly(ctx: Context, command: str):
    pe, dates = _pe_values(ctx.series)
    monthly = monthly_pmfs(pe, dates)
    months = {}
    for month, pmf in monthly.pmfs.items():
        rep = PmfReport(f"P/E {MONTHS[month - 1]}", pmf, pmf_stats(pmf, monthly.samples[month], ctx.args.cdf_at))
        months[MONTHS[month - 1]] = _pmf_data(rep)
        ctx.svg(f"pe_monthly_{month:02d}.svg", rep, "pmf")
    ctx.json(command, "pe_monthly", {
        "months": months,
        "empty_months": [{"month": MONTHS[m - 1], "error": "EmptyMonth"} for m in monthly.empty],
    })


def cmd_entropy(ctx: Context, command: str):
    x = _analysis_series(ctx)
    rep = entropy_report(x, tuple(ctx.args.tsallis_q), m=ctx.args.m, r=ctx.args.r, order=ctx.args.order,
                         delay=ctx.args.delay)
    ctx.json(command, "entropy", {"series": ctx.args.series, "n": int(x.size), **serialize.jsonable(rep)})
    rows = [["Shannon Entropy", rep.shannon_norm]]
    rows += [[f"Tsallis Entropy (q={q:g})", v] for q, v in rep.tsallis_norm.items()]
    rows += [["Sample Entropy", rep.sample_entropy], ["Permutation Entropy", rep.permutation_norm]]
    ctx.csv("entropy.csv", ["Entropy Type", "Normalized Value"], rows)


def cmd_hurst(ctx: Context, command: str):
    x = _analysis_series(ctx)
    curve = generalized_hurst(x, qs=tuple(ctx.args.q), taus=DEFAULT_TAUS)
    ctx.json(command, "hurst", {"series": ctx.args.series, "n": int(x.size), **serialize.jsonable(curve)})
    ctx.csv("hurst.csv", ["Order q", "Generalized Hurst Exponent H(q)"],
            [[f"{q:g}", curve.h[q]] for q in curve.qs])


def cmd_lyapunov(ctx: Context, command: str):
    x = _analysis_series(ctx)
    rep = lyapunov_spectrum(x, dim=ctx.args.dim, delay=ctx.args.delay, neighbors=ctx.args.neighbors)
    ctx.json(command, "lyapunov", {"series": ctx.args.series, "n": int(x.size), "largest": rep.largest,
                                   **serialize.jsonable(rep)})
    rows = [[f"lambda_{i + 1}", v] for i, v in enumerate(rep.spectrum)]
    rows += [["h_KS", rep.ks_entropy], ["D_KY", rep.ky_dimension]]
    ctx.csv("lyapunov.csv", ["Lyapunov Exponent", "Value"], rows)


def cmd_profile(ctx: Context, command: str):
    prof = complexity_profile(ctx.series, _ladder(ctx.args), dim=ctx.args.dim, delay=ctx.args.delay)
    entries = [
        {"label": e.spec.label, "days": e.spec.days, "sne": e.sne, "hurst": e.hurst, "lle": e.lle,
         "error": e.error, "message": e.message}
        for e in prof.entries
    ]
    ctx.json(command, "profile", {"entries": entries, "params": prof.params})
    ctx.csv("profile.csv", ["Horizon", "Days", "SNE", "H(2)", "Largest Lyapunov", "Error"],
            [[e.spec.label, e.spec.days, e.sne, e.hurst, e.lle, e.error] for e in prof.entries])
    if any(e.error is None for e in prof.entries):
        ctx.svg("profile.svg", prof, "profile")


def cmd_mi(ctx: Context, command: str):
    driver, target = driver_target(ctx.series)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mi = mutual_information(driver, target)
    ctx.json(command, "mi", {"driver": "pe", "target": "next-day return (%)", "n": int(driver.size), "mi": mi,
                             "warnings": [str(w.message) for w in caught]})


def cmd_nmi(ctx: Context, command: str):
    driver, target = driver_target(ctx.series)
    curve = lagged_nmi(driver, target, ctx.args.max_lag)
    ctx.json(command, "nmi", {
        "driver": "pe", "target": "next-day return (%)", "max_lag": ctx.args.max_lag,
        "lags": list(range(1, ctx.args.max_lag + 1)), "nmi": curve,
        "driver_edges": symbolize(driver)[1], "target_edges": symbolize(target)[1],
    })
    ctx.csv("nmi.csv", ["Lag", "NMI"], [[i + 1, v] for i, v in enumerate(curve)])
    if curve.size:
        ctx.svg("nmi.svg", curve, "nmi")


def cmd_te(ctx: Context, command: str):
    driver, target = driver_target(ctx.series)
    fwd = transfer_entropy_detail(driver, target, ctx.args.k)
    data = {"driver": "pe", "target": "next-day return (%)", "history_k": ctx.args.k, "n": int(driver.size),
            "te_forward": fwd.value, "te_forward_raw": fwd.raw, "te_forward_clipped": fwd.clipped}
    if ctx.args.both or command == "report-all":
        bwd = transfer_entropy_detail(target, driver, ctx.args.k)
        data.update(te_backward=bwd.value, te_backward_raw=bwd.raw, te_backward_clipped=bwd.clipped)
    ctx.json(command, "te", data)


def cmd_conditional(ctx: Context, command: str):
    max_years = ctx.args.max_years or 7
    cells = conditional_cells(ctx.series, max_years)
    ctx.json(command, "conditional", {
        "band_lo": PE_BAND_LO, "band_hi": PE_BAND_HI, "max_years": max_years,
        "cells": [{"pe_range": c.label, "band": c.band, "years": c.years, "n": c.n, **serialize.jsonable(c.stats)}
                  for c in cells],
    })
    ctx.csv(
        "conditional.csv",
        ["PE Range", "Duration", "PRP", "NRP", "RRR (PRP/NRP)", "RRR (E[R+]/E[R-])", "N"],
        [[c.label, f"{c.years} Year", c.stats.prp, c.stats.nrp, c.stats.rrr_probability,
          c.stats.rrr_magnitude, c.n] for c in cells],
    )


def cmd_report_all(ctx: Context, command: str):
    """Whole pipeline, valuation stages last; stages that cannot run are logged and listed."""
    stages = [
        ("ingest-check", cmd_ingest_check),
        ("returns", cmd_returns),
        ("pmf", cmd_pmf),
        ("cagr", cmd_cagr),
        ("profile", cmd_profile),
        ("pe-pmf", cmd_pe_pmf),
        ("pe-monthly", cmd_pe_monthly),
        ("entropy", cmd_entropy),
        ("hurst", cmd_hurst),
        ("lyapunov", cmd_lyapunov),
        ("nmi", cmd_nmi),
        ("mi", cmd_mi),
        ("te", cmd_te),
        ("conditional", cmd_conditional),
    ]
    failed = []
    for name, fn in stages:
        try:
            fn(ctx, command)
        except DataError as exc:
            log.warning("%s skipped: %s", name, exc)
            failed.append({"stage": name, "error": type(exc).__name__, "message": str(exc)})
    if ctx.series.pe_start is not None:
        saved = ctx.args.of
        ctx.args.of = "eps-growth"
        try:
            cmd_pmf(ctx, command)
        except DataError as exc:
            failed.append({"stage": "pmf --of eps-growth", "error": type(exc).__name__, "message": str(exc)})
        finally:
            ctx.args.of = saved
    ctx.json(command, "report_all", {
        "files": sorted(p.name for p in ctx.written),
        "skipped": failed,
    })


HANDLERS = {
    "ingest-check": cmd_ingest_check,
    "returns": cmd_returns,
    "cagr": cmd_cagr,
    "pmf": cmd_pmf,
    "pe-pmf": cmd_pe_pmf,
    "pe-monthly": cmd_pe_monthly,
    "entropy": cmd_entropy,
    "hurst": cmd_hurst,
    "lyapunov": cmd_lyapunov,
    "profile": cmd_profile,
    "mi": cmd_mi,
    "nmi": cmd_nmi,
    "te": cmd_te,
    "conditional": cmd_conditional,
    "report-all": cmd_report_all,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
            raise UnknownCommand(f"unknown command {argv[0]!r}")
        args = parser.parse_args(argv)
        if args.command is None:
            raise UnknownCommand("no command given")
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        print(f"commands: {', '.join(COMMANDS)}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        ctx = Context(args)
        HANDLERS[args.command](ctx, args.command)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RegimeScopeError as exc:
        print(f"data error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in ctx.written:
        log.info("wrote %s", path)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

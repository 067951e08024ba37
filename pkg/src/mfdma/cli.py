"""Command-line front end.

Subcommands: ``generate`` (cascades and noise), ``analyze`` (one series or
surface), ``surrogate`` (shuffle, re-analyze, compare spectrum widths),
``compare`` (backward/centered/forward MFDMA plus MFDFA against an
analytic reference), and ``oracle`` (print closed-form tau/alpha/f).

Exit codes: 0 success, 2 validation error, 3 degenerate-data error,
4 I/O or input-format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .exceptions import DegenerateDataError, InputFormatError, ValidationError
from .generators import (
    CascadeSpec1D,
    CascadeSpec2D,
    binomial_measure_1d,
    cascade_measure_2d,
    gaussian_noise,
    shuffle_surrogate,
)
from .pipeline import (
    AnalysisConfig,
    analyze_series,
    emit_results,
    ingest_series,
    run_pipeline,
    series_digest,
    write_series_csv,
    write_surface_csv,
)
from .spectrum import (
    analytic_alpha_1d,
    analytic_alpha_2d,
    analytic_f_1d,
    analytic_f_2d,
    analytic_tau_1d,
    analytic_tau_2d,
    build_q_grid,
    spectrum_width,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4


def format_with_error(value: float, se: float, decimals: int = 3) -> str:
    """Render value(err) with the error in units of the last digit.

    0.874 with se 0.006 becomes ``0.874(6)``; errors of ten or more last
    digits keep their extra figures, as in ``1.401(12)``.
    """
    scaled = int(round(se * 10**decimals))
    return f"{value:.{decimals}f}({scaled})"


def _print_scaling_summary(bundle, label=None):
    est = bundle.estimate
    qs = est.qs.values
    if label:
        print(f"== {label} ==")
    picks = np.unique(np.linspace(0, qs.size - 1, min(9, qs.size)).round().astype(int))
    print(f"{'q':>6}  {'h(q)':>12}  {'tau(q)':>10}")
    for idx in picks:
        h_txt = format_with_error(est.h[idx], est.h_se[idx])
        print(f"{qs[idx]:>6g}  {h_txt:>12}  {est.tau[idx]:>10.3f}")
    print(f"spectrum width: {bundle.spectrum.width:.4f}")


def _parse_weights(text: str):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        weights = tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"weights must be comma-separated numbers, got {text!r}")
    if len(weights) != 4:
        raise ValidationError(f"expected four comma-separated weights, got {len(weights)}")
    return weights


def _add_analysis_options(parser: argparse.ArgumentParser, with_io=True):
    grid = parser.add_argument_group("analysis options")
    if with_io:
        grid.add_argument("--input", help="input data file")
        grid.add_argument("--mode", choices=("series", "surface"))
        grid.add_argument("--method", choices=("mfdma", "mfdfa"))
    grid.add_argument("--theta", type=float, help="window position parameter in [0, 1]")
    grid.add_argument("--q-min", type=float, dest="q_min")
    grid.add_argument("--q-max", type=float, dest="q_max")
    grid.add_argument("--q-step", type=float, dest="q_step")
    grid.add_argument("--n-min", type=int, dest="n_min")
    grid.add_argument("--n-max", type=int, dest="n_max")
    grid.add_argument("--n-count", type=int, dest="n_count")
    grid.add_argument("--fit-lo", type=float, dest="fit_lo")
    grid.add_argument("--fit-hi", type=float, dest="fit_hi")
    grid.add_argument(
        "--legendre-window",
        type=int,
        dest="legendre_half_window",
        help="half-window of the local tau(q) slope estimate (default 3)",
    )
    grid.add_argument("--seed", type=int)
    grid.add_argument("--out-dir", dest="out_dir")
    grid.add_argument("--format", dest="out_format", choices=("json", "csv-set", "plot-data"))
    grid.add_argument("--config", help="JSON config file; CLI flags take precedence")


def _config_from_args(args, **overrides) -> AnalysisConfig:
    keys = (
        "mode",
        "method",
        "theta",
        "q_min",
        "q_max",
        "q_step",
        "n_min",
        "n_max",
        "n_count",
        "fit_lo",
        "fit_hi",
        "legendre_half_window",
        "seed",
        "out_dir",
        "out_format",
    )
    options = {k: getattr(args, k, None) for k in keys}
    options["input_path"] = getattr(args, "input", None)
    options.update(overrides)
    return AnalysisConfig.from_sources(options, config_file=getattr(args, "config", None))


def cmd_generate(args) -> int:
    out = Path(args.out)
    if args.kind == "binomial":
        series = binomial_measure_1d(CascadeSpec1D(p1=args.p1, levels=args.levels))
        write_series_csv(series, out)
        print(f"wrote {series.name}: {len(series)} values to {out}")
    elif args.kind == "cascade2d":
        weights = _parse_weights(args.weights)
        surface = cascade_measure_2d(CascadeSpec2D(weights=weights, levels=args.levels))
        write_surface_csv(surface, out)
        print(f"wrote {surface.name}: {surface.shape[0]}x{surface.shape[1]} to {out}")
    else:
        series = gaussian_noise(args.length, args.seed)
        write_series_csv(series, out)
        print(f"wrote {series.name}: {len(series)} values to {out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args)
    if cfg.input_path is None:
        raise ValidationError("analyze needs --input")
    bundle = run_pipeline(cfg)
    _print_scaling_summary(bundle, label=Path(cfg.input_path).name)
    if cfg.out_dir is not None:
        written = emit_results(bundle, cfg.out_dir, cfg.out_format)
        for path in written:
            print(f"wrote {path}")
    return EXIT_OK


def cmd_surrogate(args) -> int:
    cfg = _config_from_args(args, mode="series")
    if cfg.input_path is None:
        raise ValidationError("surrogate needs --input")
    raw = ingest_series(cfg.input_path)
    shuffled = shuffle_surrogate(raw, cfg.seed)
    raw_bundle = analyze_series(cfg, raw)
    shuffled_bundle = analyze_series(cfg, shuffled)
    width_raw = spectrum_width(raw_bundle.spectrum)
    width_shuffled = spectrum_width(shuffled_bundle.spectrum)
    preserved = bool(
        np.array_equal(np.sort(raw.values), np.sort(shuffled.values))
    )
    summary = {
        "seed": cfg.seed,
        "width_raw": width_raw,
        "width_shuffled": width_shuffled,
        "width_change": width_shuffled - width_raw,
        "multiset_preserved": preserved,
    }
    _print_scaling_summary(raw_bundle, label="raw")
    _print_scaling_summary(shuffled_bundle, label=f"shuffled (seed {cfg.seed})")
    print(
        f"width raw = {width_raw:.4f}, shuffled = {width_shuffled:.4f}, "
        f"change = {summary['width_change']:+.4f}"
    )
    if cfg.out_dir is not None:
        out_dir = Path(cfg.out_dir)
        emit_results(raw_bundle, out_dir / "raw", cfg.out_format)
        emit_results(shuffled_bundle, out_dir / "shuffled", cfg.out_format)
        out_dir.mkdir(parents=True, exist_ok=True)
        summary_path = out_dir / "surrogate_summary.json"
        summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        print(f"wrote {summary_path}")
    return EXIT_OK


COMPARE_METHODS = (
    ("mfdma_theta0", "mfdma", 0.0),
    ("mfdma_theta0.5", "mfdma", 0.5),
    ("mfdma_theta1", "mfdma", 1.0),
    ("mfdfa", "mfdfa", 0.0),
)


def cmd_compare(args) -> int:
    if (args.analytic_p1 is None) == (args.analytic_weights is None):
        raise ValidationError(
            "compare needs exactly one analytic reference: --analytic-p1 or --analytic-weights"
        )
    cfg = _config_from_args(args)
    if cfg.input_path is None:
        raise ValidationError("compare needs --input")
    if args.analytic_weights is not None and cfg.mode != "surface":
        raise ValidationError("--analytic-weights implies --mode surface")

    bundles = {}
    for label, method, theta in COMPARE_METHODS:
        run_cfg = replace(cfg, method=method, theta=theta)
        bundles[label] = run_pipeline(run_cfg)

    qs = bundles["mfdma_theta0"].estimate.qs.values
    if args.analytic_p1 is not None:
        tau_ref = np.asarray(analytic_tau_1d(args.analytic_p1, qs))
    else:
        tau_ref = np.asarray(analytic_tau_2d(_parse_weights(args.analytic_weights), qs))

    sums = {label: float(np.abs(b.estimate.tau - tau_ref).sum()) for label, b in bundles.items()}
    ranking = sorted(sums, key=sums.get)
    print(f"{'q':>6}  " + "  ".join(f"{label:>15}" for label, *_ in COMPARE_METHODS))
    for i, q in enumerate(qs):
        cells = "  ".join(
            f"{bundles[label].estimate.tau[i] - tau_ref[i]:>15.4f}"
            for label, *_ in COMPARE_METHODS
        )
        print(f"{q:>6g}  {cells}")
    print("sum |delta tau|: " + ", ".join(f"{k} = {sums[k]:.4f}" for k in ranking))
    print("ranking (best first): " + " < ".join(ranking))

    if cfg.out_dir is not None:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, bundle in bundles.items():
            emit_results(bundle, out_dir / label.replace(".", "_"), cfg.out_format,
                         tau_reference=tau_ref if cfg.out_format == "plot-data" else None)
        path = out_dir / "delta_tau.csv"
        with open(path, "w") as handle:
            labels = [label for label, *_ in COMPARE_METHODS]
            handle.write(
                "q,tau_analytic,"
                + ",".join(f"tau_{l}" for l in labels)
                + ","
                + ",".join(f"dtau_{l}" for l in labels)
                + "\n"
            )
            for i, q in enumerate(qs):
                taus = [bundles[l].estimate.tau[i] for l in labels]
                cells = (
                    [repr(float(q)), repr(float(tau_ref[i]))]
                    + [repr(float(t)) for t in taus]
                    + [repr(float(t - tau_ref[i])) for t in taus]
                )
                handle.write(",".join(cells) + "\n")
        summary_path = out_dir / "compare_summary.json"
        summary_path.write_text(
            json.dumps({"sum_abs_dtau": sums, "ranking": ranking}, indent=2, sort_keys=True)
            + "\n"
        )
        print(f"wrote {path}")
        print(f"wrote {summary_path}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    if (args.p1 is None) == (args.weights is None):
        raise ValidationError("oracle needs exactly one of --p1 or --weights")
    q_min = args.q_min if args.q_min is not None else -4.0
    q_max = args.q_max if args.q_max is not None else 4.0
    q_step = args.q_step if args.q_step is not None else 0.1
    qs = build_q_grid(q_min, q_max, q_step).values
    if args.p1 is not None:
        tau = np.asarray(analytic_tau_1d(args.p1, qs))
        alpha = np.asarray(analytic_alpha_1d(args.p1, qs))
        f = np.asarray(analytic_f_1d(args.p1, qs))
    else:
        weights = _parse_weights(args.weights)
        tau = np.asarray(analytic_tau_2d(weights, qs))
        alpha = np.asarray(analytic_alpha_2d(weights, qs))
        f = np.asarray(analytic_f_2d(weights, qs))
    lines = ["q,tau,alpha,f"]
    lines += [
        f"{float(q)!r},{float(t)!r},{float(a)!r},{float(fv)!r}"
        for q, t, a, fv in zip(qs, tau, alpha, f)
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfdma",
        description="Multifractal analysis of series and surfaces by detrending moving averages.",
    )
    parser.add_argument("--version", action="version", version=f"mfdma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic measure or noise series")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    g1 = gen_sub.add_parser("binomial", help="deterministic binomial cascade measure")
    g1.add_argument("--p1", type=float, required=True, help="left-child mass fraction in (0, 1)")
    g1.add_argument("--levels", type=int, required=True, help="cascade steps; length is 2^levels")
    g1.add_argument("--out", required=True)
    g1.set_defaults(func=cmd_generate)
    g2 = gen_sub.add_parser("cascade2d", help="deterministic four-way square cascade")
    g2.add_argument("--weights", required=True, help="four comma-separated quadrant fractions")
    g2.add_argument("--levels", type=int, required=True, help="cascade steps; side is 2^levels")
    g2.add_argument("--out", required=True)
    g2.set_defaults(func=cmd_generate)
    g3 = gen_sub.add_parser("noise", help="seeded standard normal series")
    g3.add_argument("--length", type=int, required=True)
    g3.add_argument("--seed", type=int, default=0)
    g3.add_argument("--out", required=True)
    g3.set_defaults(func=cmd_generate)

    ana = sub.add_parser("analyze", help="analyze one series or surface")
    _add_analysis_options(ana)
    ana.set_defaults(func=cmd_analyze)

    sur = sub.add_parser("surrogate", help="analyze a series and its shuffled surrogate")
    _add_analysis_options(sur)
    sur.set_defaults(func=cmd_surrogate)

    cmp_parser = sub.add_parser(
        "compare", help="run backward/centered/forward MFDMA and MFDFA on one input"
    )
    _add_analysis_options(cmp_parser)
    cmp_parser.add_argument("--analytic-p1", type=float, dest="analytic_p1")
    cmp_parser.add_argument("--analytic-weights", dest="analytic_weights")
    cmp_parser.set_defaults(func=cmd_compare)

    orc = sub.add_parser("oracle", help="print closed-form tau/alpha/f of a cascade")
    orc.add_argument("--p1", type=float)
    orc.add_argument("--weights")
    orc.add_argument("--q-min", type=float, dest="q_min")
    orc.add_argument("--q-max", type=float, dest="q_max")
    orc.add_argument("--q-step", type=float, dest="q_step")
    orc.add_argument("--out")
    orc.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DegenerateDataError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputFormatError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

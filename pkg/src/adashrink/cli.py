"""Command-line interface.

Subcommands: ``synth`` (generate noisy signal + truth files), ``denoise``
(threshold a signal file and report the selected model), ``risk-curve``
(Monte Carlo per-k risk table for one method), ``experiment`` (preconfigured
reproduction runs) and ``verify`` (statistical verification suite).

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 data error.
All flags are long-form ``--name value``; no environment variables are read.
Every run echoes its fully resolved configuration to its output metadata
(file headers, report JSON, or config sidecar).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness, report, risk, shrinkage, signals, wavelet
from .orthobasis import coeff_set, forward, inverse, trig_design_matrix

__all__ = ["main"]

_EXIT_OK = 0
_EXIT_VERIFY_FAILED = 1
_EXIT_DATA = 3


def _fmt(x) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adashrink",
        description=(
            "Sparse orthogonal-regression denoising with order-statistic "
            "soft-thresholding, adaptive scaling and unbiased-risk model "
            "selection."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a noisy signal and its truth")
    synth.add_argument("--kind", required=True, choices=("trig", "heavisine", "blocks"))
    synth.add_argument("--n", required=True, type=int)
    synth.add_argument("--sigma2", type=float, default=1.0)
    synth.add_argument("--snr", type=float, default=None)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)

    den = sub.add_parser("denoise", help="denoise a signal file")
    den.add_argument("--in", dest="input", required=True)
    den.add_argument("--transform", required=True, choices=("trig", "dwt"))
    den.add_argument(
        "--method", required=True, choices=("lst", "ssp", "adaptive", "universal")
    )
    den.add_argument("--kmax", type=int, default=None, help="default min(300, n-1)")
    den.add_argument(
        "--noise",
        required=True,
        help="'mad', 'known:<sigma2>' or 'residual:<span>'",
    )
    den.add_argument("--out", required=True)
    den.add_argument("--dwt-level", type=int, default=2)
    den.add_argument("--df-convention", choices=("k", "paper-literal"), default="k")
    den.add_argument(
        "--ssp-formula", choices=("consistent", "paper-literal"), default="consistent"
    )
    den.add_argument(
        "--exempt-approx",
        action="store_true",
        help="exploratory: keep approximation coefficients unthresholded (dwt only)",
    )
    den.add_argument("--no-figures", action="store_true")

    curve = sub.add_parser("risk-curve", help="Monte Carlo per-k risk table")
    curve.add_argument("--kind", required=True, choices=("trig", "heavisine", "blocks"))
    curve.add_argument("--method", required=True, choices=harness.PATH_METHODS)
    curve.add_argument("--n", type=int, default=None)
    curve.add_argument("--kmax", type=int, default=None)
    curve.add_argument("--reps", type=int, default=200)
    curve.add_argument("--seed", type=int, default=0)
    curve.add_argument("--sigma2", type=float, default=1.0)
    curve.add_argument("--snr", type=float, default=None)
    curve.add_argument("--noise", default=None, help="'mad', 'known:<sigma2>' or 'residual:<span>'")
    curve.add_argument("--dwt-level", type=int, default=2)
    curve.add_argument("--df-convention", choices=("k", "paper-literal"), default="k")
    curve.add_argument(
        "--ssp-formula", choices=("consistent", "paper-literal"), default="consistent"
    )
    curve.add_argument("--workers", type=int, default=1)
    curve.add_argument("--out", required=True)
    curve.add_argument("--no-figures", action="store_true")

    exp = sub.add_parser("experiment", help="preconfigured reproduction runs")
    exp.add_argument(
        "name", choices=("trig-table1", "wavelet-heavisine", "wavelet-blocks")
    )
    exp.add_argument("--reps", type=int, default=None, help="defaults: 1000/500/500")
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--out-dir", required=True)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--df-convention", choices=("k", "paper-literal"), default="k")
    exp.add_argument(
        "--ssp-formula", choices=("consistent", "paper-literal"), default="consistent"
    )
    exp.add_argument("--no-figures", action="store_true")

    ver = sub.add_parser("verify", help="run the statistical verification suite")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--df-convention", choices=("k", "paper-literal"), default="k")
    ver.add_argument("--json", dest="json_path", default=None)
    ver.add_argument(
        "--quick", action="store_true", help="smoke mode with reduced replications"
    )
    return parser


def _parse_noise(parser, raw: str, transform: str, n: int):
    """Returns (method, sigma2_or_None, span_or_None); usage errors abort."""
    if raw == "mad":
        if transform != "dwt":
            parser.error("--noise mad needs the dwt transform (finest-scale details)")
        return "mad", None, None
    if raw.startswith("known:"):
        try:
            sigma2 = float(raw.split(":", 1)[1])
        except ValueError:
            parser.error(f"bad --noise value: {raw!r}")
        if sigma2 < 0:
            parser.error("known noise variance must be nonnegative")
        return "known", sigma2, None
    if raw.startswith("residual:"):
        try:
            span = int(raw.split(":", 1)[1])
        except ValueError:
            parser.error(f"bad --noise value: {raw!r}")
        if not 0 < span < n:
            parser.error(f"residual span must lie in (0, {n})")
        return "residual-regression", None, span
    parser.error(f"bad --noise value: {raw!r} (expected mad, known:<v> or residual:<m>)")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_synth(args) -> int:
    spec = signals.TargetSpec(
        kind=args.kind, n=args.n, sigma2=args.sigma2, snr=args.snr
    )
    h = signals.target_samples(spec)
    y = signals.add_noise(h, args.sigma2, args.seed)
    config = [
        "adashrink synth",
        f"kind={args.kind}",
        f"n={args.n}",
        f"sigma2={_fmt(args.sigma2)}",
        f"snr={'none' if args.snr is None else _fmt(args.snr)}",
        f"seed={args.seed}",
    ]
    signals.write_signal(args.out, y, header=config + ["role=noisy"])
    signals.write_signal(args.out + ".truth", h, header=config + ["role=truth"])
    print(f"wrote {args.out} and {args.out}.truth ({args.n} samples each)")
    return _EXIT_OK


def _cmd_denoise(args, parser) -> int:
    y = signals.read_signal(args.input)
    n = y.shape[0]
    if args.transform == "dwt":
        if n < 2 or n & (n - 1):
            raise ValueError(f"dwt transform needs a power-of-two length, got {n}")
        filt = wavelet.daubechies8()
        coeffs = wavelet.dwt_decompose(y, filt, args.dwt_level)
        z_full = wavelet.flatten(coeffs)
        finest = wavelet.finest_details(coeffs)

        def rebuild(vec):
            return wavelet.dwt_reconstruct(
                wavelet.unflatten(vec, coeffs.J, coeffs.J0), filt
            )

    else:
        if n < 4 or n % 2:
            raise ValueError(f"trig transform needs an even length >= 4, got {n}")
        design = trig_design_matrix(n)
        z_full = forward(design, y).z
        finest = None

        def rebuild(vec):
            return inverse(design, vec)

    noise_method, known_sigma2, span = _parse_noise(
        parser, args.noise, args.transform, n
    )
    if args.exempt_approx and args.transform != "dwt":
        parser.error("--exempt-approx applies to the dwt transform only")

    # Exploratory switch: keep the approximation block out of thresholding.
    skip = 2**args.dwt_level if (args.exempt_approx and args.transform == "dwt") else 0
    z_work = z_full[skip:]
    n_work = z_work.shape[0]

    kmax = min(300, n_work - 1) if args.kmax is None else args.kmax
    if args.method != "universal" and not 0 <= kmax <= n_work - 1:
        parser.error(f"kmax must lie in [0, {n_work - 1}], got {kmax}")

    if noise_method == "known":
        sigma2_hat = known_sigma2
    elif noise_method == "mad":
        sigma2_hat = risk.mad_sigma(finest).sigma2
    else:
        sigma2_hat = risk.residual_sigma(coeff_set(z_full), np.arange(span)).sigma2

    cs = coeff_set(z_work, sigma=float(np.sqrt(sigma2_hat)) if sigma2_hat else None)
    if args.method == "universal":
        fit = shrinkage.universal_fit(cs, sigma2_hat)
        record = risk.sure_lst(
            fit, cs, sigma2_hat, df_convention=args.df_convention, variant="universal"
        )
        selected_k, threshold, criterion = fit.k, fit.threshold, record.criterion
        denoised_work = fit.b
    else:
        tables = harness.path_tables(
            z_work,
            None,
            kmax,
            sigma2_hat,
            df_convention=args.df_convention,
            ssp_formula=args.ssp_formula,
            methods=(args.method,),
        )[args.method]
        selected_k = int(np.argmin(tables["criterion"]))
        criterion = float(tables["criterion"][selected_k])
        fit = shrinkage.lst_fit(cs, selected_k)
        threshold = fit.threshold
        if args.method == "lst":
            denoised_work = fit.b
        elif args.method == "adaptive":
            denoised_work = shrinkage.adaptive_scale(fit, cs).scaled
        else:
            denoised_work = shrinkage.ssp_scale(
                fit, cs, sigma2_hat, formula=args.ssp_formula
            ).scaled

    vec = np.concatenate([z_full[:skip], denoised_work]) if skip else denoised_work
    denoised = rebuild(vec)

    config = {
        "command": "denoise",
        "input": args.input,
        "output": args.out,
        "transform": args.transform,
        "method": args.method,
        "n": n,
        "kmax": None if args.method == "universal" else kmax,
        "noise": args.noise,
        "dwt_level": args.dwt_level if args.transform == "dwt" else None,
        "df_convention": args.df_convention,
        "ssp_formula": args.ssp_formula,
        "exempt_approx": bool(skip),
    }
    signals.write_signal(
        args.out,
        denoised,
        header=["adashrink denoise"]
        + [f"{k}={v}" for k, v in config.items() if k != "command"],
    )
    report_payload = dict(config)
    report_payload.update(
        {
            "selected_k": int(selected_k),
            "threshold": float(threshold),
            "sigma2_hat": float(sigma2_hat),
            "criterion": float(criterion),
        }
    )
    print(json.dumps(report_payload, sort_keys=True, indent=2))
    if not args.no_figures:
        report.denoise_figure(y, denoised, Path(args.out).with_suffix(".png"))
    return _EXIT_OK


def _curve_defaults(args, parser):
    if args.kind == "trig":
        n = 500 if args.n is None else args.n
        kmax = 50 if args.kmax is None else args.kmax
        noise = f"residual:{min(250, n // 2)}" if args.noise is None else args.noise
        snr = args.snr
    else:
        n = 1024 if args.n is None else args.n
        kmax = 300 if args.kmax is None else args.kmax
        noise = "mad" if args.noise is None else args.noise
        snr = 7.0 if args.snr is None else args.snr
    transform = "trig" if args.kind == "trig" else "dwt"
    noise_method, known_sigma2, span = _parse_noise(parser, noise, transform, n)
    if noise_method == "known" and known_sigma2 != args.sigma2:
        parser.error("known noise variance must match --sigma2 for simulations")
    return n, kmax, noise, noise_method, span, snr


def _cmd_risk_curve(args, parser) -> int:
    n, kmax, noise, noise_method, span, snr = _curve_defaults(args, parser)
    config = harness.ExperimentConfig(
        target=signals.TargetSpec(kind=args.kind, n=n, sigma2=args.sigma2, snr=snr),
        kmax=kmax,
        reps=args.reps,
        methods=(args.method,),
        base_seed=args.seed,
        noise_method=noise_method,
        residual_span_size=span or 0,
        dwt_level=args.dwt_level,
        df_convention=args.df_convention,
        ssp_formula=args.ssp_formula,
    )
    summary = harness.run_experiment(config, workers=args.workers)
    harness.write_curves_csv(summary, args.out)
    print(harness.config_json(config))
    if not args.no_figures:
        report.risk_curve_figure(summary, Path(args.out).with_suffix(".png"))
    return _EXIT_OK


def _cmd_experiment(args) -> int:
    config = harness.named_experiment_config(args.name, reps=args.reps, seed=args.seed)
    if args.df_convention != "k" or args.ssp_formula != "consistent":
        config = replace(
            config, df_convention=args.df_convention, ssp_formula=args.ssp_formula
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = harness.run_experiment(config, workers=args.workers)
    curves_path = out_dir / f"{args.name}-curves.csv"
    selection_path = out_dir / f"{args.name}-selection.csv"
    config_path = out_dir / f"{args.name}-config.json"
    harness.write_curves_csv(summary, curves_path)
    harness.write_selection_csv(summary, selection_path)
    config_path.write_text(harness.config_json(config) + "\n", encoding="ascii")
    if not args.no_figures:
        report.risk_curve_figure(summary, out_dir / f"{args.name}-risk.png")
        report.selection_figure(summary, out_dir / f"{args.name}-selection.png")
    print(harness.config_json(config))
    for method in config.methods:
        sel = summary.selection[method]
        print(
            f"{method}: mean_loss_at_selected={sel['mean_loss_at_selected']:.6g} "
            f"mean_selected_k={sel['mean_selected_k']:.6g} "
            f"(reps={summary.reps_used}, skipped={summary.reps_skipped})"
        )
    print(f"wrote {curves_path}, {selection_path}, {config_path}")
    return _EXIT_OK


def _cmd_verify(args) -> int:
    verification = harness.verify_all(
        args.seed,
        df_convention=args.df_convention,
        scale=0.02 if args.quick else 1.0,
    )
    for result in verification.results:
        status = "PASS" if result.passed else "FAIL"
        keys = ", ".join(
            f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
            for k, v in result.details.items()
            if isinstance(v, (int, float)) and not isinstance(v, bool)
        )
        print(f"[{status}] {result.name}" + (f" ({keys})" if keys else ""))
    if args.json_path:
        Path(args.json_path).write_text(
            verification.to_json() + "\n", encoding="ascii"
        )
    print("all checks passed" if verification.all_passed else "SOME CHECKS FAILED")
    return _EXIT_OK if verification.all_passed else _EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "denoise":
            return _cmd_denoise(args, parser)
        if args.command == "risk-curve":
            return _cmd_risk_curve(args, parser)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_verify(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``gapfill kernel | recover | diagnose | bench``.

Exit codes: 2 invalid arguments, 3 ill-conditioned kernel construction,
4 missing-mask mismatch, 5 benchmark trial failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings

import numpy as np

from . import io
from .exceptions import DegenerateProjection, GapfillError, IllConditioned, MaskViolation, WindowTooSmall
from .index_sets import MissingIndexSet, parse_times
from .kernel import build_kernel, kappa, l1_mass, mask_correction_l1
from .recovery import band_grid, degeneracy_diagnostic, recover, robustness_bound
from .signal_lab import GeneratorConfig, generate_profile, run_experiment, synthesize, trial_rng

EXIT_USAGE = 2
EXIT_ILL_CONDITIONED = 3
EXIT_MASK = 4
EXIT_TRIAL = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _missing(text):
    try:
        return parse_times(text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _band_n(text):
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError(f"n must be >= 2, got {n}")
    return n


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _eps(text):
    v = float(text)
    if not 0 < v < math.pi:
        raise argparse.ArgumentTypeError(f"eps must lie in (0, pi), got {v}")
    return v


def _sigma(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"sigma must be >= 0, got {v}")
    return v


def _kernel_summary(kernel) -> str:
    tf = kernel.transfer
    return (
        f"T={list(kernel.times)} n={kernel.n} radius={kernel.tap_radius} "
        f"kappa={kappa(tf):.6g} l1_mass={l1_mass(tf):.6g} "
        f"w_norm={tf.w.norm():.6g} mask_size={len(kernel.structure.s_T)} "
        f"mask_correction={mask_correction_l1(tf):.6g}"
    )


def cmd_kernel(args) -> int:
    kernel = build_kernel(args.missing, args.n, args.radius)
    if args.out:
        io.write_kernel(kernel, args.out, include_taps=not args.no_taps)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "h"])
            for t, v in zip(kernel.offsets, kernel.taps):
                writer.writerow([int(t), repr(float(v))])
    print(_kernel_summary(kernel))
    return 0


def cmd_recover(args) -> int:
    kernel = io.read_kernel(args.kernel)
    window, truth = io.read_signal_csv(args.input)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", WindowTooSmall)
        result = recover(window, kernel, shift=args.shift, truncate=args.truncate)
    for wrn in caught:
        print(f"warning: {wrn.message}", file=sys.stderr)
    if args.out:
        io.write_results_csv(result, args.out, truth)
    for t, est in zip(result.times, result.estimates):
        line = f"t={t} estimate={est:.12g}"
        if t in truth:
            line += f" truth={truth[t]:.12g} abs_error={abs(est - truth[t]):.3e}"
        print(line)
    return 0


def _dtft_magnitude(window, omega):
    x = np.where(window.missing, 0.0, window.samples)
    return np.abs(np.exp(-1j * np.multiply.outer(omega, window.times)) @ x)


def cmd_diagnose(args) -> int:
    kernel = build_kernel(args.missing, args.n, args.radius)
    tf = kernel.transfer
    omega = band_grid(tf.geom, args.points)
    if args.spectrum:
        data = np.loadtxt(args.spectrum, delimiter=",", skiprows=1, ndmin=2)
        omega, mag = data[:, 0], data[:, 1]
    else:
        window, _ = io.read_signal_csv(args.input)
        mag = _dtft_magnitude(window, omega)
    zeta, psi = degeneracy_diagnostic(mag, tf.w, tf.geom, omega=omega)
    print(f"zeta={zeta:.6g} psi={psi:.6g} kappa={kappa(tf):.6g}")
    return 0


def _bench_config(args):
    params = {
        "missing": args.missing, "n": args.n, "N": args.N, "eps_band": args.eps,
        "nbar": args.nbar, "trials": args.trials, "seed": args.seed, "sigma": args.sigma,
        "freq_mode": args.freq_mode,
    }
    if args.config:
        for key, value in io.read_config(args.config).items():
            params[key] = parse_times(json.dumps(value)) if key == "missing" else value
    T = params.pop("missing")
    if T is None:
        raise ValueError("--missing is required (flag or config)")
    T = T if isinstance(T, MissingIndexSet) else MissingIndexSet(T)
    n, sigma = params.pop("n"), params.pop("sigma")
    return T, n, sigma, GeneratorConfig(**params)


def cmd_bench(args) -> int:
    try:
        T, n, sigma, cfg = _bench_config(args)
    except (ValueError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_experiment(T, n, cfg, sigma=sigma)
    except IllConditioned:
        raise
    except Exception as exc:  # any trial-level failure aborts the benchmark
        print(f"benchmark aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TRIAL
    s = report.summary()
    print(f"T={list(T)} n={n} N={cfg.N} eps={cfg.eps_band} nbar={cfg.nbar} "
          f"trials={cfg.trials} seed={cfg.seed}")
    print(f"mean={s['mean']:.6g} median={s['median']:.6g} stderr={s['stderr']:.3g}")
    if sigma > 0:
        eps_hat = float(np.median([tr["sup_error"] for tr in report.trials]))
        bound = robustness_bound(eps_hat, sigma, report.kappa)
        print(f"sigma={sigma} kappa={report.kappa:.6g} median_eps={eps_hat:.6g} "
              f"robustness_bound={bound:.6g} violations={s['bound_violations']}")
    if args.out:
        with open(f"{args.out}.json", "w") as fh:
            fh.write(report.to_json())
        with open(f"{args.out}.csv", "w") as fh:
            fh.write(report.to_csv())
    if args.traces:
        kernel = build_kernel(T, n, cfg.N + max(abs(t) for t in T))
        with open(f"{args.traces}_kernel.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "h"])
            writer.writerows([int(t), repr(float(v))] for t, v in zip(kernel.offsets, kernel.taps))
        x = synthesize(generate_profile(cfg, trial_rng(cfg.seed, 0)), cfg)
        io.write_signal_csv(x.with_missing(T.times), f"{args.traces}_signal.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gapfill", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", help="synthesise a recovering kernel")
    k.add_argument("--missing", type=_missing, required=True, help="missing times, e.g. 0,3")
    k.add_argument("--n", type=_band_n, required=True, help="band parameter (>= 2)")
    k.add_argument("--radius", type=_positive, default=300, help="tap radius (default 300)")
    k.add_argument("--out", help="kernel JSON output path")
    k.add_argument("--csv", help="also write taps as t,h CSV")
    k.add_argument("--no-taps", action="store_true", help="omit the tap table from the JSON")
    k.set_defaults(func=cmd_kernel)

    r = sub.add_parser("recover", help="estimate missing samples of a signal CSV")
    r.add_argument("--kernel", required=True, help="kernel JSON")
    r.add_argument("--input", required=True, help="signal CSV with columns t,value,observed")
    r.add_argument("--shift", type=int, default=0, help="missing set is shift + T")
    r.add_argument("--out", help="results CSV output path")
    r.add_argument("--truncate", action="store_true",
                   help="accept a window narrower than the kernel support silently")
    r.set_defaults(func=cmd_recover)

    d = sub.add_parser("diagnose", help="band norms zeta, psi of a spectrum near +-pi")
    d.add_argument("--missing", type=_missing, required=True)
    d.add_argument("--n", type=_band_n, required=True)
    d.add_argument("--radius", type=_positive, default=50)
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="signal CSV; the spectrum is its DTFT")
    src.add_argument("--spectrum", help="CSV with columns omega,magnitude")
    d.add_argument("--points", type=_positive, default=513, help="grid points per band")
    d.set_defaults(func=cmd_diagnose)

    b = sub.add_parser("bench", help="Monte-Carlo recovery benchmark")
    b.add_argument("--missing", type=_missing, help="missing times, e.g. 0,15")
    b.add_argument("--n", type=_band_n, default=15)
    b.add_argument("--N", type=_positive, default=300, help="truncation radius")
    b.add_argument("--eps", type=_eps, default=0.4, help="excluded band half-width")
    b.add_argument("--nbar", type=_positive, default=10)
    b.add_argument("--trials", type=_positive, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sigma", type=_sigma, default=0.0, help="noise spectral L1 intensity")
    b.add_argument("--freq-mode", choices=("window", "low"), default="window")
    b.add_argument("--config", help="experiment config JSON (overrides flags)")
    b.add_argument("--out", help="write OUT.json and OUT.csv reports")
    b.add_argument("--traces", help="write TRACES_kernel.csv and TRACES_signal.csv")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IllConditioned, DegenerateProjection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ILL_CONDITIONED
    except MaskViolation as exc:
        print(f"mask mismatch: {exc}", file=sys.stderr)
        return EXIT_MASK
    except (ValueError, OSError, GapfillError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

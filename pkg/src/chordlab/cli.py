"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 ambiguous
deduplication in ``ngon --distinct``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import distribution as dist
from . import montecarlo as mc
from . import ngon
from .errors import (
    AmbiguityError,
    AtomError,
    ConvergenceError,
    DomainError,
    QuadratureError,
    SingularityError,
)
from .measures import builtin, load_tabulated, resolve_name
from .quadrature import QuadratureSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_AMBIGUOUS = 4

MODELS = ("radius", "midpoint", "endpoints", "gaussian")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: str
    rmin: float
    rmax: float
    steps: int
    log: bool
    n: Optional[int]
    seed: int
    threads: int
    tol: float
    fmt: str
    out: Optional[str]

    def __post_init__(self):
        if self.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {self.threads}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")

    def grid(self) -> np.ndarray:
        if not (math.isfinite(self.rmin) and math.isfinite(self.rmax)):
            raise UsageError("grid bounds must be finite")
        if not 0.0 <= self.rmin < self.rmax:
            raise UsageError(f"need 0 <= rmin < rmax, got {self.rmin}, {self.rmax}")
        if self.steps < 2:
            raise UsageError(f"--steps must be >= 2, got {self.steps}")
        if self.log:
            if self.rmin <= 0.0:
                raise UsageError("a log grid needs rmin > 0")
            return np.geomspace(self.rmin, self.rmax, self.steps)
        return np.linspace(self.rmin, self.rmax, self.steps)

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.tol)


def _threads_default() -> int:
    raw = os.environ.get("CHORDLAB_THREADS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CHORDLAB_THREADS must be an integer, got {raw!r}") from None


def _config(args) -> RunConfig:
    threads = args.threads if getattr(args, "threads", None) is not None else _threads_default()
    return RunConfig(
        subcommand=args.command,
        model=getattr(args, "model", "endpoints"),
        rmin=getattr(args, "rmin", 0.0),
        rmax=getattr(args, "rmax", 2.0),
        steps=getattr(args, "steps", 41),
        log=getattr(args, "log", False),
        n=getattr(args, "n", None),
        seed=getattr(args, "seed", 0),
        threads=threads,
        tol=getattr(args, "tol", 1e-12),
        fmt=getattr(args, "format", "csv"),
        out=getattr(args, "out", None),
    )


def _emit(cfg: RunConfig, text: str, summary: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _curve_text(curve: dist.CdfCurve, fmt: str) -> str:
    return curve.to_json() + "\n" if fmt == "json" else curve.to_csv()


def cmd_cdf(cfg: RunConfig) -> int:
    curve = dist.cdf_curve(cfg.model, list(cfg.grid()), cfg.quad)
    _emit(cfg, _curve_text(curve, cfg.fmt),
          f"cdf {curve.model_label}: {len(curve.grid)} points -> {cfg.out}")
    return EXIT_OK


def cmd_density(cfg: RunConfig) -> int:
    if resolve_name(cfg.model) is not resolve_name("endpoints"):
        raise UsageError("density is available for the endpoints model only")
    rows = [(float(r), dist.density_endpoints(float(r), cfg.quad))
            for r in cfg.grid() if r != 1.0]
    if cfg.fmt == "json":
        text = json.dumps({"model": "UniformEndpoints", "points": rows}) + "\n"
    else:
        text = "r,density\n" + "".join(
            f"{dist.format_number(r)},{dist.format_number(v)}\n" for r, v in rows)
    _emit(cfg, text, f"density: {len(rows)} points -> {cfg.out}")
    return EXIT_OK


def _need_n(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.n < 1:
        raise UsageError("--n must be given and >= 1")
    return cfg.n


def cmd_sample(cfg: RunConfig, histogram: bool) -> int:
    n = _need_n(cfg)
    if histogram or cfg.fmt == "json":
        h = mc.run_mc_histogram(cfg.model, n, cfg.seed, cfg.threads)
        _emit(cfg, h.to_json() + "\n",
              f"sample {h.model_label}: {h.count} distances binned, "
              f"{h.parallel_skips} parallel skips -> {cfg.out}")
        return EXIT_OK
    s = mc.run_mc(cfg.model, n, cfg.seed, cfg.threads)
    _emit(cfg, s.to_csv(), f"sample {s.model_label}: {s.count} distances, "
                           f"{s.parallel_skips} parallel skips -> {cfg.out}")
    return EXIT_OK


def cmd_kstest(cfg: RunConfig, threshold: float) -> int:
    n = _need_n(cfg)
    s = mc.run_mc(cfg.model, n, cfg.seed, cfg.threads)
    d = mc.ks_statistic(s, dist.closed_form_cdf(cfg.model))
    verdict = "PASS" if d <= threshold else "FAIL"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump({"model": s.model_label, "n": s.count, "seed": cfg.seed, "D": d,
                       "threshold": threshold, "result": verdict}, fh)
            fh.write("\n")
    print(f"kstest {s.model_label} n={s.count} seed={cfg.seed}: "
          f"D = {dist.format_number(d)} {verdict} (threshold {threshold:g})")
    return EXIT_OK


def _parse_radii(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--radii must be comma-separated numbers, got {text!r}") from None


def cmd_ngon(cfg: RunConfig, radii_text: str, distinct: bool, lines: bool) -> int:
    n = _need_n(cfg)
    if n < 4:
        raise UsageError("--n must be >= 4 for polygon counts")
    radii = _parse_radii(radii_text)
    report = ngon.NgonReport(n, np.asarray(radii), total_pairs=math.comb(n, 4))
    report.pr_formula_value = ngon.poonen_rubinstein(n)
    lines_summary = ""
    if lines:
        lr = ngon.lines_histogram(n, radii, cfg.threads)
        report.lines_counts = lr.lines_counts
        report.parallel_pairs = lr.parallel_pairs
        report.nonparallel_total = lr.nonparallel_total
        lines_summary = f"; lines: {lr.nonparallel_total} non-parallel, {lr.parallel_pairs} parallel"
    inside = [r for r in radii if r <= 1.0]
    if len(inside) == len(radii):
        report.counts_with_multiplicity = ngon.count_with_multiplicity(
            n, radii, cfg.threads).counts_with_multiplicity
    elif not lines:
        raise UsageError("radii above 1 need --lines")
    if distinct:
        count = ngon.distinct_count(n)
        report.distinct_interior = count
        match = "true" if count == report.pr_formula_value else "false"
        print(f"distinct interior points for n={n}: {count}")
        print(f"matches PR formula: {match}")
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        print(f"ngon n={n}: C(n,4) = {report.total_pairs}{lines_summary} -> {cfg.out}")
    else:
        print(report.to_json())
    return EXIT_OK


def cmd_transform(cfg: RunConfig, measure_file: Optional[str]) -> int:
    m = load_tabulated(measure_file) if measure_file else builtin(cfg.model)
    radii = list(cfg.grid())
    values = [dist.transform_cdf(m, r, cfg.quad) for r in radii]
    curve = dist.CdfCurve(m.display_name, tuple(zip(radii, values)), dist.Provenance.QUADRATURE)
    _emit(cfg, _curve_text(curve, cfg.fmt),
          f"transform {curve.model_label}: {len(radii)} points -> {cfg.out}")
    return EXIT_OK


def cmd_region(cfg: RunConfig, rlo, rhi, thlo, thhi) -> int:
    p = dist.region_probability(cfg.model, rlo, rhi, thlo, thhi, cfg.quad)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump({"model": cfg.model, "r_lo": rlo, "r_hi": rhi,
                       "theta_lo": thlo, "theta_hi": thhi, "probability": p}, fh)
            fh.write("\n")
    print(f"region probability: {dist.format_number(p)}")
    return EXIT_OK


def _add_common(p, grid=False, sampling=False, model=True):
    if model:
        p.add_argument("--model", default="endpoints", choices=MODELS,
                       help="line model (default: endpoints)")
    if grid:
        p.add_argument("--rmin", type=float, default=0.0, help="smallest radius of the grid")
        p.add_argument("--rmax", type=float, default=2.0, help="largest radius of the grid")
        p.add_argument("--steps", type=int, default=41, help="number of grid points (>= 2)")
        p.add_argument("--log", action="store_true", help="log-spaced grid (needs rmin > 0)")
    if sampling:
        p.add_argument("--n", type=int, help="number of samples or polygon vertices")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $CHORDLAB_THREADS or 1)")
    p.add_argument("--tol", type=float, default=1e-12, help="absolute quadrature tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--out", help="write data here and print a summary instead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chordlab",
        description="Distance from the center to the intersection of two random chords or lines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", help="tabulate P(distance <= r)")
    _add_common(p, grid=True)
    p = sub.add_parser("density", help="tabulate the uniform-endpoint density (r = 1 skipped)")
    _add_common(p, grid=True)
    p = sub.add_parser("sample", help="Monte Carlo sample of intersection distances")
    _add_common(p, sampling=True)
    p.add_argument("--histogram", action="store_true",
                   help="stream into 10^4 log-spaced bins instead of storing every distance")
    p = sub.add_parser("kstest", help="Kolmogorov-Smirnov test of a sample against the exact CDF")
    _add_common(p, sampling=True)
    p.add_argument("--threshold", type=float, default=0.005, help="PASS when D <= threshold")
    p = sub.add_parser("ngon", help="diagonal intersections of the regular n-gon")
    _add_common(p, sampling=True, model=False)
    p.add_argument("--radii", default="0.25,0.5,0.75,0.9,1",
                   help="ascending comma-separated radii (default 0.25,0.5,0.75,0.9,1)")
    p.add_argument("--distinct", action="store_true",
                   help="count distinct interior points and compare with the closed formula")
    p.add_argument("--lines", action="store_true", help="also count extended-line intersections")
    p = sub.add_parser("transform", help="CDF of a line law through the integral transform")
    _add_common(p, grid=True)
    p.add_argument("--measure-file", help="CSV with header t,F giving a tabulated distance CDF")
    p = sub.add_parser("region", help="probability of landing in an annular sector")
    _add_common(p)
    p.add_argument("--rlo", type=float, required=True, help="inner radius")
    p.add_argument("--rhi", type=float, required=True, help="outer radius (may be inf)")
    p.add_argument("--thlo", type=float, required=True, help="start angle in radians")
    p.add_argument("--thhi", type=float, required=True, help="end angle in radians")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a bare trailing "--" ends option parsing with nothing after it
    if argv and argv[-1] == "--":
        argv.pop()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        if args.command == "cdf":
            return cmd_cdf(cfg)
        if args.command == "density":
            return cmd_density(cfg)
        if args.command == "sample":
            return cmd_sample(cfg, args.histogram)
        if args.command == "kstest":
            return cmd_kstest(cfg, args.threshold)
        if args.command == "ngon":
            return cmd_ngon(cfg, args.radii, args.distinct, args.lines)
        if args.command == "transform":
            return cmd_transform(cfg, args.measure_file)
        if args.command == "region":
            return cmd_region(cfg, args.rlo, args.rhi, args.thlo, args.thhi)
    except (UsageError, DomainError, AtomError, ValueError, OSError) as exc:
        print(f"chordlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AmbiguityError as exc:
        print(f"chordlab: ambiguous: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except (QuadratureError, ConvergenceError, SingularityError, ArithmeticError) as exc:
        print(f"chordlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

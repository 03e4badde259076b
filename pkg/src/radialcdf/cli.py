"""Command-line interface.

Subcommands:

* ``estimate``  fit estimators to a CSV of positions or squared radii and
                write plot-ready curve files,
* ``ci``        pointwise bootstrap confidence bands along a grid,
* ``simulate``  draw synthetic squared radii from a built-in model,
* ``mc``        Monte Carlo sampling-distribution study,
* ``coverage``  bootstrap coverage study.

Exit codes: 0 success, 2 configuration error, 3 ingestion error,
4 numerical failure.  Outputs depend only on the configuration and seed;
rerunning a command reproduces its files byte for byte, for any value of
``--threads``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import coverage_study, mc_sampling_distribution
from .bootstrap import BOOTSTRAP_GCM_REFINEMENT, ci_curve_with_diagnostics
from .dataio import SPEC_VERSION, ingest, write_csv, write_json
from .errors import IngestionError, InvalidInputError, SingularEvaluationError
from .estimators import (
    DEFAULT_GRID_REFINEMENT,
    EstimatorKind,
    SquaredRadiusSample,
    fit_step_estimator,
    _naive_cdf_many,
    _naive_tail_many,
)
from .models import model_from_name, sample_y
from .streams import substream

EXIT_OK, EXIT_CONFIG, EXIT_INGEST, EXIT_NUMERIC = 0, 2, 3, 4

_KIND_TOKENS = {k.value: k for k in EstimatorKind}


class ConfigError(Exception):
    pass


def _parse_kinds(spec: str) -> list[EstimatorKind]:
    kinds = []
    for token in spec.split(","):
        token = token.strip()
        if token not in _KIND_TOKENS:
            raise ConfigError(f"unknown estimator kind {token!r}; choose from {sorted(_KIND_TOKENS)}")
        if _KIND_TOKENS[token] not in kinds:
            kinds.append(_KIND_TOKENS[token])
    if not kinds:
        raise ConfigError("at least one estimator kind is required")
    return kinds


def _parse_grid(spec: str) -> np.ndarray:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError("grid range must be start:stop:count")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {spec!r}") from exc
        if count < 1 or not (0 < start < stop):
            raise ConfigError("grid needs 0 < start < stop and count >= 1")
        grid = np.linspace(start, stop, count)
    else:
        try:
            grid = np.asarray([float(t) for t in spec.split(",") if t.strip()], dtype=float)
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {spec!r}") from exc
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("grid must be positive and strictly increasing")
    return grid


def _config_dict(args: argparse.Namespace) -> dict:
    # threads is an execution knob with no effect on results; leaving it out
    # keeps outputs byte-identical across worker counts
    skip = {"func", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _step_rows(step) -> list[tuple[float, float]]:
    rows = [(step.domain_start, step.left_value)] if (
        step.knots.size == 0 or step.domain_start < step.knots[0]
    ) else []
    rows.extend(zip(step.knots.tolist(), step.values.tolist()))
    return rows


def _ingest_sample(args) -> tuple[SquaredRadiusSample, dict]:
    ds = ingest(args.input, columns=args.columns, recenter=args.recenter)
    meta = {
        "n": ds.sample.n,
        "n_rows": ds.n_rows,
        "rejected_rows": [[int(r), why] for r, why in ds.rejected_rows],
        "columns": ds.columns,
        "recenter": ds.recenter,
    }
    return ds.sample, meta


def cmd_estimate(args) -> int:
    kinds = _parse_kinds(args.kinds)
    sample, ingest_meta = _ingest_sample(args)
    out = Path(args.out)
    grid = _parse_grid(args.grid) if args.grid else None
    files, masked = [], {}
    for kind in kinds:
        fname = f"estimate_{kind.value}.csv"
        if kind.is_naive:
            if grid is None:
                raise ConfigError("naive kinds need --grid")
            keep = np.array([not sample.is_data_point(x) for x in grid])
            masked[kind.value] = [float(x) for x in grid[~keep]]
            fn = _naive_tail_many if kind is EstimatorKind.NAIVE_TAIL else _naive_cdf_many
            values = fn(sample, grid[keep])
            write_csv(out / fname, ["x", "value"], zip(grid[keep].tolist(), values.tolist()))
        else:
            step = fit_step_estimator(kind, sample, args.gcm_refinement)
            write_csv(out / fname, ["x", "value"], _step_rows(step))
        files.append(fname)
    write_json(out / "metadata.json", {
        "spec_version": SPEC_VERSION,
        "package_version": __version__,
        "command": "estimate",
        "config": _config_dict(args),
        "ingest": ingest_meta,
        "files": sorted(files),
        "masked_grid_points": masked,
    })
    return EXIT_OK


def cmd_ci(args) -> int:
    kinds = _parse_kinds(args.kinds)
    sample, ingest_meta = _ingest_sample(args)
    grid = _parse_grid(args.grid)
    out = Path(args.out)
    files, nudged_counts, curves = [], {}, {}
    for kind in kinds:
        results, nudged = ci_curve_with_diagnostics(
            sample, kind, grid, args.B, args.alpha, args.seed,
            style=args.interval_style, gcm_refinement=args.gcm_refinement,
            threads=args.threads,
        )
        nudged_counts[kind.value] = nudged
        curves[kind] = np.array([r.point_estimate for r in results])
        fname = f"ci_{kind.value}.csv"
        write_csv(
            out / fname,
            ["x", "estimate", "lower", "upper"],
            [(x, r.point_estimate, r.lower, r.upper) for x, r in zip(grid.tolist(), results)],
        )
        files.append(fname)
    meta = {
        "spec_version": SPEC_VERSION,
        "package_version": __version__,
        "command": "ci",
        "config": _config_dict(args),
        "ingest": ingest_meta,
        "files": sorted(files),
        "nudged_evaluations": nudged_counts,
        "convergence_scale": float(np.sqrt(np.log(sample.n) / sample.n)) if sample.n >= 2 else None,
    }
    both = (EstimatorKind.ISO_CDF, EstimatorKind.GCM_CDF)
    if all(k in curves for k in both):
        diff = curves[both[0]] - curves[both[1]]
        write_csv(out / "diff_iso-cdf_gcm-cdf.csv", ["x", "difference"],
                  zip(grid.tolist(), diff.tolist()))
        files.append("diff_iso-cdf_gcm-cdf.csv")
        meta["files"] = sorted(files)
        meta["iso_gcm_sup_abs_difference"] = float(np.max(np.abs(diff)))
    write_json(out / "metadata.json", meta)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = model_from_name(args.model, args.scale)
    sample = sample_y(model, args.n, substream(args.seed, 0))
    write_csv(Path(args.out), ["y"], [(v,) for v in sample.y.tolist()])
    return EXIT_OK


def cmd_mc(args) -> int:
    model = model_from_name(args.model, args.scale)
    report = mc_sampling_distribution(
        model, _KIND_TOKENS[args.kind], args.n, args.x0, args.reps, args.seed,
        threads=args.threads, gcm_refinement=args.gcm_refinement,
    )
    payload = {
        "spec_version": SPEC_VERSION,
        "package_version": __version__,
        "command": "mc",
        "config": _config_dict(args),
        "report": report.to_dict(),
    }
    _write_report(Path(args.out), payload, args.format)
    return EXIT_OK


def cmd_coverage(args) -> int:
    model = model_from_name(args.model, args.scale)
    report = coverage_study(
        model, _KIND_TOKENS[args.kind], args.n, args.x0, args.B, args.alpha,
        args.reps, args.seed, threads=args.threads,
        interval_style=args.interval_style,
    )
    payload = {
        "spec_version": SPEC_VERSION,
        "package_version": __version__,
        "command": "coverage",
        "config": _config_dict(args),
        "report": report.to_dict(),
    }
    _write_report(Path(args.out), payload, args.format)
    return EXIT_OK


def _write_report(path: Path, payload: dict, fmt: str) -> None:
    if fmt == "json":
        write_json(path, payload)
    else:
        report = payload["report"]
        keys = sorted(report)
        write_csv(path, keys, [tuple(report[k] if report[k] is not None else "" for k in keys)])


def _add_common(p, *, seeded=True):
    p.add_argument("--threads", type=int, default=1, help="worker processes (results are identical for any count)")
    if seeded:
        p.add_argument("--seed", type=int, required=True, help="64-bit seed")


def _add_ingest_args(p):
    p.add_argument("--input", required=True, help="CSV with columns x1,x2 or y")
    p.add_argument("--columns", choices=["y", "x1,x2"], default=None,
                   help="input columns (default: detect from header)")
    p.add_argument("--recenter", choices=["none", "mean", "median"], default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radialcdf",
        description="Estimate the squared-radius distribution of a spherically "
                    "symmetric point cloud from projected positions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit estimators and write curve files")
    _add_ingest_args(p)
    p.add_argument("--kinds", required=True, help="comma list: " + ",".join(sorted(_KIND_TOKENS)))
    p.add_argument("--grid", default=None, help="grid for naive kinds: start:stop:count or comma list")
    p.add_argument("--gcm-refinement", type=int, default=DEFAULT_GRID_REFINEMENT)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p, seeded=False)
    p.set_defaults(func=cmd_estimate, seed=None)

    p = sub.add_parser("ci", help="pointwise bootstrap confidence intervals")
    _add_ingest_args(p)
    p.add_argument("--kinds", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--B", type=int, default=300, help="bootstrap replicates")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--interval-style", choices=["root-basic", "percentile"], default="root-basic")
    p.add_argument("--gcm-refinement", type=int, default=BOOTSTRAP_GCM_REFINEMENT)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("simulate", help="draw squared radii from a built-in model")
    p.add_argument("--model", choices=["ball", "gaussian3d"], required=True)
    p.add_argument("--scale", type=float, default=1.0, help="ball radius or gaussian sigma")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV file")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mc", help="sampling-distribution Monte Carlo study")
    p.add_argument("--model", choices=["ball", "gaussian3d"], required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--kind", choices=sorted(_KIND_TOKENS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--gcm-refinement", type=int, default=BOOTSTRAP_GCM_REFINEMENT)
    p.add_argument("--out", required=True, help="output report file")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("coverage", help="bootstrap coverage study")
    p.add_argument("--model", choices=["ball", "gaussian3d"], required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--kind", choices=sorted(_KIND_TOKENS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--interval-style", choices=["root-basic", "percentile"], default="root-basic")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--out", required=True, help="output report file")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common(p)
    p.set_defaults(func=cmd_coverage)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestionError as exc:
        print(f"ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except (SingularEvaluationError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

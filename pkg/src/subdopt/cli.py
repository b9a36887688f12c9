"""Command-line surface: select, simulate, bootstrap, timing, hull.

Every command writes a run manifest (tool version, resolved config, rng
seeds, input checksum, wall-clock timings, output checksums) next to its
outputs.  Reports themselves never contain wall-clock times, so a replay
from the manifest reproduces them byte for byte; timings live in the
manifest only.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, exchange, metrics, seeding, simulate
from .ingest import IngestError, IngestSpec, ingest
from .linalg import SingularMomentError
from .simulate import ConfigError, ExperimentConfig, OutlierSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INGEST = 3
EXIT_NUMERIC = 4


# ---------------------------------------------------------------- helpers

def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _col(value):
    """Column reference: integer index if it parses, else a name."""
    try:
        return int(value)
    except ValueError:
        return value


def _ingest_spec_from_args(args):
    return IngestSpec(
        path=args.input,
        delimiter=args.delimiter,
        header=not args.no_header,
        response=_col(args.response) if args.response is not None else None,
        covariates=[_col(c) for c in args.covariates.split(",")]
        if args.covariates else None,
        skip_rows=args.skip_rows,
        log_columns=[_col(c) for c in args.log_columns.split(",")]
        if args.log_columns else [],
    )


def _ingest_spec_dict(spec):
    return {"path": spec.path, "delimiter": spec.delimiter,
            "header": spec.header, "response": spec.response,
            "covariates": spec.covariates, "skip_rows": spec.skip_rows,
            "log_columns": list(spec.log_columns)}


def _manifest(command, config, seeds, input_path, outdir, timings, outputs):
    return {
        "tool": "subdopt",
        "version": __version__,
        "command": command,
        "config": config,
        "rng_seeds": seeds,
        "input_checksum": _sha256(input_path) if input_path else None,
        "timings": timings,
        "outputs": {name: _sha256(Path(outdir) / name) for name in outputs},
    }


def _finish(command, config, seeds, input_path, outdir, timings, outputs):
    _write_json(Path(outdir) / "manifest.json",
                _manifest(command, config, seeds, input_path, outdir,
                          timings, outputs))


def _record_row(r):
    row = {"method": r.method, "repetition": r.repetition, "seed": r.seed,
           "k": r.k, "K": r.K, "iterations": r.iterations,
           "outliers_selected": r.outliers_selected, "error": r.error}
    if r.mse is not None:
        row.update(mse_intercept=r.mse.mse_intercept,
                   mse_slopes=r.mse.mse_slopes)
    if r.eff is not None:
        row.update(gen_variance=r.eff.gen_variance, d_eff=r.eff.d_eff,
                   a_eff=r.eff.a_eff, log_det_q=r.eff.log_det_q)
    return row


_CSV_FIELDS = ["method", "repetition", "seed", "k", "K", "iterations",
               "mse_intercept", "mse_slopes", "gen_variance", "d_eff",
               "a_eff", "log_det_q", "outliers_selected", "error"]


def _write_report(report, outdir):
    rows = [_record_row(r) for r in report.records]
    agg = report.aggregates()
    for method_agg in agg.values():
        method_agg.pop("mean_seconds", None)  # keep reports deterministic
    _write_json(Path(outdir) / "report.json",
                {"records": rows, "aggregates": agg})
    with open(Path(outdir) / "report.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS,
                                extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    return ["report.json", "report.csv"]


def _print_aggregates(report):
    agg = report.aggregates()
    print(f"{'method':<8} {'mse_slopes':>12} {'mse_b0':>10} "
          f"{'d_eff':>8} {'a_eff':>8} {'gen_var':>12}")
    for method, a in agg.items():
        if a.get("failed") or "mse_slopes" not in a:
            print(f"{method:<8} (all repetitions failed)")
            continue
        print(f"{method:<8} {a['mse_slopes']['mean']:>12.5g} "
              f"{a['mse_intercept']['mean']:>10.5g} "
              f"{a['d_eff']['mean']:>8.4f} {a['a_eff']['mean']:>8.4f} "
              f"{a['gen_variance']['mean']:>12.5g}")


# ---------------------------------------------------------------- select

def _cmd_select(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = _ingest_spec_from_args(args)
    ds = ingest(spec)
    x_scaled, _ = seeding.scale_to_unit_cube(ds.x)
    t0 = time.perf_counter()
    trace = None
    if args.method in ("alg1", "valg1"):
        seed, _ = simulate.select_subdata(x_scaled, args.seed_method,
                                          args.k, args.K,
                                          rng_seed=args.seed)
        if args.method == "alg1":
            sel, trace = exchange.alg1(x_scaled, seed, args.K,
                                       args.iterations)
        else:
            sel, trace = exchange.valg1(x_scaled, seed, args.K)
    else:
        sel, _ = simulate.select_subdata(x_scaled, args.method, args.k,
                                         args.K, rng_seed=args.seed)
    seconds = time.perf_counter() - t0
    eff = metrics.efficiency(x_scaled, sel)

    (outdir / "indices.txt").write_text(
        "".join(f"{i}\n" for i in sel.indices))
    report = {
        "method": args.method,
        "n": int(ds.x.shape[0]),
        "p": int(ds.x.shape[1]),
        "k": args.k,
        "K": args.K,
        "rejected_rows": ds.n_rejected,
        "efficiency": {"gen_variance": eff.gen_variance,
                       "d_eff": eff.d_eff, "a_eff": eff.a_eff,
                       "log_det_q": eff.log_det_q},
    }
    if trace is not None:
        report["exchange"] = {
            "initial_log_v": trace.initial_log_v,
            "final_log_v": trace.final_log_v,
            "accepted_swaps": trace.accepted_swaps,
            "iteration_accepts": trace.iteration_accepts,
        }
    _write_json(outdir / "report.json", report)
    config = {"ingest": _ingest_spec_dict(spec), "method": args.method,
              "k": args.k, "K": args.K, "iterations": args.iterations,
              "seed": args.seed, "seed_method": args.seed_method}
    _finish("select", config, [args.seed], args.input, outdir,
            {"select_seconds": seconds},
            ["indices.txt", "report.json"])
    print(f"selected {len(sel)} rows -> {outdir / 'indices.txt'}")
    print(f"d_eff={eff.d_eff:.4f} a_eff={eff.a_eff:.4f} "
          f"gen_variance={eff.gen_variance:.5g}")
    return EXIT_OK


# -------------------------------------------------------------- simulate

def _load_config(path):
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: "
                          f"{exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    return raw


def _experiment_config(raw):
    raw = dict(raw)
    outliers = raw.pop("outliers", None)
    if outliers is not None:
        for key in outliers:
            if key not in ("count", "mean_shift"):
                raise ConfigError(f"unknown outliers field {key!r}")
        outliers = OutlierSpec(outliers["count"],
                               np.asarray(outliers["mean_shift"], float))
    allowed = {"n", "p", "k", "K", "rho", "repetitions", "alg1_iterations",
               "methods", "rng_seed", "seed_method", "beta0", "beta1",
               "sigma2"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
    missing = {"n", "p", "k", "K"} - set(raw)
    if missing:
        raise ConfigError(f"missing config field(s): {sorted(missing)}")
    if "methods" in raw:
        raw["methods"] = tuple(raw["methods"])
    if raw.get("beta1") is not None:
        raw["beta1"] = np.asarray(raw["beta1"], dtype=float)
    return ExperimentConfig(outliers=outliers, **raw).validate()


def _cmd_simulate(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    raw = _load_config(args.config)
    cfg = _experiment_config(raw)
    t0 = time.perf_counter()
    report = simulate.run_experiment(cfg)
    seconds = time.perf_counter() - t0
    outputs = _write_report(report, outdir)
    _finish("simulate", raw, [cfg.rng_seed + r
                              for r in range(cfg.repetitions)],
            None, outdir, {"total_seconds": seconds}, outputs)
    _print_aggregates(report)
    return EXIT_OK


# -------------------------------------------------------------- bootstrap

def _bootstrap_cfg(raw):
    allowed = {"input", "B", "method", "k", "K", "iterations",
               "seed_method", "rng_seed"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
    missing = {"input", "B", "method", "k", "K"} - set(raw)
    if missing:
        raise ConfigError(f"missing config field(s): {sorted(missing)}")
    inp = raw["input"]
    if not isinstance(inp, dict) or "path" not in inp:
        raise ConfigError("config field 'input' must be an object "
                          "with at least a 'path'")
    spec = IngestSpec(
        path=inp["path"],
        delimiter=inp.get("delimiter", ","),
        header=inp.get("header", True),
        response=inp.get("response"),
        covariates=inp.get("covariates"),
        skip_rows=inp.get("skip_rows", 0),
        log_columns=inp.get("log_columns", []),
    )
    return spec, raw


def _cmd_bootstrap(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    raw = _load_config(args.config)
    spec, raw = _bootstrap_cfg(raw)
    ds = ingest(spec)
    if ds.y is None:
        raise ConfigError("bootstrap requires a response column")
    t0 = time.perf_counter()
    report = simulate.bootstrap_mse(
        ds.x, ds.y, raw["B"], raw["method"], raw["k"], raw["K"],
        rng_seed=raw.get("rng_seed", 0),
        iterations=raw.get("iterations", 5),
        seed_method=raw.get("seed_method", "oss"))
    seconds = time.perf_counter() - t0
    outputs = _write_report(report, outdir)
    _finish("bootstrap", raw, [raw.get("rng_seed", 0) + b
                               for b in range(raw["B"])],
            spec.path, outdir, {"total_seconds": seconds}, outputs)
    _print_aggregates(report)
    return EXIT_OK


# ---------------------------------------------------------------- timing

def _cmd_timing(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    raw = _load_config(args.config)
    allowed = {"ks", "Ks", "iteration_counts", "n", "p", "rho",
               "repetitions", "rng_seed", "seed_method"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
    missing = {"ks", "Ks", "iteration_counts"} - set(raw)
    if missing:
        raise ConfigError(f"missing config field(s): {sorted(missing)}")
    t0 = time.perf_counter()
    cells = simulate.timing_study(
        raw["ks"], raw["Ks"], raw["iteration_counts"],
        n=raw.get("n", 1000), p=raw.get("p", 7), rho=raw.get("rho", 0.5),
        repetitions=raw.get("repetitions", 50),
        rng_seed=raw.get("rng_seed", 0),
        seed_method=raw.get("seed_method", "oss"))
    seconds = time.perf_counter() - t0
    # Gains are seed-deterministic and belong in the report; wall-clock
    # means are environment-dependent and go to the manifest.
    _write_json(outdir / "report.json", {
        "cells": [{"k": c.k, "K": c.K, "iterations": c.iterations,
                   "mean_pct_v_gain": c.mean_pct_v_gain} for c in cells]})
    timings = {"total_seconds": seconds,
               "cells": [{"k": c.k, "K": c.K, "iterations": c.iterations,
                          "mean_seconds": c.mean_seconds} for c in cells]}
    _finish("timing", raw, [raw.get("rng_seed", 0)], None, outdir,
            timings, ["report.json"])
    print(f"{'k':>4} {'K':>4} {'iters':>6} {'mean_s':>10} {'V gain %':>10}")
    for c in cells:
        print(f"{c.k:>4} {c.K:>4} {c.iterations:>6} "
              f"{c.mean_seconds:>10.4f} {c.mean_pct_v_gain:>10.2f}")
    return EXIT_OK


# ------------------------------------------------------------------ hull

def _svg_hulls(full_hull, sub_hull, full_pts):
    """Minimal standalone vector drawing of the two hull polygons."""
    lo = full_pts.min(axis=0)
    hi = full_pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)

    def map_pts(pts):
        q = (pts - lo) / span
        return [(20 + 460 * qx, 480 - 460 * qy) for qx, qy in q]

    def poly(pts, color, fill):
        coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in map_pts(pts))
        return (f'<polygon points="{coords}" fill="{fill}" '
                f'stroke="{color}" stroke-width="1.5"/>')

    body = [poly(full_hull, "#555555", "#dddddd"),
            poly(sub_hull, "#cc2222", "none")]
    return ('<svg xmlns="http://www.w3.org/2000/svg" '
            'width="500" height="500">\n' + "\n".join(body) + "\n</svg>\n")


def _parse_pair(text, columns):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"pair {text!r} must be 'colA,colB'")
    out = []
    for part in parts:
        part = part.strip()
        ref = _col(part)
        if isinstance(ref, int):
            if not 0 <= ref < len(columns):
                raise ConfigError(f"column index {ref} out of range")
            out.append(ref)
        else:
            if ref not in columns:
                raise ConfigError(f"column {ref!r} not found; "
                                  f"available: {columns}")
            out.append(columns.index(ref))
    if out[0] == out[1]:
        raise ConfigError(f"pair {text!r} repeats a column")
    return out


def _cmd_hull(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    spec = _ingest_spec_from_args(args)
    ds = ingest(spec)
    sel_idx = np.loadtxt(args.selection, dtype=np.intp, ndmin=1)
    if sel_idx.size and (sel_idx.min() < 0 or
                         sel_idx.max() >= ds.x.shape[0]):
        raise ConfigError("selection indices out of range for the input")
    pairs = [_parse_pair(pr, ds.columns) for pr in args.pairs]
    results = []
    outputs = ["hulls.json"]
    for (a, b), label in zip(pairs, args.pairs):
        full_pts = ds.x[:, [a, b]]
        sub_pts = ds.x[sel_idx][:, [a, b]]
        full_hull, full_area = metrics.hull_2d(full_pts)
        sub_hull, sub_area = metrics.hull_2d(sub_pts)
        results.append({
            "columns": [ds.columns[a], ds.columns[b]],
            "full_hull": full_hull.tolist(),
            "subdata_hull": sub_hull.tolist(),
            "full_area": full_area,
            "subdata_area": sub_area,
            "area_ratio": sub_area / full_area if full_area > 0 else None,
        })
        if args.svg:
            name = f"hull_{a}_{b}.svg"
            (outdir / name).write_text(
                _svg_hulls(full_hull, sub_hull, full_pts))
            outputs.append(name)
    _write_json(outdir / "hulls.json", {"pairs": results})
    config = {"ingest": _ingest_spec_dict(spec),
              "selection": args.selection, "pairs": list(args.pairs),
              "svg": args.svg}
    _finish("hull", config, [], args.input, outdir, {}, outputs)
    for r in results:
        print(f"{r['columns'][0]} vs {r['columns'][1]}: "
              f"full area {r['full_area']:.5g}, "
              f"subdata area {r['subdata_area']:.5g}")
    return EXIT_OK


# ---------------------------------------------------------------- replay

def replay(manifest_path, out):
    """Re-run the command recorded in a manifest into a new directory.

    Same inputs and seeds produce byte-identical reports; compare the
    output checksums in the two manifests to verify a run.
    """
    manifest = json.loads(Path(manifest_path).read_text())
    command = manifest["command"]
    cfg = manifest["config"]
    if command in ("simulate", "bootstrap", "timing"):
        cfg_path = Path(out)
        cfg_path.mkdir(parents=True, exist_ok=True)
        cfg_file = cfg_path / "_replay_config.json"
        _write_json(cfg_file, cfg)
        return main([command, "--config", str(cfg_file), "--out", str(out)])
    if command == "select":
        ing = cfg["ingest"]
        argv = ["select", "--input", ing["path"],
                "--method", cfg["method"], "--k", str(cfg["k"]),
                "--K", str(cfg["K"]),
                "--iterations", str(cfg["iterations"]),
                "--seed", str(cfg["seed"]),
                "--seed-method", cfg["seed_method"], "--out", str(out)]
        argv += _ingest_argv(ing)
        return main(argv)
    if command == "hull":
        ing = cfg["ingest"]
        argv = ["hull", "--input", ing["path"],
                "--selection", cfg["selection"], "--out", str(out)]
        if cfg.get("svg"):
            argv.append("--svg")
        argv += _ingest_argv(ing)
        argv += ["--pairs"] + list(cfg["pairs"])
        return main(argv)
    raise ConfigError(f"manifest has unknown command {command!r}")


def _ingest_argv(ing):
    argv = ["--delimiter", ing["delimiter"],
            "--skip-rows", str(ing["skip_rows"])]
    if not ing["header"]:
        argv.append("--no-header")
    if ing.get("response") is not None:
        argv += ["--response", str(ing["response"])]
    if ing.get("covariates"):
        argv += ["--covariates", ",".join(str(c)
                                          for c in ing["covariates"])]
    if ing.get("log_columns"):
        argv += ["--log-columns", ",".join(str(c)
                                           for c in ing["log_columns"])]
    return argv


# ------------------------------------------------------------------ main

def _add_ingest_args(sub):
    sub.add_argument("--input", required=True, help="delimited data file")
    sub.add_argument("--delimiter", default=",")
    sub.add_argument("--no-header", action="store_true",
                     help="file has no header row")
    sub.add_argument("--response", default=None,
                     help="response column name or index")
    sub.add_argument("--covariates", default=None,
                     help="comma-separated covariate columns")
    sub.add_argument("--skip-rows", type=int, default=0)
    sub.add_argument("--log-columns", default=None,
                     help="comma-separated columns to log-transform")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="subdopt",
        description="D-optimal subdata selection for big-data regression")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sel = subs.add_parser("select", help="select a subdata index set")
    _add_ingest_args(sel)
    sel.add_argument("--method", required=True,
                     choices=list(simulate.METHODS))
    sel.add_argument("--k", type=int, required=True)
    sel.add_argument("--K", type=int, default=20)
    sel.add_argument("--iterations", type=int, default=5)
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--seed-method", default="oss",
                     choices=["uniform", "iboss", "oss"])
    sel.add_argument("--out", required=True)
    sel.set_defaults(func=_cmd_select)

    for name, func, help_text in (
            ("simulate", _cmd_simulate, "run the simulation protocol"),
            ("bootstrap", _cmd_bootstrap, "bootstrap MSE on a dataset"),
            ("timing", _cmd_timing, "exchange timing/iteration grid")):
        sub = subs.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="JSON config file")
        sub.add_argument("--out", required=True)
        sub.set_defaults(func=func)

    hull = subs.add_parser("hull", help="convex-hull diagnostics")
    _add_ingest_args(hull)
    hull.add_argument("--selection", required=True,
                      help="indices file, one row index per line")
    hull.add_argument("--pairs", nargs="+", required=True,
                      help="column pairs like '9,3'")
    hull.add_argument("--svg", action="store_true",
                      help="also emit vector drawings")
    hull.add_argument("--out", required=True)
    hull.set_defaults(func=_cmd_hull)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ConfigError, seeding.ConstantColumnError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except (SingularMomentError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Commands: ``build-tables``, ``run``, ``sweep``, ``analyze``, ``detector-calibrate``.
Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (AnalysisReport, BootstrapUnstableError, FitError, analyze)
from .config import ConfigError, RunSpec, config_hash, load_config
from .engine import (DatasetSchemaError, DetectorError, DetectorModel, calibration_counts,
                     detector_tomography, ingest_external, run_experiment, write_dataset)
from .noise import ChannelKind, NoiseModel, analytic_decay, make_channel
from .qgroups import CacheError, GroupConsistencyError
from .synth import DEFAULT_SEED, SynthesisError
from .tables import RECIPE_FILE, GateTables, default_tables, load_or_build, packaged_cache_dir

log = logging.getLogger("srb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _tables(cache_dir: Path | None) -> tuple[GateTables, Path]:
    if cache_dir is None:
        import os
        path = Path(os.environ.get("SRB_CACHE_DIR") or packaged_cache_dir())
        return default_tables(), path
    return load_or_build(cache_dir)[0], cache_dir


def _provenance(tables: GateTables, cache_dir: Path, cfg_hash: str | None) -> dict:
    rec = cache_dir / RECIPE_FILE
    return {
        "version": __version__,
        "config_hash": cfg_hash,
        "group_checksum": tables.group.checksum,
        "recipes_sha256": hashlib.sha256(rec.read_bytes()).hexdigest() if rec.exists() else None,
    }


def _plot_csv(report: AnalysisReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["analysis", "length", "mean", "sem", "fitted"])
    fits = {"standard": report.standard, "leakage": report.leakage}
    for name, pts in report.points.items():
        fitted = fits[name].predict(pts.lengths)
        for l, m, s, f in zip(pts.lengths, pts.means, pts.sems, fitted):
            w.writerow([name, int(l), repr(float(m)), repr(float(s)), repr(float(f))])
    return buf.getvalue()


def _report_json(report: AnalysisReport, provenance: dict, extra: dict | None = None) -> str:
    body = {"provenance": provenance, **report.to_dict(), **(extra or {})}
    return json.dumps(body, indent=2, sort_keys=True)


# --------------------------------------------------------------------------- commands


def cmd_build_tables(args) -> int:
    cache = Path(args.cache_dir)
    tables, built = load_or_build(cache, args.seed, workers=args.workers, rebuild=args.rebuild)
    worst = max(r.residual_infidelity for r in tables.recipes)
    print(json.dumps({"cache_dir": str(cache), "rebuilt": built, "cliffords": len(tables.group),
                      "recipes": len(tables.recipes), "max_residual_infidelity": worst,
                      **_provenance(tables, cache, None)}, indent=2))
    return EXIT_OK


def _run_and_report(spec: RunSpec, tables: GateTables, cache_dir: Path, out_dir: Path) -> dict:
    ds = run_experiment(spec.experiment, tables)
    report = analyze(ds, spec.bootstrap, spec.analysis_seed, spec.gates_per_clifford)
    write_dataset(ds, out_dir / spec.dataset_name)
    extra = {"detector_response": None if ds.response is None else ds.response.tolist()}
    _atomic_write(out_dir / spec.report_name,
                  _report_json(report, _provenance(tables, cache_dir, spec.config_hash), extra))
    _atomic_write(out_dir / spec.plot_name, _plot_csv(report))
    return report.derived


def cmd_run(args) -> int:
    spec = load_config(args.config, args.set or [])
    out_dir = Path(args.out) if args.out else spec.output_dir
    tables, cache = _tables(spec.cache_dir)
    derived = _run_and_report(spec, tables, cache, out_dir)
    print(json.dumps({"output_dir": str(out_dir), **derived}, indent=2))
    return EXIT_OK


SWEEP_COLUMNS = ("epsilon", "r_hat", "r_ci", "t_hat", "t_ci", "r_zz_hat", "t_zz_hat",
                 "r_zz_analytic", "t_zz_analytic")


def cmd_sweep(args) -> int:
    spec = load_config(args.config, args.set or [])
    kind = ChannelKind(args.kind)
    out_dir = Path(args.out) if args.out else spec.output_dir
    tables, cache = _tables(spec.cache_dir)
    rows = []
    for eps in args.epsilons:
        noise = replace(spec.experiment.noise, **{args.gate_class: make_channel(kind, eps)})
        exp = replace(spec.experiment, noise=noise)
        ds = run_experiment(exp, tables)
        rep = analyze(ds, spec.bootstrap, spec.analysis_seed, spec.gates_per_clifford)
        n = spec.gates_per_clifford
        r = rep.standard.params["r"]
        t = rep.leakage.params["t"] if rep.leakage else float("nan")
        try:
            ra, ta, _ = analytic_decay(kind, eps)
        except ValueError:
            ra = ta = float("nan")
        rows.append([eps, r, rep.standard.ci.get("r", 0.0), t,
                     rep.leakage.ci.get("t", 0.0) if rep.leakage else float("nan"),
                     r ** (1 / n), t ** (1 / n), ra, ta])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows([[repr(float(x)) for x in row] for row in rows])
    path = out_dir / args.output_name
    _atomic_write(path, buf.getvalue())
    _atomic_write(path.with_suffix(".provenance.json"), json.dumps(
        {**_provenance(tables, cache, spec.config_hash), "kind": kind.value,
         "gate_class": args.gate_class, "epsilons": list(args.epsilons)}, indent=2))
    print(buf.getvalue(), end="")
    return EXIT_OK


def cmd_analyze(args) -> int:
    ds = ingest_external(args.data)
    if args.response:
        try:
            resp = json.loads(Path(args.response).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read response file {args.response}: {exc}") from exc
        resp = resp.get("detector_response", resp.get("response")) if isinstance(resp, dict) else resp
        if resp is not None:
            ds = replace(ds, response=np.asarray(resp, dtype=float))
    report = analyze(ds, args.bootstrap, args.seed, args.gates_per_clifford)
    data_hash = hashlib.sha256(Path(args.data).read_bytes()).hexdigest()
    prov = {"version": __version__, "config_hash": config_hash(vars(args)), "data_sha256": data_hash}
    text = _report_json(report, prov)
    if args.out:
        _atomic_write(Path(args.out), text)
        if args.plot:
            _atomic_write(Path(args.plot), _plot_csv(report))
    print(text)
    return EXIT_OK


def cmd_detector_calibrate(args) -> int:
    try:
        model = DetectorModel(args.bright, args.dark)
    except DetectorError as exc:
        raise ConfigError(str(exc)) from exc
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    est = detector_tomography(calibration_counts(model, args.shots, rng))
    body = {"bright_mean": args.bright, "dark_mean": args.dark, "thresholds": list(model.thresholds),
            "shots_per_class": args.shots, "seed": args.seed,
            "analytic_response": model.response.tolist(), "response": est.tolist(),
            "max_abs_deviation": float(np.max(np.abs(est - model.response)))}
    text = json.dumps(body, indent=2)
    if args.out:
        _atomic_write(Path(args.out), text)
    print(text)
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="srb", description="Subspace randomized benchmarking toolkit")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-tables", help="build or verify the Clifford and recipe caches")
    b.add_argument("--cache-dir", default=str(packaged_cache_dir()))
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--rebuild", action="store_true")
    b.set_defaults(func=cmd_build_tables)

    def config_args(sp):
        sp.add_argument("config", nargs="?", help="YAML config (defaults if omitted)")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key, e.g. noise.per_phase_gate.epsilon=0.02")
        sp.add_argument("--out", help="output directory (overrides output.dir)")

    r = sub.add_parser("run", help="simulate an experiment and fit it")
    config_args(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="sweep one error channel's magnitude")
    config_args(s)
    s.add_argument("--kind", required=True, choices=[k.value for k in ChannelKind if k.value != "custom"])
    s.add_argument("--epsilons", required=True, type=_floats)
    s.add_argument("--gate-class", default="per_phase_gate",
                   choices=["per_phase_gate", "per_rotation", "per_clifford", "prep", "measure"])
    s.add_argument("--output-name", default="sweep.csv")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("analyze", help="fit a dataset CSV")
    a.add_argument("data")
    a.add_argument("--response", help="JSON with a detector response (e.g. a run report)")
    a.add_argument("--bootstrap", type=int, default=200)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--gates-per-clifford", type=float, default=3.0)
    a.add_argument("--out", help="write the report here")
    a.add_argument("--plot", help="write decay-curve CSV here (needs --out)")
    a.set_defaults(func=cmd_analyze)

    d = sub.add_parser("detector-calibrate", help="simulate detector tomography")
    d.add_argument("--bright", type=float, default=9.0)
    d.add_argument("--dark", type=float, default=0.1)
    d.add_argument("--shots", type=int, default=100_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_detector_calibrate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DatasetSchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SynthesisError as exc:
        print(f"error: {exc} (Clifford {exc.clifford})", file=sys.stderr)
        return EXIT_NUMERIC
    except (FitError, BootstrapUnstableError, DetectorError, GroupConsistencyError, CacheError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

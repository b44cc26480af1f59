"""Command line entry point: ``wmfs {sources,assemble,solve,run,verify-cover}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiment
from .assembly import adapted_boundary_points, assemble
from .solver import min_norm_solve
from .wavelets import normalize
from .whitney import verify_cover

logger = logging.getLogger("wmfs")


def _base_config(path):
    cfg = experiment.load_config(path)
    if "sweep" in cfg:
        logger.warning("ignoring 'sweep' block; only 'run' expands sweeps")
        cfg = {k: v for k, v in cfg.items() if k != "sweep"}
    return cfg


def _write_sources_csv(sources, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "layer", "tag"])
        w.writerows(sources.to_rows())


def cmd_sources(args) -> int:
    cfg = _base_config(args.config)
    curve = experiment.build_curve(cfg)
    sources = experiment.build_sources(curve, cfg["sources"])
    path = args.out / "sources.csv"
    _write_sources_csv(sources, path)
    print(f"{sources.size} sources -> {path}")
    return 0


def cmd_assemble(args) -> int:
    cfg = experiment.validate_config(_base_config(args.config))
    curve = experiment.build_curve(cfg)
    data = experiment.build_data(curve, cfg["data"])
    sources = experiment.build_sources(curve, cfg["sources"])
    family = normalize(sources, curve, int(cfg["order"]))
    mesh = adapted_boundary_points(sources, curve, int(cfg["m0"]), forced=experiment._forced_angles(cfg, data))
    system = assemble(family, mesh, cfg["trace"], data.g)
    out = args.out
    if args.format == "csv":
        np.savetxt(out / "matrix.csv", system.matrix, delimiter=",", fmt="%.17g")
        np.savetxt(out / "rhs.csv", system.rhs, delimiter=",", fmt="%.17g")
        files = {"matrix": "matrix.csv", "rhs": "rhs.csv"}
    else:
        np.save(out / "matrix.npy", system.matrix)
        np.save(out / "rhs.npy", system.rhs)
        files = {"matrix": "matrix.npy", "rhs": "rhs.npy"}
    (out / "family.json").write_text(family.to_json())
    _write_sources_csv(sources, out / "sources.csv")
    manifest = {
        "curve": cfg["curve"],
        "sources": cfg["sources"],
        "m0": cfg["m0"],
        "trace": str(system.trace.value),
        "data": cfg["data"],
        "shape": list(system.shape),
        "mesh": system.mesh.w_points.tolist(),
        "family": "family.json",
        "format": args.format,
        **files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"system {system.shape[0]} x {system.shape[1]} -> {out / 'manifest.json'}")
    return 0


def _load_array(path: Path):
    return np.load(path) if path.suffix == ".npy" else np.loadtxt(path, delimiter=",", ndmin=1)


def cmd_solve(args) -> int:
    manifest_path = Path(args.config)
    manifest = json.loads(manifest_path.read_text())
    base = manifest_path.parent
    a = np.atleast_2d(_load_array(base / manifest["matrix"]))
    if "shape" in manifest:
        a = a.reshape(manifest["shape"])
    b = _load_array(base / manifest["rhs"])
    expansion, diag = min_norm_solve((a, b))
    blob = {**expansion.to_dict(), "singular_values": diag.summary()}
    path = args.out / "expansion.json"
    path.write_text(json.dumps(blob))
    print(f"residual {diag.residual_norm:.3e}, ||d|| {expansion.coeff_norm:.3e} -> {path}")
    return 0


def cmd_run(args) -> int:
    cfg = experiment.load_config(args.config)
    records = experiment.run(cfg, out_dir=args.out, threads=args.threads)
    failed = [r for r in records if not r.ok]
    for r in records:
        status = "ok" if r.ok else f"FAILED ({r.error})"
        print(f"s_N={r.s_N:5d} M={r.M:6d} linf={r.linf_error:.3e} |d|={r.coeff_norm:.3e} {r.wall_time:6.1f}s {status}")
    return 1 if failed else 0


def cmd_verify_cover(args) -> int:
    cfg = _base_config(args.config)
    curve = experiment.build_curve(cfg)
    sources = experiment.build_sources(curve, cfg["sources"])
    opts = cfg.get("cover", {})
    report = verify_cover(
        sources,
        curve,
        float(opts.get("eps_prime", 0.25)),
        band=opts.get("band"),
        samples=int(opts.get("samples", 100_000)),
        seed=int(opts.get("seed", cfg.get("seed", 0))),
        metric=opts.get("metric", "radial"),
    )
    text = json.dumps(report.__dict__ | {"band": list(report.band)})
    (args.out / "cover.json").write_text(text)
    print(text)
    return 0 if report.covered else 1


COMMANDS = {
    "sources": cmd_sources,
    "assemble": cmd_assemble,
    "solve": cmd_solve,
    "run": cmd_run,
    "verify-cover": cmd_verify_cover,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wmfs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON/TOML config (manifest.json for 'solve')")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
        if name == "assemble":
            p.add_argument("--format", choices=("npy", "csv"), default="npy")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 2
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](args)
    except (experiment.ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

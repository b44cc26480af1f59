"""Config-driven experiment runner.

A config is a plain dict (usually loaded from JSON)::

    {
      "name": "star-f1",
      "curve": "star",
      "sources": {"whitney": {"eps": 0.3, "layers": [0, 2]},
                  "cones": [{"apex": [-1, -0.1], "levels": 60}]},
      "m0": 5, "order": 1, "trace": "neumann",
      "data": "f1",
      "quantity": "f",
      "grid": {"resolution": 1000},
      "sweep": {"last_layer": [0, 1, 2], "m0": [1, 5]}
    }

``"corner_cones": {...}`` places one cone (same options) at every curve
corner.  Alternatively ``"sources": {"mfs": {"count": 200, "r_mfs": 1.2}}``.  A
``"reference"`` block (with its own ``"sources"``) switches error
measurement to a numerically computed reference expansion.  Sweep axes
(``last_layer``, ``m0``, ``r_mfs``, ``mfs_count``, ``cone_levels``,
``order``) are expanded as a Cartesian product in the listed order.
"""

from __future__ import annotations

import copy
import csv
import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .assembly import adapted_boundary_points, assemble
from .data import DataSpec, builtin_data, neumann_trace
from .field import ReferenceSolution, error_grid
from .geometry import BoundaryCurve, curve_from_spec
from .solver import Expansion, min_norm_solve
from .wavelets import TraceKind, WaveletFamily, normalize
from .whitney import SourceSet, cone_points, mfs_ring, whitney_layers

logger = logging.getLogger(__name__)

SWEEP_AXES = ("last_layer", "m0", "r_mfs", "mfs_count", "cone_levels", "order")

# Cone defaults calibrated against the published source totals; see README.
CONE_DEFAULTS = {"eps": 0.3, "half_angle": math.pi / 3, "rho0": 1.0, "levels": 60}


class ConfigError(ValueError):
    pass


@dataclass
class RunRecord:
    config: dict
    s_N: int = 0
    M: int = 0
    linf_error: float = float("nan")
    l2_error: float = float("nan")
    coeff_norm: float = float("nan")
    residual: float = float("nan")
    wall_time: float = 0.0
    ok: bool = True
    error: str = ""
    extras: dict = field(default_factory=dict)

    def flat(self) -> dict:
        row = {k: v for k, v in asdict(self).items() if k not in ("config", "extras")}
        row["name"] = self.config.get("name", "")
        for axis in SWEEP_AXES:
            if axis in self.config.get("_point", {}):
                row[axis] = self.config["_point"][axis]
        return row


# -- config handling --------------------------------------------------------


def load_config(path) -> dict:
    """Read a JSON config, or TOML when the suffix is ``.toml``."""
    path = Path(path)
    if path.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def validate_config(cfg: dict) -> dict:
    cfg = copy.deepcopy(cfg)
    if "curve" not in cfg:
        raise ConfigError("config needs a 'curve'")
    src = cfg.get("sources")
    if not isinstance(src, dict) or not src:
        raise ConfigError("config needs a 'sources' block")
    src = cfg["sources"] = normalize_source_spec(src)
    has_mfs = "mfs" in src
    has_whitney = "whitney" in src or "cones" in src or "corner_cones" in src
    if has_mfs == has_whitney:
        raise ConfigError("sources must be exactly one of: whitney layers (with optional cones) or an mfs ring")
    if "data" not in cfg:
        raise ConfigError("config needs a 'data' entry")
    cfg.setdefault("m0", 5)
    cfg.setdefault("order", 1)
    cfg.setdefault("trace", "neumann")
    cfg.setdefault("quantity", "f")
    cfg.setdefault("grid", {"resolution": 1000})
    sweep = cfg.get("sweep", {})
    for axis, values in sweep.items():
        if axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {axis!r}")
        if not isinstance(values, (list, tuple)):
            raise ConfigError(f"sweep axis {axis!r} must be a finite list")
    try:
        TraceKind(cfg["trace"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def normalize_source_spec(src: dict) -> dict:
    """Accept the flat form ``{"eps": .3, "layers": [0, 2], "cones": [...]}`` too."""
    src = dict(src)
    flat = {k: src.pop(k) for k in ("eps", "layers") if k in src}
    if flat:
        src["whitney"] = {**src.get("whitney", {}), **flat}
    return src


def sweep_points(cfg: dict):
    """Expand the sweep block into concrete per-point configs."""
    sweep = cfg.get("sweep")
    if sweep is None:
        point = copy.deepcopy(cfg)
        point["_point"] = {}
        return [point]
    axes = [a for a in SWEEP_AXES if a in sweep]
    points = []
    for combo in itertools.product(*(sweep[a] for a in axes)):
        point = copy.deepcopy(cfg)
        point.pop("sweep", None)
        values = dict(zip(axes, combo))
        point["_point"] = values
        src = point["sources"]
        for axis, v in values.items():
            if axis == "last_layer":
                w = src.setdefault("whitney", {})
                w["layers"] = [w.get("layers", [0, 2])[0], int(v)]
            elif axis == "cone_levels":
                for cone in src.get("cones", []):
                    cone["levels"] = int(v)
                if "corner_cones" in src:
                    src["corner_cones"]["levels"] = int(v)
            elif axis == "r_mfs":
                src["mfs"]["r_mfs"] = float(v)
            elif axis == "mfs_count":
                src["mfs"]["count"] = int(v)
            else:
                point[axis] = v
        points.append(point)
    return points


def build_curve(cfg) -> BoundaryCurve:
    return curve_from_spec(cfg["curve"])


def _apex(curve, cone):
    if "apex" in cone:
        a = cone["apex"]
        return complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
    if "apex_theta" in cone:
        return complex(curve.position(float(cone["apex_theta"])))
    raise ConfigError("cone needs 'apex' or 'apex_theta'")


def build_sources(curve: BoundaryCurve, spec: dict) -> SourceSet:
    spec = normalize_source_spec(spec)
    if "mfs" in spec:
        m = spec["mfs"]
        return mfs_ring(curve, int(m["count"]), float(m["r_mfs"]))
    w = spec.get("whitney", {})
    eps = float(w.get("eps", 0.3))
    first, last = w.get("layers", [0, 2])
    sources = whitney_layers(curve, eps, int(first), int(last)) if "whitney" in spec else SourceSet.empty(eps)
    cones = list(spec.get("cones", []))
    if "corner_cones" in spec:
        cones += [{**spec["corner_cones"], "apex_theta": t} for t in curve.corners]
    for i, cone in enumerate(cones):
        opts = {**CONE_DEFAULTS, **cone}
        sources = sources + cone_points(
            curve,
            _apex(curve, cone),
            int(opts["levels"]),
            eps=float(opts["eps"]),
            half_angle=float(opts["half_angle"]),
            rho0=float(opts["rho0"]),
            tag=f"cone{i}",
        )
    return sources


def _expression(expr: str):
    code = compile(expr, "<config expression>", "eval")
    env = {"np": np, "sqrt": np.sqrt, "exp": np.exp, "sin": np.sin, "cos": np.cos, "pi": math.pi, "log": np.log}

    def fn(z):
        z = np.asarray(z, dtype=complex)
        return eval(code, {"__builtins__": {}}, {**env, "z": z, "x": z.real, "y": z.imag})

    return fn


def build_data(curve, spec) -> DataSpec:
    """Named data (``"f1"``) or ``{"f": expr}`` / ``{"g": expr}`` in ``z, x, y, nu``."""
    if isinstance(spec, str):
        return builtin_data(spec, curve)
    spec = dict(spec)
    if "name" in spec:
        return builtin_data(spec["name"], curve)
    if "f" in spec:
        f = _expression(spec["f"])
        singular = tuple(complex(p[0], p[1]) for p in spec.get("singular_points", []))
        return DataSpec("expression", neumann_trace(f), f=f, singular_points=singular)
    if "g" in spec:
        code = compile(spec["g"], "<config expression>", "eval")

        def g(w, nu):
            return np.real(eval(code, {"__builtins__": {}}, {"np": np, "z": w, "x": w.real, "y": w.imag, "nu": nu}))

        return DataSpec("expression", g)
    raise ConfigError("data spec needs a name, an 'f' expression or a 'g' expression")


def _forced_angles(cfg, data: DataSpec):
    forced = [float(t) for t in cfg.get("forced", [])]
    forced += [float(np.angle(p)) for p in data.singular_points]
    return forced


def solve_config(cfg: dict, curve=None, data=None):
    """Sources -> normalization -> mesh -> assembly -> min-norm solve."""
    curve = curve or build_curve(cfg)
    data = data or build_data(curve, cfg["data"])
    sources = build_sources(curve, cfg["sources"])
    family = normalize(sources, curve, int(cfg.get("order", 1)))
    mesh = adapted_boundary_points(sources, curve, int(cfg.get("m0", 5)), forced=_forced_angles(cfg, data))
    system = assemble(family, mesh, cfg.get("trace", "neumann"), data.g)
    expansion, diag = min_norm_solve(system)
    return system, expansion, diag


# -- reference solutions --------------------------------------------------------


def save_reference(path, family: WaveletFamily, expansion: Expansion) -> None:
    with open(path, "w") as fh:
        json.dump({"family": json.loads(family.to_json()), "expansion": expansion.to_dict()}, fh)


def load_reference(path) -> ReferenceSolution:
    with open(path) as fh:
        blob = json.load(fh)
    family = WaveletFamily.from_json(json.dumps(blob["family"]))
    return ReferenceSolution.numerical(Expansion.from_dict(blob["expansion"]), family)


def build_reference(cfg, curve, data) -> ReferenceSolution:
    ref = cfg.get("reference")
    if ref is None:
        if data.f is None:
            raise ConfigError("data has no closed form; add a 'reference' block")
        return ReferenceSolution.closed_form(data.f, data.u)
    cache = ref.get("cache")
    if cache and os.path.exists(cache):
        logger.info("loading cached reference %s", cache)
        return load_reference(cache)
    ref_cfg = {**cfg, "sources": ref["sources"], "m0": ref.get("m0", cfg.get("m0", 5))}
    ref_cfg.pop("sweep", None)
    system, expansion, _ = solve_config(ref_cfg, curve, data)
    if cache:
        Path(cache).parent.mkdir(parents=True, exist_ok=True)
        save_reference(cache, system.family, expansion)
    return ReferenceSolution.numerical(expansion, system.family)


# -- running ----------------------------------------------------------------------


def run_point(cfg: dict, reference: ReferenceSolution = None, grid_path=None) -> RunRecord:
    echo = {k: v for k, v in cfg.items()}
    t0 = time.perf_counter()
    try:
        curve = build_curve(cfg)
        data = build_data(curve, cfg["data"])
        if reference is None:
            reference = build_reference(cfg, curve, data)
        system, expansion, diag = solve_config(cfg, curve, data)
        res = int(cfg.get("grid", {}).get("resolution", 1000))
        report = error_grid(expansion, system.family, reference, curve, res, quantity=cfg.get("quantity", "f"))
        if grid_path is not None:
            report.write_csv(grid_path)
        return RunRecord(
            echo,
            s_N=system.family.size,
            M=system.matrix.shape[0],
            linf_error=report.linf_error,
            l2_error=report.l2_error,
            coeff_norm=expansion.coeff_norm,
            residual=diag.residual_norm,
            wall_time=time.perf_counter() - t0,
            extras={"condition": diag.condition, "rank": diag.rank_estimate,
                    "calibration": report.calibration_constant},
        )
    except Exception as exc:  # noqa: BLE001 - record and continue the sweep
        logger.exception("sweep point failed")
        return RunRecord(echo, wall_time=time.perf_counter() - t0, ok=False, error=f"{type(exc).__name__}: {exc}")


def _run_point_star(args):
    return run_point(*args)


def run(config: dict, out_dir=None, threads: int = 1) -> list:
    """Run every sweep point of ``config``; write ``records.jsonl``/``records.csv`` to ``out_dir``."""
    cfg = validate_config(config)
    points = sweep_points(cfg)
    if not points:
        return []
    reference = None
    if "reference" in cfg:
        curve = build_curve(cfg)
        reference = build_reference(cfg, curve, build_data(curve, cfg["data"]))
    write_grids = bool(cfg.get("write_grids", False)) and out_dir is not None
    grid_paths = [Path(out_dir) / f"grid_{i}.csv" if write_grids else None for i in range(len(points))]
    jobs = [(p, reference, g) for p, g in zip(points, grid_paths)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_point_star, jobs))
    else:
        records = [_run_point_star(j) for j in jobs]
    if out_dir is not None:
        write_records(records, out_dir)
    return records


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_records(records, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.jsonl", "a") as fh:
        for rec in records:
            fh.write(json.dumps(_jsonable(asdict(rec))) + "\n")
    rows = [r.flat() for r in records]
    keys = []
    for row in rows:
        keys += [k for k in row if k not in keys]
    path = out / "records.csv"
    new = not path.exists()
    with open(path, "a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        if new:
            w.writeheader()
        w.writerows(rows)

"""Evaluation of the reconstructed field and error measurement on grids."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import BoundaryCurve, distance_to_curve
from .solver import Expansion
from .wavelets import WaveletFamily, ipow

EVAL_CHUNK = 4096
GUARD = 1e-12


class DomainError(ValueError):
    """Evaluation point outside the interior domain."""


@dataclass(frozen=True, eq=False)
class ReferenceSolution:
    """Either closed-form ``f`` (and optionally ``u``), or a stored numerical expansion."""

    kind: str
    f_exact: Optional[Callable] = None
    u_exact: Optional[Callable] = None
    expansion: Optional[Expansion] = None
    family: Optional[WaveletFamily] = None

    @classmethod
    def closed_form(cls, f, u=None):
        return cls("closed_form", f_exact=f, u_exact=u)

    @classmethod
    def numerical(cls, expansion: Expansion, family: WaveletFamily):
        return cls("numerical_reference", expansion=expansion, family=family)

    def f(self, z):
        if self.kind == "closed_form":
            return self.f_exact(z)
        return _synthesize(self.expansion, self.family, z)


@dataclass
class ErrorReport:
    grid_resolution: int
    linf_error: float
    l2_error: float
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    pointwise: np.ndarray = field(repr=False)
    calibration_constant: float = 0.0

    def summary(self) -> dict:
        return {
            "grid_resolution": self.grid_resolution,
            "linf_error": self.linf_error,
            "l2_error": self.l2_error,
            "nodes": int(self.pointwise.size),
            "calibration_constant": self.calibration_constant,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "error"])
            for row in zip(self.x.tolist(), self.y.tolist(), self.pointwise.tolist()):
                w.writerow(row)


def _synthesize(expansion, family, z, power=None, weights=None):
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    k = family.order
    power = k + 1 if power is None else power
    coef = expansion.coefficients * family.norms if weights is None else weights
    out = np.empty(flat.size, dtype=complex)
    q = family.points
    for s in range(0, flat.size, EVAL_CHUNK):
        inv = 1.0 / (flat[s : s + EVAL_CHUNK, None] - q[None, :])
        out[s : s + EVAL_CHUNK] = ipow(inv, power) @ coef
    return out.reshape(z.shape)


def interior_mask(curve: BoundaryCurve, z) -> np.ndarray:
    """Nodes strictly inside, excluding a ``1e-12`` guard band at the curve."""
    z = np.asarray(z, dtype=complex)
    r = curve.radius(np.angle(z))
    inside = np.abs(z) < r
    near = inside & (r - np.abs(z) < 1e-6 * np.maximum(r, 1.0))
    if near.any():
        inside[near] = distance_to_curve(curve, z[near]) > GUARD
    return inside


def _require_interior(curve, z):
    if curve is not None and not np.all(interior_mask(curve, np.atleast_1d(z))):
        raise DomainError("evaluation point outside the domain")


def eval_f(expansion: Expansion, family: WaveletFamily, z, curve: Optional[BoundaryCurve] = None):
    """``f(z) = sum_j (d_j + i d_{-j}) psi_j(z)``; checks ``z`` is interior when ``curve`` is given."""
    _require_interior(curve, z)
    out = _synthesize(expansion, family, z)
    return complex(out) if np.ndim(z) == 0 else out


def eval_u(expansion: Expansion, family: WaveletFamily, z, calibration: float = 0.0, curve=None):
    """Potential ``Re(-(1/k) sum_j b_j c_j (z - q_j)^-k) + calibration``."""
    _require_interior(curve, z)
    k = family.order
    w = -expansion.coefficients * family.norms / k
    out = _synthesize(expansion, family, z, power=k, weights=w).real + calibration
    return float(out) if np.ndim(z) == 0 else out


def grid_nodes(curve: BoundaryCurve, resolution: int, scale: float = 1.0, center=None):
    """Tensor grid over (a scaled copy of) the bounding box, and its interior mask."""
    xmin, xmax, ymin, ymax = curve.bounding_box()
    if center is None:
        cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    else:
        cx, cy = center.real, center.imag
    hx, hy = 0.5 * scale * (xmax - xmin), 0.5 * scale * (ymax - ymin)
    x = np.linspace(cx - hx, cx + hx, resolution)
    y = np.linspace(cy - hy, cy + hy, resolution)
    z = (x[None, :] + 1j * y[:, None]).ravel()
    return z[interior_mask(curve, z)]


def calibrate_u(expansion, family, u_exact, curve: BoundaryCurve, resolution: int = 200, scale: float = 0.5) -> float:
    """Constant making the mean error of ``u`` vanish on a central grid.

    The grid has ``resolution**2`` nodes over the bounding box scaled by
    ``scale`` about the area centroid of the domain.
    """
    z = grid_nodes(curve, resolution, scale, center=curve.centroid())
    if z.size == 0:
        raise DomainError("no grid nodes inside the domain")
    return float(np.mean(u_exact(z) - eval_u(expansion, family, z)))


def error_grid(expansion, family, reference, curve: BoundaryCurve, resolution: int = 1000, quantity: str = "f") -> ErrorReport:
    """Pointwise error against ``reference`` on the interior nodes of a square grid.

    ``quantity="u"`` compares potentials after :func:`calibrate_u`; the
    reference must then carry ``u_exact``.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    z = grid_nodes(curve, resolution)
    calibration = 0.0
    if quantity == "f":
        err = np.abs(eval_f(expansion, family, z) - reference.f(z))
    elif quantity == "u":
        calibration = calibrate_u(expansion, family, reference.u_exact, curve)
        err = np.abs(eval_u(expansion, family, z, calibration) - reference.u_exact(z))
    else:
        raise ValueError("quantity must be 'f' or 'u'")
    xmin, xmax, ymin, ymax = curve.bounding_box()
    cell = (xmax - xmin) * (ymax - ymin) / (resolution - 1) ** 2
    linf = float(err.max()) if err.size else 0.0
    l2 = float(np.sqrt(np.sum(err**2) * cell)) if err.size else 0.0
    return ErrorReport(resolution, linf, l2, z.real, z.imag, err, calibration)

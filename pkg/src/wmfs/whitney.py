"""Source point sets: truncated Whitney layers, cones and MFS rings.

Layer ``l`` of a Whitney set around a polar curve sits on the scaled copy
``(1 + (1+eps)^-l) * gamma`` with ``n_l = ceil(2 pi (1 + (1+eps)^l) / eps)``
equally spaced angles, so that the separation of neighbouring points is
about ``eps`` times their distance to the curve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundaryCurve, distance_to_curve, wrap_angle

logger = logging.getLogger(__name__)

CONE_LAYER = -1
MFS_LAYER = -2


@dataclass(frozen=True, eq=False)
class SourceSet:
    """Ordered complex source points with provenance.

    ``layers[j]`` is the Whitney layer index of point ``j`` or a negative
    tag (:data:`CONE_LAYER`, :data:`MFS_LAYER`); ``tags[j]`` is a free-form
    label such as ``"layer"`` or ``"cone0"``.
    """

    points: np.ndarray
    layers: np.ndarray
    tags: tuple
    fineness: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        lay = np.asarray(self.layers, dtype=int).ravel()
        if pts.shape != lay.shape or len(self.tags) != pts.size:
            raise ValueError("points, layers and tags must have equal length")
        pts.setflags(write=False)
        lay.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "layers", lay)
        object.__setattr__(self, "tags", tuple(self.tags))

    def __len__(self) -> int:
        return self.points.size

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def counts(self) -> dict:
        """Number of points per layer index (negative keys for cone/MFS points)."""
        keys, n = np.unique(self.layers, return_counts=True)
        return {int(k): int(c) for k, c in zip(keys, n)}

    def __add__(self, other: "SourceSet") -> "SourceSet":
        return SourceSet(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.layers, other.layers]),
            self.tags + other.tags,
            min(self.fineness, other.fineness),
        )

    def radial_factors(self, curve: BoundaryCurve) -> np.ndarray:
        """``r_j`` in ``q_j = r_j r_gamma(theta_j) e^{i theta_j}``."""
        return np.abs(self.points) / curve.radius(np.angle(self.points))

    def to_rows(self):
        for q, l, t in zip(self.points, self.layers, self.tags):
            yield float(q.real), float(q.imag), int(l), t

    @classmethod
    def empty(cls, fineness: float = 0.5) -> "SourceSet":
        return cls(np.zeros(0, complex), np.zeros(0, int), (), fineness)


@dataclass(frozen=True)
class CoverReport:
    covering_constant_estimate: int
    fineness_checked: float
    covered: bool
    sample_count: int
    uncovered_count: int = 0
    band: tuple = field(default=(0.0, 0.0))


def _check_eps(eps):
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"fineness eps must lie in (0, 1/2], got {eps!r}")


def layer_count(eps: float, layer: int) -> int:
    return int(math.ceil(2.0 * math.pi / eps * (1.0 + (1.0 + eps) ** layer)))


def _layers(curve, eps, first, last, factor):
    pts, lay = [], []
    for l in range(first, last + 1):
        n = layer_count(eps, l)
        theta = -math.pi + 2.0 * math.pi * np.arange(1, n + 1) / n
        pts.append(factor(l) * curve.position(theta))
        lay.append(np.full(n, l))
    if not pts:
        return SourceSet.empty(eps)
    pts = np.concatenate(pts)
    return SourceSet(pts, np.concatenate(lay), ("layer",) * pts.size, eps)


def whitney_layers(curve: BoundaryCurve, eps: float = 0.3, first_layer: int = 0, last_layer: int = 2) -> SourceSet:
    """Exterior Whitney layers ``first_layer..last_layer``, layer-major order."""
    _check_eps(eps)
    if first_layer < 0 or last_layer < first_layer - 1:
        raise ValueError("need 0 <= first_layer and last_layer >= first_layer - 1")
    return _layers(curve, eps, first_layer, last_layer, lambda l: 1.0 + (1.0 + eps) ** (-l))


def interior_whitney_layers(curve: BoundaryCurve, eps: float = 0.3, first_layer: int = 1, last_layer: int = 2) -> SourceSet:
    """Interior layers with radial factor ``1 - (1+eps)^-l``, ``l >= 1``."""
    _check_eps(eps)
    if first_layer < 1:
        raise ValueError("interior layers start at l = 1 (radial factor would vanish)")
    return _layers(curve, eps, first_layer, last_layer, lambda l: 1.0 - (1.0 + eps) ** (-l))


def outward_direction(curve: BoundaryCurve, theta: float) -> complex:
    """Outward normal, or the bisector of the one-sided normals at a corner."""
    if curve.is_corner(theta):
        h = 1e-7
        nu = curve.normal(theta - h) + curve.normal(theta + h)
        return complex(nu / abs(nu))
    return complex(curve.normal(theta))


def cone_points(
    curve: BoundaryCurve,
    apex: complex,
    levels: int,
    eps: float = 0.3,
    half_angle: float = math.pi / 3,
    rho0: float = 1.0,
    min_clearance: float = 0.1,
    tag: str = "cone",
) -> SourceSet:
    """Sources in a cone opening outward from a boundary point.

    Level ``m = 1..levels`` lies on the arc of radius
    ``rho_m = rho0 (1+eps)^-m`` around ``apex``, inside the cone of
    half-angle ``half_angle`` about the outward direction, with
    ``ceil(2 half_angle / eps)`` points (spacing at most ``eps rho_m``).
    Points that are not exterior with clearance ``min_clearance * rho_m``
    are dropped.
    """
    apex = complex(apex)
    theta_a = float(np.angle(apex))
    if distance_to_curve(curve, apex) > 1e-10:
        raise ValueError(f"cone apex {apex} is not on the curve")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if levels <= 0:
        return SourceSet.empty(min(eps, 0.5))
    axis = outward_direction(curve, theta_a)
    per_level = int(math.ceil(2.0 * half_angle / eps - 1e-12))
    phis = -half_angle + 2.0 * half_angle * (np.arange(per_level) + 0.5) / per_level
    rho = rho0 * (1.0 + eps) ** (-np.arange(1, levels + 1, dtype=float))
    pts = (apex + rho[:, None] * axis * np.exp(1j * phis)[None, :]).ravel()
    rho_of = np.repeat(rho, per_level)
    outside = ~curve.contains(pts)
    clear = distance_to_curve(curve, pts) >= min_clearance * rho_of
    # levels below the resolvable scale would sit on the apex itself
    resolvable = rho_of > 1e-11 * max(1.0, abs(apex))
    keep = outside & clear & resolvable
    if not keep.all():
        logger.info("cone at %s: dropped %d of %d points lacking clearance", apex, (~keep).sum(), keep.size)
    pts = pts[keep]
    return SourceSet(pts, np.full(pts.size, CONE_LAYER), (tag,) * pts.size, min(eps, 0.5))


def mfs_ring(curve: BoundaryCurve, count: int, radial_factor: float) -> SourceSet:
    """Classical MFS sources ``r_MFS r(2 pi j / s) e^{2 pi i j / s}``, ``j = 1..s``."""
    if radial_factor <= 1.0:
        raise ValueError("radial_factor must exceed 1 so sources are exterior")
    if count < 1:
        raise ValueError("count must be positive")
    theta = 2.0 * math.pi * np.arange(1, count + 1) / count
    pts = radial_factor * curve.position(theta)
    return SourceSet(pts, np.full(count, MFS_LAYER), ("mfs",) * count, 0.5)


def _sample_band(curve, lo, hi, count, rng, metric="radial", batch=20000):
    """Area-uniform samples of the exterior band between ``lo`` and ``hi``.

    ``metric="radial"``: ``z = rho * gamma(theta)`` with ``lo <= rho <= hi``
    (area element ``rho r(theta)^2 drho dtheta``).  ``metric="distance"``:
    ``lo <= d(z) < hi`` by annulus rejection.
    """
    theta_grid = np.linspace(-math.pi, math.pi, 4096)
    r = curve.radius(theta_grid)
    out = []
    have = 0
    while have < count:
        if metric == "radial":
            th = rng.uniform(-math.pi, math.pi, batch)
            rho = np.sqrt(rng.uniform(lo**2, hi**2, batch))
            rr = curve.radius(th)
            accept = rng.uniform(0.0, float(r.max()) ** 2 * 1.0001, batch) < rr**2
            z = (rho * curve.position(th))[accept]
        elif metric == "distance":
            r_in, r_out = float(r.min()), float(r.max()) + hi
            rad = np.sqrt(rng.uniform(r_in**2, r_out**2, batch))
            z = rad * np.exp(1j * rng.uniform(-math.pi, math.pi, batch))
            z = z[~curve.contains(z)]
            d = distance_to_curve(curve, z)
            z = z[(d >= lo) & (d < hi)]
        else:
            raise ValueError("metric must be 'radial' or 'distance'")
        out.append(z)
        have += z.size
    return np.concatenate(out)[:count]


def verify_cover(
    sources: SourceSet,
    curve: BoundaryCurve,
    eps_prime: float,
    band=None,
    samples: int = 100_000,
    seed: int = 0,
    metric: str = "radial",
) -> CoverReport:
    """Monte-Carlo check of the two Whitney-set conditions.

    Samples an exterior band and counts, per sample, the balls
    ``B(q_j, eps_prime * d(q_j))`` containing it.  By default the band is
    ``{rho * gamma(theta)}`` for ``rho`` between the smallest and largest
    source radial factors, i.e. the region the layers are built to fill.
    With ``metric="distance"`` the band is ``lo <= d(z) < hi`` (default:
    nearest and farthest source distance).
    """
    if samples < 10_000:
        raise ValueError("verify_cover needs at least 1e4 samples")
    q = sources.points
    if q.size == 0:
        return CoverReport(0, eps_prime, False, 0, samples)
    dq = distance_to_curve(curve, q)
    if band is None:
        if metric == "radial":
            rf = sources.radial_factors(curve)
            band = (float(rf.min()), float(rf.max()))
        else:
            band = (float(dq.min()), float(dq.max()))
    lo, hi = float(band[0]), float(band[1])
    rng = np.random.default_rng(seed)
    z = _sample_band(curve, lo, hi, samples, rng, metric)
    radius = eps_prime * dq
    counts = np.zeros(z.size, dtype=int)
    chunk = max(1, 2_000_000 // max(q.size, 1))
    for s in range(0, z.size, chunk):
        zz = z[s : s + chunk]
        counts[s : s + chunk] = np.sum(np.abs(zz[:, None] - q[None, :]) < radius[None, :], axis=1)
    # covering constant: also evaluate at the sources themselves, which
    # attain the maximum overlap for lattice-like sets
    at_q = np.zeros(q.size, dtype=int)
    for s in range(0, q.size, chunk):
        qq = q[s : s + chunk]
        at_q[s : s + chunk] = np.sum(np.abs(qq[:, None] - q[None, :]) < radius[None, :], axis=1)
    uncovered = int(np.sum(counts == 0))
    n_cover = int(max(counts.max(initial=0), at_q.max(initial=0)))
    return CoverReport(n_cover, float(eps_prime), uncovered == 0, int(z.size), uncovered, (lo, hi))


def source_angles(sources: SourceSet) -> np.ndarray:
    return wrap_angle(np.angle(sources.points))

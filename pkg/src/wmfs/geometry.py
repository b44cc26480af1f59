"""Closed star-shaped boundary curves given in polar form.

A curve is the image of ``theta -> r(theta) * exp(i theta)`` for
``theta`` in ``[-pi, pi]``.  Everything downstream (source layers, boundary
meshes, quadrature) is written in this angular coordinate, so the curve
object only needs the radius function, its derivative and the list of
angles where the derivative jumps.

All curve functions accept scalars or numpy arrays of angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

ArrayFn = Callable[[np.ndarray], np.ndarray]

TWO_PI = 2.0 * math.pi
CORNER_TOL = 1e-14
DISTANCE_SAMPLES = 4096


class CornerError(ValueError):
    """Raised when a normal or tangent is requested at a corner."""


def wrap_angle(theta):
    """Map angles to the half-open interval ``[-pi, pi)``."""
    return np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi


@dataclass(frozen=True)
class BoundaryPoint:
    theta: float
    position: complex
    normal: Optional[complex]
    tangent: Optional[complex]


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Polar parametrization ``w(theta) = r(theta) e^{i theta}``.

    Parameters
    ----------
    radius_fn, radius_derivative_fn : callable
        Vectorized ``r(theta)`` and ``r'(theta)``; must be 2*pi periodic.
    corners : sequence of float
        Angles in ``[-pi, pi)`` where ``r'`` jumps, strictly increasing.
    name : str
        Identifier used in experiment configs.
    """

    radius_fn: ArrayFn
    radius_derivative_fn: ArrayFn
    corners: tuple = ()
    name: str = "curve"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        corners = tuple(float(c) for c in self.corners)
        if any(c < -math.pi or c >= math.pi for c in corners):
            raise ValueError("corner angles must lie in [-pi, pi)")
        if any(b <= a for a, b in zip(corners, corners[1:])):
            raise ValueError("corner angles must be strictly increasing")
        object.__setattr__(self, "corners", corners)

    # -- pointwise quantities -------------------------------------------------
    def radius(self, theta):
        return self.radius_fn(np.asarray(theta, dtype=float))

    def radius_derivative(self, theta):
        return self.radius_derivative_fn(np.asarray(theta, dtype=float))

    def position(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.radius(theta) * np.exp(1j * theta)

    def velocity(self, theta):
        """Derivative of ``w(theta)``: ``(r' + i r) e^{i theta}``."""
        theta = np.asarray(theta, dtype=float)
        return (self.radius_derivative(theta) + 1j * self.radius(theta)) * np.exp(1j * theta)

    def speed(self, theta):
        """Arc-length Jacobian ``sqrt(r^2 + r'^2)``."""
        return np.hypot(self.radius(theta), self.radius_derivative(theta))

    def tangent(self, theta):
        v = self.velocity(theta)
        return v / np.abs(v)

    def normal(self, theta):
        """Outward unit normal ``-i * tangent`` (curve is positively oriented)."""
        return -1j * self.tangent(theta)

    def is_corner(self, theta) -> bool:
        if not self.corners:
            return False
        t = float(wrap_angle(theta))
        c = np.asarray(self.corners)
        gap = np.abs(wrap_angle(c - t))
        return bool(np.min(gap) <= CORNER_TOL)

    def contains(self, z) -> np.ndarray:
        """Strict polar inclusion test ``|z| < r(arg z)``."""
        z = np.asarray(z, dtype=complex)
        return np.abs(z) < self.radius(np.angle(z))

    # -- sampled data ---------------------------------------------------------
    def _samples(self):
        if "samples" not in self._cache:
            theta = np.linspace(-math.pi, math.pi, DISTANCE_SAMPLES, endpoint=False)
            w = self.position(theta)
            tree = cKDTree(np.column_stack([w.real, w.imag]))
            self._cache["samples"] = (theta, tree)
        return self._cache["samples"]

    def bounding_box(self, samples: int = 20000):
        """Return ``(xmin, xmax, ymin, ymax)`` from dense sampling plus corners."""
        theta = np.concatenate(
            [np.linspace(-math.pi, math.pi, samples), np.asarray(self.corners, dtype=float)]
        )
        w = self.position(theta)
        return float(w.real.min()), float(w.real.max()), float(w.imag.min()), float(w.imag.max())

    def length(self) -> float:
        from .quadrature import integrate_curve

        return integrate_curve(self, lambda w, nu: np.ones_like(w.real))

    def centroid(self, samples: int = 20000) -> complex:
        """Area centroid ``(2/3) int r^3 e^{i theta} / int r^2`` by trapezoid rule."""
        theta = np.linspace(-math.pi, math.pi, samples, endpoint=False)
        r = self.radius(theta)
        return complex((2.0 / 3.0) * np.sum(r**3 * np.exp(1j * theta)) / np.sum(r**2))

    def lipschitz_constant(self, samples: int = 20000) -> float:
        """Diagnostic ``max(Lip(rho), Lip(rho^-1))`` of the radial stretch map.

        ``rho(s e^{i theta}) = s r(theta) e^{i theta}``.  In polar frames its
        Jacobian is ``[[r, r'], [0, r]]``; the constant is the largest
        operator norm of that matrix or its inverse over the curve.
        """
        theta = np.linspace(-math.pi, math.pi, samples, endpoint=False)
        r = self.radius(theta)
        dr = self.radius_derivative(theta)
        jac = np.zeros((theta.size, 2, 2))
        jac[:, 0, 0] = r
        jac[:, 0, 1] = dr
        jac[:, 1, 1] = r
        sv = np.linalg.svd(jac, compute_uv=False)
        return float(max(sv[:, 0].max(), (1.0 / sv[:, 1]).max()))


def point_at(curve: BoundaryCurve, theta: float, with_normal: bool = True) -> BoundaryPoint:
    """Evaluate the curve at one angle.

    At a corner the normal is undefined; with ``with_normal=True`` this
    raises :class:`CornerError`, otherwise normal and tangent are ``None``.
    """
    theta = float(theta)
    position = complex(curve.position(theta))
    if curve.is_corner(theta):
        if with_normal:
            raise CornerError(f"normal undefined at corner theta={theta!r}")
        return BoundaryPoint(theta, position, None, None)
    tangent = complex(curve.tangent(theta))
    return BoundaryPoint(theta, position, -1j * tangent, tangent)


def distance_to_curve(curve: BoundaryCurve, z, refine_iter: int = 80):
    """Euclidean distance from ``z`` (scalar or array) to the curve.

    The nearest of 4096 uniform angular samples is found with a KD-tree;
    the distance is then minimized over the two neighbouring sample
    intervals by golden-section search.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    theta_s, tree = curve._samples()
    n = theta_s.size
    h = TWO_PI / n
    _, idx = tree.query(np.column_stack([z_arr.real, z_arr.imag]))
    lo = theta_s[idx] - h
    hi = theta_s[idx] + h

    def dist(t):
        return np.abs(z_arr - curve.position(t))

    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = dist(c), dist(d)
    for _ in range(refine_iter):
        left = fc < fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - g * (hi - lo)
        new_d = lo + g * (hi - lo)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, dist(new_c), fd)
        fd_next = np.where(left, fc, dist(new_d))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    best = np.minimum(np.minimum(fc, fd), np.abs(z_arr - curve.position(theta_s[idx])))
    best = np.minimum(best, np.minimum(dist(lo), dist(hi)))
    if np.ndim(z) == 0:
        return float(best[0])
    return best.reshape(np.shape(z))


# -- named curves ---------------------------------------------------------------


def circle_curve(radius: float = 1.0) -> BoundaryCurve:
    return BoundaryCurve(
        lambda t: np.full(np.shape(t), float(radius)),
        lambda t: np.zeros(np.shape(t)),
        (),
        "circle",
    )


def star_curve(base: float = 3.0, amplitude: float = 1.0, lobes: int = 4) -> BoundaryCurve:
    """``r(theta) = base + amplitude * cos(lobes * theta)``; default 3 + cos 4 theta."""
    if base <= abs(amplitude):
        raise ValueError("star curve radius must stay positive")
    return BoundaryCurve(
        lambda t: base + amplitude * np.cos(lobes * t),
        lambda t: -amplitude * lobes * np.sin(lobes * t),
        (),
        "star",
    )


def _square_radius(t):
    return 1.0 / np.maximum(np.abs(np.cos(t)), np.abs(np.sin(t)))


def _square_radius_derivative(t):
    c, s = np.cos(t), np.sin(t)
    vertical_side = np.abs(c) >= np.abs(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        d_vert = s * np.sign(c) / c**2
        d_horiz = -c * np.sign(s) / s**2
    return np.where(vertical_side, d_vert, d_horiz)


def square_curve() -> BoundaryCurve:
    """Boundary of ``{x + iy : -1 < x, y < 1}``."""
    q = math.pi / 4.0
    return BoundaryCurve(_square_radius, _square_radius_derivative, (-3 * q, -q, q, 3 * q), "square")


def tabulated_curve(thetas: Sequence[float], radii: Sequence[float], name: str = "tabulated") -> BoundaryCurve:
    """Polar curve from a sampled radius table, linearly interpolated in theta.

    Every knot is a potential corner of the interpolant and is listed as
    such, so boundary meshes always put a point there.
    """
    t = wrap_angle(np.asarray(thetas, dtype=float))
    r = np.asarray(radii, dtype=float)
    if t.shape != r.shape or t.size < 3:
        raise ValueError("need at least three (theta, r) samples of equal length")
    if np.any(r <= 0):
        raise ValueError("radii must be positive")
    order = np.argsort(t)
    t, r = t[order], r[order]
    if np.any(np.diff(t) <= 0):
        raise ValueError("duplicate angles in radius table")
    t_ext = np.concatenate([t, [t[0] + TWO_PI]])
    r_ext = np.concatenate([r, [r[0]]])
    slopes = np.diff(r_ext) / np.diff(t_ext)

    def radius(theta):
        return np.interp(theta, t, r, period=TWO_PI)

    def derivative(theta):
        x = np.mod(np.asarray(theta) - t[0], TWO_PI) + t[0]
        k = np.clip(np.searchsorted(t_ext, x, side="right") - 1, 0, t.size - 1)
        return slopes[k]

    return BoundaryCurve(radius, derivative, tuple(t), name)


NAMED_CURVES = {"star": star_curve, "square": square_curve, "circle": circle_curve}


def curve_from_spec(spec) -> BoundaryCurve:
    """Build a curve from a config value: a name or a dict.

    Dict form: ``{"name": "star", "base": 3, ...}`` passes extra keys to the
    named constructor; ``{"name": ..., "table": {"theta": [...], "r": [...]}}``
    builds a tabulated curve.
    """
    if isinstance(spec, str):
        spec = {"name": spec}
    spec = dict(spec)
    name = spec.pop("name", "tabulated")
    if "table" in spec:
        table = spec["table"]
        return tabulated_curve(table["theta"], table["r"], name=name)
    if name not in NAMED_CURVES:
        raise ValueError(f"unknown curve {name!r}; expected one of {sorted(NAMED_CURVES)} or a table")
    return NAMED_CURVES[name](**spec)

"""Gauss-Legendre panel quadrature along a polar curve.

Boundary integrals ``int g(w) |dw|`` are taken in the angle variable with
the arc-length Jacobian ``sqrt(r^2 + r'^2)``.  Boundary data callables
have the signature ``g(w, nu) -> real array`` where ``nu`` is the outward
normal at ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_ORDER = 10


@dataclass(frozen=True)
class GaussRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * self.nodes
        return half * float(np.dot(self.weights, f(x)))


@dataclass(frozen=True)
class Segment:
    """Angular interval ``[theta_start, theta_end]`` of a curve, with no corner inside."""

    theta_start: float
    theta_end: float

    def __post_init__(self):
        if self.theta_end < self.theta_start:
            raise ValueError("segment must satisfy theta_start <= theta_end")


def _legendre(n: int, x: np.ndarray):
    """Return ``P_n(x)`` and ``P_n'(x)`` by the three-term recurrence."""
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def _gauss(n: int):
    k = np.arange(1, n + 1)
    x = np.cos(math.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    _, dp = _legendre(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1].copy()
    w = w[::-1].copy()
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_nodes_weights(order: int = DEFAULT_ORDER) -> GaussRule:
    """Gauss-Legendre rule on ``[-1, 1]`` via Newton iteration on ``P_n``."""
    if order < 1:
        raise ValueError("order must be positive")
    x, w = _gauss(int(order))
    return GaussRule(x, w)


def _panel_nodes(a, b, rule: GaussRule):
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * rule.nodes, half * rule.weights


def integrate_segments(curve, starts, ends, g, order: int = DEFAULT_ORDER) -> np.ndarray:
    """One Gauss panel per angular segment; returns ``int g |dw|`` per segment.

    ``starts`` and ``ends`` are arrays of angles with ``ends >= starts``;
    zero-length segments give exactly zero.
    """
    rule = gauss_nodes_weights(order)
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    theta, w = _panel_nodes(starts, ends, rule)
    pos = curve.position(theta)
    vel = (curve.radius_derivative(theta) + 1j * curve.radius(theta)) * np.exp(1j * theta)
    speed = np.abs(vel)
    nu = -1j * vel / speed
    vals = np.asarray(g(pos, nu), dtype=float)
    out = np.sum(vals * speed * w, axis=-1)
    return np.where(ends > starts, out, 0.0)


def integrate_data(curve, seg: Segment, g, panels: int = 1, order: int = DEFAULT_ORDER) -> float:
    """``int_seg g(w) |dw|`` with ``panels`` equal Gauss panels (default one)."""
    edges = np.linspace(seg.theta_start, seg.theta_end, panels + 1)
    return float(np.sum(integrate_segments(curve, edges[:-1], edges[1:], g, order)))


def _split_at_corners(curve, a: float, b: float):
    """Angles ``a < c_1 < ... < b`` including every corner (mod 2 pi) strictly inside."""
    pts = [a, b]
    for c in curve.corners:
        k0 = math.ceil((a - c) / (2 * math.pi))
        k1 = math.floor((b - c) / (2 * math.pi))
        for k in range(k0, k1 + 1):
            t = c + 2 * math.pi * k
            if a < t < b:
                pts.append(t)
    return np.unique(np.asarray(pts))


def adaptive_panels(curve, a, b, integrand, rtol=1e-12, order=DEFAULT_ORDER, breakpoints=(), max_level=60):
    """Dyadically refine panels on ``[a, b]`` until each panel converges.

    ``integrand(theta)`` returns values of shape ``theta.shape + (m,)`` or
    ``theta.shape``; the Jacobian must already be included.  A panel is
    accepted when its one-panel and two-half-panel values differ by at most
    ``rtol`` times the running integral of ``|f|``, component-wise.  Corners and
    ``breakpoints`` always start a new panel.

    Returns ``(edges_lo, edges_hi, total)``.
    """
    rule = gauss_nodes_weights(order)
    edges = _split_at_corners(curve, float(a), float(b))
    extra = [t for t in np.asarray(breakpoints, dtype=float).ravel() if a < t < b]
    edges = np.unique(np.concatenate([edges, extra]))
    lo, hi = edges[:-1], edges[1:]

    def panel_values(lo, hi):
        theta, w = _panel_nodes(lo, hi, rule)
        vals = np.asarray(integrand(theta))
        if vals.ndim == theta.ndim:
            vals = vals[..., None]
        return np.einsum("pq,pqm->pm", w, vals)

    coarse = panel_values(lo, hi)
    accepted_lo, accepted_hi, accepted_val = [], [], []
    done_abs = np.zeros(coarse.shape[1])
    for level in range(max_level):
        mid = 0.5 * (lo + hi)
        left = panel_values(lo, mid)
        right = panel_values(mid, hi)
        fine = left + right
        # scale by the integral of |f| so mean-zero integrands still converge
        scale = done_abs + np.abs(left).sum(axis=0) + np.abs(right).sum(axis=0)
        scale = np.maximum(scale, np.finfo(float).tiny)
        ok = np.all(np.abs(fine - coarse) <= rtol * scale, axis=1)
        ok |= (hi - lo) < 1e-13
        done_abs = done_abs + np.abs(left[ok]).sum(axis=0) + np.abs(right[ok]).sum(axis=0)
        accepted_lo.append(lo[ok])
        accepted_hi.append(hi[ok])
        accepted_val.append(fine[ok])
        keep = ~ok
        if not keep.any():
            break
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
    else:
        raise RuntimeError("adaptive quadrature did not converge")
    total = np.concatenate(accepted_val).sum(axis=0)
    return np.concatenate(accepted_lo), np.concatenate(accepted_hi), total


def integrate_adaptive(curve, seg: Segment, g, rtol: float = 1e-12, order: int = DEFAULT_ORDER) -> float:
    """Oracle mode of :func:`integrate_data`: dyadic refinement to ``rtol``."""

    def integrand(theta):
        vel = curve.velocity(theta)
        speed = np.abs(vel)
        return np.asarray(g(curve.position(theta), -1j * vel / speed)) * speed

    _, _, total = adaptive_panels(curve, seg.theta_start, seg.theta_end, integrand, rtol=rtol, order=order)
    return float(total[0])


def integrate_curve(curve, g, rtol: float = 1e-13, order: int = DEFAULT_ORDER) -> float:
    """``int_gamma g(w) |dw|`` over the whole closed curve, adaptively."""
    return integrate_adaptive(curve, Segment(-math.pi, math.pi), g, rtol=rtol, order=order)

"""Normalized Lusin wavelets ``psi_j(w) = b_j (w - q_j)^-(k+1)``.

Also provides their pairings with boundary elements (indicator functions of
curve segments) composed with the Neumann trace ``Re(nu f)`` or the
tangential trace ``Re(tau f)``; these integrals have closed forms through
the primitive ``-(w - q)^-k / k``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryCurve, distance_to_curve
from .quadrature import adaptive_panels, gauss_nodes_weights, _panel_nodes
from .whitney import SourceSet


class TraceKind(str, enum.Enum):
    NEUMANN = "neumann"
    DIRICHLET_REGULARITY = "dirichlet_regularity"


class SingularSourceError(ValueError):
    """A source point lies on (or numerically on) the boundary curve."""


def ipow(x, n: int):
    """Integer power by repeated multiplication (no branch cuts)."""
    if n < 0:
        return 1.0 / ipow(x, -n)
    out = np.ones_like(x)
    for _ in range(n):
        out = out * x
    return out


@dataclass(frozen=True, eq=False)
class WaveletFamily:
    sources: SourceSet
    order: int
    norms: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.norms, dtype=float).ravel()
        if b.size != self.sources.size:
            raise ValueError("one normalization constant per source expected")
        if np.any(b <= 0):
            raise ValueError("normalization constants must be positive")
        if self.order < 1:
            raise ValueError("wavelet order k must be >= 1")
        b.setflags(write=False)
        object.__setattr__(self, "norms", b)

    @property
    def points(self) -> np.ndarray:
        return self.sources.points

    @property
    def size(self) -> int:
        return self.sources.size

    def values(self, z) -> np.ndarray:
        """Matrix ``psi_j(z_i)`` of shape ``z.shape + (s,)``."""
        z = np.asarray(z, dtype=complex)
        return self.norms * ipow(1.0 / (z[..., None] - self.points), self.order + 1)

    def primitives(self, w) -> np.ndarray:
        """``(w - q_j)^-k`` for each point of ``w``; shape ``w.shape + (s,)``."""
        w = np.asarray(w, dtype=complex)
        return ipow(1.0 / (w[..., None] - self.points), self.order)

    def to_json(self) -> str:
        return json.dumps(
            {
                "order": self.order,
                "re": self.points.real.tolist(),
                "im": self.points.imag.tolist(),
                "layer": self.sources.layers.tolist(),
                "tag": list(self.sources.tags),
                "fineness": self.sources.fineness,
                "b": self.norms.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "WaveletFamily":
        d = json.loads(text)
        pts = np.asarray(d["re"]) + 1j * np.asarray(d["im"])
        src = SourceSet(pts, d["layer"], tuple(d["tag"]), d["fineness"])
        return cls(src, int(d["order"]), np.asarray(d["b"]))


def _closest_angles(curve, q):
    theta_s, tree = curve._samples()
    _, idx = tree.query(np.column_stack([q.real, q.imag]))
    return theta_s[idx]


def _norm_integrals(curve, q, order, rtol):
    """``int_gamma |w - q_j|^-(2k+2) |dw|`` for every source, adaptively."""
    p = 2 * order + 2
    out = np.empty(q.size)
    closest = _closest_angles(curve, q)

    for j in range(q.size):

        def integrand(theta, qj=q[j]):
            vel = curve.velocity(theta)
            return np.abs(curve.position(theta) - qj) ** (-p) * np.abs(vel)

        t0 = closest[j]
        _, _, total = adaptive_panels(curve, t0 - math.pi, t0 + math.pi, integrand, rtol=rtol, breakpoints=[t0])
        out[j] = total[0]
    return out


def normalize(sources: SourceSet, curve: BoundaryCurve, order: int = 1, rtol: float = 1e-11) -> WaveletFamily:
    """Compute ``b_j = (int |w - q_j|^-(2k+2) |dw|)^-1/2`` so ``||psi_j|| = 1``."""
    q = sources.points
    if q.size:
        d = distance_to_curve(curve, q)
        bad = np.flatnonzero(d < 1e-12)
        if bad.size:
            raise SingularSourceError(f"sources {bad.tolist()} lie on the curve")
    integrals = _norm_integrals(curve, q, order, rtol)
    return WaveletFamily(sources, int(order), integrals ** -0.5)


def wavelet_value(family: WaveletFamily, j: int, z) -> complex:
    """``b_j (z - q_j)^-(k+1)``."""
    q = family.points[j]
    z = complex(z)
    if z == q:
        raise ZeroDivisionError(f"wavelet {j} evaluated at its pole {q}")
    return complex(family.norms[j] * ipow(1.0 / (z - q), family.order + 1))


def _pairing(diff, scale, trace, imaginary):
    """Map primitive differences ``P(w_{m-1}) - P(w_m)`` to real pairings."""
    trace = TraceKind(trace)
    if trace is TraceKind.NEUMANN:
        val = diff.real if imaginary else diff.imag
    else:
        val = -diff.imag if imaginary else diff.real
    return scale * val


def element_inner_product(family, j, seg_start, seg_end, trace=TraceKind.NEUMANN, imaginary_part=False) -> float:
    """Pairing of ``T psi_j`` (or ``T i psi_j``) with the indicator of the arc ``seg_start -> seg_end``.

    Neumann: ``(b/k) Im(P0 - P1)`` for the real wavelet and ``(b/k) Re(P0 - P1)``
    for its imaginary companion, with ``P = (w - q_j)^-k``.  Tangential
    trace: ``(b/k) Re(P0 - P1)`` and ``-(b/k) Im(P0 - P1)``.
    """
    w0, w1 = complex(seg_start), complex(seg_end)
    if w0 == w1:
        return 0.0
    k = family.order
    q = family.points[j]
    diff = ipow(1.0 / (w0 - q), k) - ipow(1.0 / (w1 - q), k)
    return float(_pairing(diff, family.norms[j] / k, trace, imaginary_part))


def element_matrix(family: WaveletFamily, w_points, trace=TraceKind.NEUMANN) -> np.ndarray:
    """Pairings for consecutive arcs ``w_points[m] -> w_points[m+1]``.

    Returns an ``(M, 2s)`` array: columns ``0..s-1`` real wavelets,
    ``s..2s-1`` imaginary companions.
    """
    w = np.asarray(w_points, dtype=complex)
    prim = family.primitives(w)
    diff = prim[:-1] - prim[1:]
    scale = family.norms / family.order
    re = _pairing(diff, scale, trace, False)
    im = _pairing(diff, scale, trace, True)
    empty = (w[:-1] == w[1:])
    re[empty] = 0.0
    im[empty] = 0.0
    return np.hstack([re, im])


def gram_panels(family: WaveletFamily, curve: BoundaryCurve, rtol: float = 1e-12):
    """Quadrature nodes/weights (in ``|dw|``) resolving every ``|psi_j|^2``."""
    q = family.points
    b = family.norms
    k = family.order

    def integrand(theta):
        vel = curve.velocity(theta)
        w = curve.position(theta)
        return (b**2) * np.abs(w[..., None] - q) ** (-(2 * k + 2)) * np.abs(vel)[..., None]

    closest = _closest_angles(curve, q) if q.size else []
    lo, hi, _ = adaptive_panels(curve, -math.pi, math.pi, integrand, rtol=rtol, breakpoints=closest)
    rule = gauss_nodes_weights()
    theta, wts = _panel_nodes(lo, hi, rule)
    theta, wts = theta.ravel(), wts.ravel()
    return curve.position(theta), wts * curve.speed(theta)


def independence_gram(family: WaveletFamily, curve: BoundaryCurve, rtol: float = 1e-12) -> np.ndarray:
    """Hermitian Gram matrix ``G_ij = (psi_i, psi_j)_{L2(gamma)}``."""
    q = family.points
    if q.size != np.unique(q).size:
        raise ValueError("degenerate family: duplicated source points")
    w, wts = gram_panels(family, curve, rtol)
    psi = family.values(w)
    return (psi.T * wts) @ psi.conj()

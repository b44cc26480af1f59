"""Boundary meshes adapted to the sources, and the real least-squares system.

Row ``m`` of the system pairs the expansion with the indicator of the arc
``gamma_m``; row 0 is the arc that wraps through ``theta = pi``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import TWO_PI, BoundaryCurve, distance_to_curve, wrap_angle
from .quadrature import integrate_segments
from .wavelets import TraceKind, WaveletFamily, element_matrix
from .whitney import SourceSet

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-12


class SingularEntryError(ValueError):
    """A source lies on a boundary segment, so a matrix entry is infinite."""


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Sorted boundary angles ``w_points`` in ``[-pi, pi)`` and their arcs.

    Segment ``m >= 1`` runs from ``w_points[m-1]`` to ``w_points[m]``;
    segment 0 runs from ``w_points[-1]`` to ``w_points[0] + 2 pi``.
    """

    curve: BoundaryCurve
    w_points: np.ndarray
    forced_points: tuple = ()

    @property
    def size(self) -> int:
        return self.w_points.size

    @property
    def segment_bounds(self):
        a = self.w_points
        starts = np.concatenate([[a[-1]], a[:-1]])
        ends = np.concatenate([[a[0] + TWO_PI], a[1:]])
        return starts, ends

    @property
    def positions(self) -> np.ndarray:
        return self.curve.position(self.w_points)

    def segment_of(self, theta: float) -> int:
        t = float(wrap_angle(theta))
        return int(np.searchsorted(self.w_points, t, side="right")) % self.size


def adapted_boundary_points(
    sources: SourceSet,
    curve: BoundaryCurve,
    m0: int = 5,
    forced=(),
    dedup: bool = False,
) -> BoundaryMesh:
    """``M0`` boundary angles per source, offset by multiples of ``(r_j - 1)``.

    Even ``M0``: ``theta_j +- (r_j - 1) i / (M0/2)``, ``i = 1..M0/2``.
    Odd ``M0``: ``theta_j`` and ``theta_j +- (r_j - 1) i / ((M0-1)/2)``.
    Curve corners and ``forced`` angles are added when not already present.
    Coincident source-derived angles are kept (their arcs are empty and give
    zero rows) unless ``dedup`` is set.
    """
    if m0 < 1:
        raise ValueError("m0 must be a positive integer")
    if sources.size == 0:
        raise ValueError("need at least one source")
    theta = np.angle(sources.points)
    excess = sources.radial_factors(curve) - 1.0
    if m0 % 2 == 0:
        half = m0 // 2
        steps = np.arange(1, half + 1) / half
        offsets = np.concatenate([-steps[::-1], steps])
    else:
        half = (m0 - 1) // 2
        steps = np.arange(1, half + 1) / half if half else np.zeros(0)
        offsets = np.concatenate([-steps[::-1], [0.0], steps])
    angles = wrap_angle((theta[:, None] + excess[:, None] * offsets[None, :]).ravel())
    angles = np.sort(angles)
    if dedup:
        angles = _dedup(angles)
    extra = []
    for t in list(curve.corners) + [float(wrap_angle(f)) for f in forced]:
        gap = np.abs(wrap_angle(angles - t)) if angles.size else np.array([np.inf])
        if gap.min() > ANGLE_TOL and all(abs(float(wrap_angle(t - e))) > ANGLE_TOL for e in extra):
            extra.append(t)
    if extra:
        angles = np.sort(np.concatenate([angles, extra]))
    return BoundaryMesh(curve, angles, tuple(float(wrap_angle(f)) for f in forced))


def _dedup(angles):
    keep = np.concatenate([[True], np.diff(angles) > ANGLE_TOL])
    if angles.size > 1 and angles[-1] - (angles[0] + TWO_PI) > -ANGLE_TOL:
        keep[-1] = False
    dropped = int((~keep).sum())
    if dropped:
        logger.info("dropped %d duplicate boundary angles", dropped)
    return angles[keep]


def uniform_boundary_points(curve: BoundaryCurve, count: int, forced=()) -> BoundaryMesh:
    """Equally spaced angles plus corners and forced angles."""
    angles = -math.pi + TWO_PI * np.arange(count) / count
    extra = [t for t in list(curve.corners) + [float(wrap_angle(f)) for f in forced]
             if np.abs(wrap_angle(angles - t)).min() > ANGLE_TOL]
    return BoundaryMesh(curve, np.sort(np.concatenate([angles, extra])), tuple(forced))


@dataclass(frozen=True, eq=False)
class BoundarySystem:
    matrix: np.ndarray
    rhs: np.ndarray
    mesh: BoundaryMesh
    family: WaveletFamily
    trace: TraceKind

    @property
    def shape(self):
        return self.matrix.shape


def _check_sources(family, mesh):
    q = family.points
    d = distance_to_curve(mesh.curve, q) if q.size else np.zeros(0)
    bad = np.flatnonzero(d < 1e-12)
    if bad.size:
        j = int(bad[0])
        m = mesh.segment_of(np.angle(q[j]))
        raise SingularEntryError(f"source j={j} lies on boundary segment m={m}")


def system_matrix(family: WaveletFamily, mesh: BoundaryMesh, trace=TraceKind.NEUMANN) -> np.ndarray:
    _check_sources(family, mesh)
    w = mesh.positions
    # close the loop: the wrap-around arc is row 0
    loop = np.concatenate([[w[-1]], w])
    return element_matrix(family, loop, trace)


def assemble(family: WaveletFamily, mesh: BoundaryMesh, trace=TraceKind.NEUMANN, g=None) -> BoundarySystem:
    """Matrix of analytic element pairings and right-hand side ``(g, chi_m)``.

    ``g(w, nu)`` is the boundary datum; ``None`` means zero data.
    """
    trace = TraceKind(trace)
    matrix = system_matrix(family, mesh, trace)
    if g is None:
        rhs = np.zeros(mesh.size)
    else:
        starts, ends = mesh.segment_bounds
        rhs = integrate_segments(mesh.curve, starts, ends, g)
    if not np.all(np.isfinite(matrix)):
        raise SingularEntryError("non-finite matrix entries")
    return BoundarySystem(matrix, rhs, mesh, family, trace)

"""Minimum-norm least squares for the boundary system, without truncation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Expansion:
    """Real coefficients ``d`` (length ``2s``) and the complex pairing ``c_j = d_j + i d_{s+j}``."""

    d: np.ndarray
    residual_norm: float = float("nan")

    @property
    def coefficients(self) -> np.ndarray:
        s = self.d.size // 2
        return self.d[:s] + 1j * self.d[s:]

    @property
    def coeff_norm(self) -> float:
        return float(np.linalg.norm(self.d))

    def to_dict(self) -> dict:
        return {"d": self.d.tolist(), "coeff_norm": self.coeff_norm, "residual": self.residual_norm}

    @classmethod
    def from_dict(cls, data: dict) -> "Expansion":
        return cls(np.asarray(data["d"], dtype=float), float(data.get("residual", float("nan"))))


@dataclass(frozen=True)
class SolveDiagnostics:
    singular_values: np.ndarray = field(repr=False)
    rank_estimate: int
    residual_norm: float
    coeff_norm: float

    @property
    def condition(self) -> float:
        s = self.singular_values
        return float(s[0] / s[-1]) if s.size and s[-1] > 0 else float("inf")

    def summary(self) -> dict:
        s = self.singular_values
        return {
            "sigma_max": float(s[0]) if s.size else 0.0,
            "sigma_min": float(s[-1]) if s.size else 0.0,
            "condition": self.condition,
            "rank_estimate": self.rank_estimate,
            "residual": self.residual_norm,
            "coeff_norm": self.coeff_norm,
        }


def min_norm_lstsq(matrix, rhs):
    """Least-squares solution of minimum 2-norm via the SVD.

    Every singular value above the underflow threshold is inverted; there
    is no relative rank cut-off.  Returns ``(d, singular_values)``.
    """
    a = np.asarray(matrix, dtype=float)
    b = np.asarray(rhs, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("matrix must be a nonempty 2-D array")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("matrix and right-hand side must be finite")
    try:
        u, s, vt = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.warning("gesdd did not converge; retrying with gesvd")
        u, s, vt = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
    floor = np.finfo(float).tiny
    inv = np.zeros_like(s)
    nz = s > floor
    inv[nz] = 1.0 / s[nz]
    d = vt.T @ (inv * (u.T @ b))
    return d, s


def min_norm_solve(system) -> tuple[Expansion, SolveDiagnostics]:
    """Solve ``system.matrix d = system.rhs`` in the minimum-norm least-squares sense.

    ``system`` is a :class:`~wmfs.assembly.BoundarySystem` or a ``(A, b)`` pair.
    """
    if isinstance(system, tuple):
        a, b = system
    else:
        a, b = system.matrix, system.rhs
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d, s = min_norm_lstsq(a, b)
    residual = float(np.linalg.norm(a @ d - b))
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    diag = SolveDiagnostics(s, rank, residual, float(np.linalg.norm(d)))
    logger.debug("min-norm solve %s: rank %d, residual %.3e", a.shape, rank, residual)
    return Expansion(d, residual), diag


def coefficient_norm_sweep(configs, solve_one=None):
    """Run a list of experiment configs and tabulate coefficient growth.

    Each row is ``(s_N, ||d||_2, residual, sigma_max/sigma_min)``; failures
    are logged and produce a row of NaNs so the sweep continues.
    """
    if solve_one is None:
        from .experiment import solve_config as solve_one
    rows = []
    for cfg in configs:
        try:
            system, expansion, diag = solve_one(cfg)
            rows.append((system.family.size, expansion.coeff_norm, diag.residual_norm, diag.condition))
        except Exception as exc:  # noqa: BLE001 - sweep keeps going
            logger.warning("sweep point failed: %s", exc)
            rows.append((float("nan"),) * 4)
    return rows

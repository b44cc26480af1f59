"""Named test solutions and boundary data used by the experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import integrate_curve

P_SINGULAR = -1.0 - 0.1j


def f1(z):
    """Entire solution ``exp(z/3 - i z/10) sin(z/3)``."""
    z = np.asarray(z, dtype=complex)
    return np.exp(z / 3 - 1j * z / 10) * np.sin(z / 3)


def u1(z):
    """Potential whose conjugate gradient is :func:`f1`."""
    z = np.asarray(z, dtype=complex)
    a = 1.0 / 3 + 7j / 30
    b = 1.0 / 3 - 13j / 30
    return np.real(15 / (10j - 7) * np.exp(a * z) - 15 / (10j + 13) * np.exp(b * z))


def f2(z):
    """``sqrt(z - p)`` (principal branch) with ``p = -1 - i/10`` on the square."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - P_SINGULAR)


def h3(z):
    """Smooth non-analytic field ``x y^2 sin y - i sin(x^3) cos(x y)``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    return x * y**2 * np.sin(y) - 1j * np.sin(x**3) * np.cos(x * y)


def neumann_trace(f: Callable) -> Callable:
    """Boundary datum ``g(w, nu) = Re(nu f(w))``."""

    def g(w, nu):
        return np.real(nu * f(w))

    return g


@dataclass
class DataSpec:
    name: str
    g: Callable
    f: Optional[Callable] = None
    u: Optional[Callable] = None
    singular_points: tuple = ()
    constant: float = 0.0
    extras: dict = field(default_factory=dict)


def builtin_data(name: str, curve=None) -> DataSpec:
    """Look up ``f1``, ``f2``, ``u1`` or ``g3``.

    ``g3`` is ``Re(nu h3) - c`` with ``c`` chosen so the datum has zero
    mean over ``curve`` (required argument in that case).
    """
    if name in ("f1", "u1"):
        return DataSpec(name, neumann_trace(f1), f=f1, u=u1)
    if name == "f2":
        return DataSpec(name, neumann_trace(f2), f=f2, singular_points=(P_SINGULAR,))
    if name == "g3":
        if curve is None:
            raise ValueError("g3 needs the curve to fix its mean-zero constant")
        raw = neumann_trace(h3)
        c = integrate_curve(curve, raw) / integrate_curve(curve, lambda w, nu: np.ones_like(w.real))

        def g(w, nu):
            return raw(w, nu) - c

        return DataSpec(name, g, constant=c)
    raise ValueError(f"unknown data name {name!r}; expected f1, f2, u1 or g3")

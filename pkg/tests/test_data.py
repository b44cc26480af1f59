import cmath

import numpy as np
import pytest

from wmfs.data import P_SINGULAR, builtin_data, f1, f2, h3, u1
from wmfs.quadrature import integrate_curve


def test_f1_at_origin():
    assert f1(0.0) == 0


def test_f2_principal_branch():
    v = complex(f2(0.0))
    assert v * v == pytest.approx(1 + 0.1j, abs=1e-15)
    assert v.real > 0
    assert v == pytest.approx(cmath.sqrt(1 + 0.1j))


def test_u1_is_potential_of_f1(rng):
    # f = u_x - i u_y
    z = rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20)
    h = 1e-5
    ux = (u1(z + h) - u1(z - h)) / (2 * h)
    uy = (u1(z + 1j * h) - u1(z - 1j * h)) / (2 * h)
    assert np.allclose(ux - 1j * uy, f1(z), atol=1e-9)


def test_h3_values():
    assert h3(0.0) == 0
    z = 1.0 + 2.0j
    assert complex(h3(z)) == pytest.approx(4 * np.sin(2) - 1j * np.sin(1) * np.cos(2))


def test_g3_has_zero_mean(square):
    spec = builtin_data("g3", square)
    assert abs(integrate_curve(square, spec.g)) < 1e-10
    assert spec.f is None
    assert spec.constant != 0


def test_builtin_lookup(square):
    assert builtin_data("f2").singular_points == (P_SINGULAR,)
    assert builtin_data("u1").u is u1
    with pytest.raises(ValueError):
        builtin_data("g3")
    with pytest.raises(ValueError):
        builtin_data("f9")

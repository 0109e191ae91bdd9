"""The hand-written polynomial coefficients agree with a symbolic expansion."""

from __future__ import annotations

import math
import sys

import numpy as np
import pytest

from conftest import ROOT

sp = pytest.importorskip("sympy")
sys.path.insert(0, str(ROOT / "tools"))

import derive_coefficients as dc  # noqa: E402

from bvrgame.attack import coop_quartic, solo_sextic  # noqa: E402
from bvrgame.geometry import BisectorLine  # noqa: E402
from bvrgame.retreat import retreat_quartic  # noqa: E402


def _factor(derived, closed) -> float:
    """Least-squares k with derived ~ k * closed, checked coefficient by coefficient."""
    d = np.asarray(derived, dtype=float)
    c = np.zeros_like(d)
    c[: len(closed)] = closed
    k = float(d @ c / (c @ c))
    scale = np.abs(d).max()
    assert np.allclose(d, k * c, rtol=1e-9, atol=1e-10 * scale)
    return k


def test_coop_quartic_matches_symbolic():
    f = dc.coop_coefficients()
    rng = np.random.default_rng(11)
    for _ in range(50):
        m, n = rng.uniform(-3, 3, 2)
        x1 = rng.uniform(0.5, 20)
        beta = rng.uniform(0.1, 0.95)
        rho = rng.uniform(0.5, 10)
        k = _factor(f(m, n, x1, beta, rho), coop_quartic(x1, BisectorLine(m, n), beta, rho).coefficients)
        assert k == pytest.approx(1.0, rel=1e-9)


def test_solo_sextic_matches_symbolic():
    f = dc.solo_coefficients()
    rng = np.random.default_rng(12)
    for _ in range(50):
        x1 = rng.uniform(0.5, 20)
        beta = rng.uniform(0.1, 0.95)
        rho = rng.uniform(0.5, 10)
        d_s = rng.uniform(1, 40)
        phi = rng.uniform(-math.pi, math.pi)
        k = _factor(f(x1, beta, rho, d_s, math.cos(phi)), solo_sextic(x1, beta, rho, d_s, phi).coefficients)
        assert k == pytest.approx(1.0, rel=1e-9)


def test_retreat_quartic_matches_symbolic():
    f = dc.retreat_coefficients()
    rng = np.random.default_rng(13)
    for _ in range(50):
        alpha = rng.uniform(0, 0.95)
        x_m = rng.uniform(-10, 10)
        y_B = rng.uniform(-10, 10)
        d_m = rng.uniform(0.1, 15)
        phi = rng.uniform(-math.pi, math.pi)
        poly = retreat_quartic(alpha, x_m, y_B, d_m, math.cos(phi), math.sin(phi))
        k = _factor(f(alpha, x_m, y_B, d_m, math.cos(phi)), poly.coefficients)
        assert k == pytest.approx(1.0, rel=1e-9)


def test_retreat_closed_form_is_exact_symbolically():
    assert dc.proportionality(dc.derive_retreat(), dc.closed_form_retreat()) == 1

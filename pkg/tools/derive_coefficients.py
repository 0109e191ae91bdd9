"""Symbolic derivation of the three strategy polynomials.

Each polynomial is obtained by expanding a squared geometric relation:

* cooperative quartic: a point of the bisector y = m x + n lies on the inner
  oval of R1 = (x1, 0): (b|P|^2 - 2 x1 x - eta)^2 = 4 beta^2 rho^2 |P|^2
* solo sextic: stationarity of the distance to the asset along the oval,
  s_phi (2 x1^2 r - G u) = (x1 r / d_s - u c_phi) sqrt(4 x1^2 r^2 - G^2)
* retreat quartic: stationarity of |A_f - B_f|^2 along the bisector x = x_m,
  ((1 + a^2) y - y_B) sqrt(x_m^2 + y^2) = a (2 c y^2 - (d_m + y_m c) y + x_m^2 c)

Running the script prints the expanded coefficients and checks them against
the closed forms used in ``bvrgame``.  The test suite imports the
``*_coefficients`` helpers to compare numerically with the solver code.
"""

from __future__ import annotations

import sympy as sp

x, y, r = sp.symbols("x y r", real=True)
m, n, x1, beta, rho = sp.symbols("m n x1 beta rho", real=True)
d_s, c_phi, s_phi = sp.symbols("d_s c_phi s_phi", real=True)
alpha, x_m, y_B, d_m = sp.symbols("alpha x_m y_B d_m", real=True)


def derive_coop() -> list[sp.Expr]:
    """Ascending coefficients in x of the cooperative quartic."""
    b = 1 - beta**2
    eta = rho**2 - x1**2
    Y = m * x + n
    S = x**2 + Y**2
    expr = sp.expand((b * S - 2 * x1 * x - eta) ** 2 - 4 * beta**2 * rho**2 * S)
    return list(reversed(sp.Poly(expr, x).all_coeffs()))


def derive_solo() -> list[sp.Expr]:
    """Ascending coefficients in r of the solo sextic (with s_phi^2 = 1 - c_phi^2)."""
    rhat = beta * r + rho
    G = r**2 - rhat**2 + x1**2
    u = r - beta * rhat
    lhs = s_phi * (2 * x1**2 * r - G * u)
    rhs = x1 / d_s * r - u * c_phi
    expr = sp.expand((lhs**2 - rhs**2 * (4 * x1**2 * r**2 - G**2)).subs(s_phi**2, 1 - c_phi**2))
    return list(reversed(sp.Poly(expr, r).all_coeffs()))


def derive_retreat() -> list[sp.Expr]:
    """Ascending coefficients in y of the retreat quartic (sign chosen so the leading term is c4)."""
    y_m = y_B - d_m * c_phi
    L = d_m + y_m * c_phi
    expr = sp.expand(
        alpha**2 * (2 * c_phi * y**2 - L * y + x_m**2 * c_phi) ** 2
        - ((1 + alpha**2) * y - y_B) ** 2 * (x_m**2 + y**2)
    )
    return list(reversed(sp.Poly(expr, y).all_coeffs()))


def closed_form_coop() -> list[sp.Expr]:
    b = 1 - beta**2
    eta = rho**2 - x1**2
    bb = beta**2 * rho**2
    k3 = b * (1 + m**2) * (b * m * n - x1)
    k2 = b**2 * n**2 * (3 * m**2 + 1) / 2 - b * (2 * m * n * x1 + eta * (1 + m**2) / 2) + x1**2 - bb * (1 + m**2)
    k1 = b**2 * m * n**3 - b * n * (n * x1 + m * eta) + x1 * eta - 2 * bb * m * n
    k0 = (b * n**2 - eta) ** 2 - (2 * beta * rho * n) ** 2
    return [k0, 4 * k1, 4 * k2, 4 * k3, b**2 * (1 + m**2) ** 2]


def closed_form_solo() -> list[sp.Expr]:
    b = 1 - beta**2
    eta = rho**2 - x1**2
    q = x1 / d_s
    p = b * c_phi
    s2 = 1 - c_phi**2
    br = beta * rho
    k1 = 4 * br * (eta * (br**2 - x1**2 * s2) + sp.Rational(1, 2) * eta**2 * (q * c_phi - b))
    k2 = (
        2 * br**2 * (2 * br**2 - 2 * x1**2 * (1 + s2) + eta * (4 * q * c_phi - 5 * b))
        + eta**2 * (b**2 + q * (q - 2 * p))
        + 4 * x1**2 * s2 * (x1**2 + b * eta)
    )
    k3 = 4 * br * (br**2 * (2 * q * c_phi - 3 * b) + b * eta * (2 * b - 3 * q * c_phi) + x1**2 * (eta / d_s**2 + b * (2 + s2) - 2 * q * c_phi))
    k4 = br**2 * (13 * b**2 + 4 * q * (q - 4 * p)) - 2 * (b * eta + 2 * x1**2) * (b**2 + q * (q - 2 * p))
    k5 = -2 * b * br * (3 * b**2 + q * (2 * q - 5 * p))
    k6 = b**2 * (b**2 + q * (q - 2 * p))
    return [(br * eta) ** 2, k1, k2, k3, k4, k5, k6]


def closed_form_retreat() -> list[sp.Expr]:
    a2 = alpha**2
    c = c_phi
    s2 = 1 - c**2
    y_m = y_B - d_m * c
    c4 = (2 * alpha * c) ** 2 - (1 + a2) ** 2
    c3 = y_B + a2 * ((1 - 2 * c**2) * y_m - d_m * c)
    c2 = a2 * ((d_m + y_m * c) ** 2 + (2 * x_m * c) ** 2) - y_B**2 - x_m**2 * (1 + a2) ** 2
    c1 = y_B * x_m**2 + a2 * x_m**2 * y_m * s2
    c0 = (alpha * x_m**2 * c) ** 2 - x_m**2 * y_B**2
    return [c0, 2 * c1, c2, 2 * c3, c4]


def proportionality(derived: list[sp.Expr], closed: list[sp.Expr]) -> sp.Expr:
    """Constant k with derived = k * closed, or raise if none exists."""
    k = sp.simplify(derived[0] / closed[0])
    for i, (d, c) in enumerate(zip(derived, closed)):
        if sp.simplify(sp.expand(d - k * c)) != 0:
            raise AssertionError(f"coefficient {i} differs from the closed form")
    return k


COOP_SYMBOLS = (m, n, x1, beta, rho)
SOLO_SYMBOLS = (x1, beta, rho, d_s, c_phi)
RETREAT_SYMBOLS = (alpha, x_m, y_B, d_m, c_phi)


def coop_coefficients():
    return sp.lambdify(COOP_SYMBOLS, derive_coop(), "math")


def solo_coefficients():
    return sp.lambdify(SOLO_SYMBOLS, derive_solo(), "math")


def retreat_coefficients():
    return sp.lambdify(RETREAT_SYMBOLS, derive_retreat(), "math")


def main() -> None:
    for name, derive, closed in (
        ("cooperative quartic", derive_coop, closed_form_coop),
        ("solo sextic", derive_solo, closed_form_solo),
        ("retreat quartic", derive_retreat, closed_form_retreat),
    ):
        coeffs = derive()
        print(f"== {name} (ascending powers)")
        for i, c in enumerate(coeffs):
            print(f"  [{i}] {sp.factor(c)}")
        k = proportionality(coeffs, closed())
        print(f"  matches the closed form up to the factor {k}")


if __name__ == "__main__":
    main()

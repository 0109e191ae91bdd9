"""Brute-force reference solutions that share no code with the solvers."""

from __future__ import annotations

import math

import numpy as np


def grid_sign_change_roots(coeffs_asc, lo, hi, n=1_000_000):
    """Roots of a polynomial by sign changes on a dense grid, refined by bisection."""
    c = np.asarray(coeffs_asc, dtype=float)
    xs = np.linspace(lo, hi, n)
    v = np.polynomial.polynomial.polyval(xs, c)
    idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
    out = []
    for i in idx:
        a, b = xs[i], xs[i + 1]
        fa = np.polynomial.polynomial.polyval(a, c)
        for _ in range(80):
            mid = 0.5 * (a + b)
            fm = np.polynomial.polynomial.polyval(mid, c)
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        out.append(0.5 * (a + b))
    out += [float(x) for x in xs[v == 0.0]]
    return sorted(out)


def _ray_radius(B, R, beta, rho, ux, uy):
    """Distance along unit rays from B to the capture boundary of R.

    On the ray P = B + t u the capture relation |P - R| = rho + beta t squares
    to a quadratic with a < 0 < c, hence exactly one positive root.
    """
    dx, dy = B[0] - R[0], B[1] - R[1]
    a = 1.0 - beta * beta
    bq = 2.0 * (ux * dx + uy * dy - beta * rho)
    c = dx * dx + dy * dy - rho * rho
    return 2.0 * c / (-bq + np.sqrt(bq * bq - 4.0 * a * c))


def attack_value_oracle(B, R1, R2, Rs, beta, rho, n=100_000, refine=2_000):
    """Minimum distance from Rs to the attacker's dominance region by dense ray sweep."""
    margins = [math.hypot(Rs[0] - R[0], Rs[1] - R[1]) - rho - beta * math.hypot(Rs[0] - B[0], Rs[1] - B[1]) for R in (R1, R2)]
    if min(margins) >= 0.0:
        return 0.0

    def boundary(th):
        ux, uy = np.cos(th), np.sin(th)
        t = np.minimum(_ray_radius(B, R1, beta, rho, ux, uy), _ray_radius(B, R2, beta, rho, ux, uy))
        return np.hypot(B[0] + t * ux - Rs[0], B[1] + t * uy - Rs[1])

    th = np.linspace(-math.pi, math.pi, n, endpoint=False)
    d = boundary(th)
    k = int(np.argmin(d))
    h = 2 * math.pi / n
    fine = np.linspace(th[k] - 2 * h, th[k] + 2 * h, refine)
    return float(min(d[k], boundary(fine).min()))


def retreat_value_oracle(A, D, B, alpha, theta_B, n=100_000):
    """Minimum terminal separation over interception points on the A-D bisector (1-D grid)."""
    A, D, B = (np.asarray(p, dtype=float) for p in (A, D, B))
    M = 0.5 * (A + D)
    u = (A - D) / np.linalg.norm(A - D)
    nrm = np.array([-u[1], u[0]])
    proj = float(np.dot(B - M, nrm))

    def sep(s):
        Ix = M[0] + s * nrm[0]
        Iy = M[1] + s * nrm[1]
        t = np.hypot(Ix - D[0], Iy - D[1])  # defender path length = time at unit missile speed
        bx = B[0] + alpha * t * math.cos(theta_B)
        by = B[1] + alpha * t * math.sin(theta_B)
        return np.hypot(Ix - bx, Iy - by)

    # sep(s) >= (1 - alpha)|s - proj| - alpha (|proj| + |M - D|), so nothing beyond
    # this span can beat the value at s = proj
    reach = alpha * (abs(proj) + 0.5 * np.linalg.norm(A - D))
    span = (float(sep(np.array([proj]))[0]) + reach) / (1.0 - alpha) + 1.0
    s = np.linspace(proj - span, proj + span, n)
    v = sep(s)
    k = int(np.argmin(v))
    h = s[1] - s[0]
    fine = np.linspace(s[k] - 2 * h, s[k] + 2 * h, 4001)
    return float(min(v[k], sep(fine).min()))


def random_attack_scenario(rng, behind: bool = False):
    """Admissible attack scenario with B at the origin.

    ``behind`` places Rs behind the interceptors as seen from B, the usual
    defensive geometry; otherwise all three red agents are scattered freely.
    """
    from bvrgame.attack import AttackScenario

    while True:
        beta = rng.uniform(1.05, 2.0)
        if behind:
            d = rng.uniform(10.0, 30.0)
            Rs = (d, 0.0)
            R1 = (rng.uniform(0.4, 0.8) * d, rng.uniform(0.5, 8.0))
            R2 = (rng.uniform(0.4, 0.8) * d, -rng.uniform(0.5, 8.0))
        else:
            Rs = tuple(rng.uniform(-20, 20, 2))
            R1 = tuple(rng.uniform(-20, 20, 2))
            R2 = tuple(rng.uniform(-20, 20, 2))
        dmin = min(math.hypot(*R1), math.hypot(*R2))
        if dmin < 1.0 or math.hypot(R1[0] - R2[0], R1[1] - R2[1]) < 0.5:
            continue
        rho = rng.uniform(0.1, 0.7) * dmin
        rho_s = rng.uniform(0.1, 0.5) * math.hypot(*Rs)
        if math.hypot(*Rs) <= rho_s or rho_s <= 0.0:
            continue
        return AttackScenario((0.0, 0.0), R1, R2, Rs, beta, rho, rho_s)


def random_pair_game(rng):
    """Random feasible (pair, B, theta_B) with B's path crossing the bisector inside the chord."""
    from bvrgame.errors import NoFeasibleHeading
    from bvrgame.retreat import MissilePair, feasible_band

    while True:
        alpha = rng.uniform(0.05, 0.95)
        D = tuple(rng.uniform(-10, 10, 2))
        A = tuple(rng.uniform(-10, 10, 2))
        B = tuple(rng.uniform(-10, 10, 2))
        if math.hypot(A[0] - D[0], A[1] - D[1]) < 0.5 or math.hypot(A[0] - B[0], A[1] - B[1]) < 0.5:
            continue
        pair = MissilePair(A, D, alpha)
        try:
            band = feasible_band(pair, B)
        except NoFeasibleHeading:
            continue
        chord = [a for a in band.arcs if a.kind == "chord" and a.width > 1e-3]
        if not chord:
            continue
        a = chord[0]
        theta = a.lo + rng.uniform(0.02, 0.98) * a.width
        return pair, B, theta

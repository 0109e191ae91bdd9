"""Attack stage: two interceptors block a slower attacker short of the asset.

Geometry is worked in the frame centred on the attacker B with interceptor
R1 on the positive x axis.  Each interceptor's capture boundary is the inner
branch of a Cartesian oval; the attacker's dominance region is the
intersection of both oval interiors, and the attacker aims at the point of
that region closest to the asset Rs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy.polynomial.polynomial as npoly

from .errors import DegenerateInput, NoIntersection, NoStationaryPoint, VerticalBisector
from .geometry import (
    BisectorLine,
    CartesianOval,
    Point2,
    RelativeFrame,
    as_point,
    attack_relative_frame,
    bisector,
    heading_to,
    oval_radius_bounds,
)
from .rootfind import RealPolynomial, real_roots

log = logging.getLogger(__name__)

# relative tolerances, all scaled by the interceptor offset x1'
OVAL_FILTER_TOL = 1e-6
MEMBERSHIP_TOL = 1e-9
STATIONARITY_TOL = 1e-6
# beyond this slope the bisector is parametrised by arc length instead of x
STEEP_SLOPE = 1e3


class Mode(str, Enum):
    COOPERATIVE = "Cooperative"
    SOLO1 = "Solo1"
    SOLO2 = "Solo2"
    BISECTOR_RESTRICTED = "BisectorRestricted"
    UNOPPOSED = "Unopposed"


class Winner(str, Enum):
    RED = "Red"
    BLUE = "Blue"


@dataclass(frozen=True)
class AttackScenario:
    B: Point2
    R1: Point2
    R2: Point2
    Rs: Point2
    beta: float
    rho: float
    rho_s: float

    def __post_init__(self):
        for name in ("B", "R1", "R2", "Rs"):
            object.__setattr__(self, name, as_point(getattr(self, name)))
        if not self.beta > 1.0:
            raise DegenerateInput(f"beta must exceed 1, got {self.beta}")
        if not (self.rho > 0.0 and self.rho_s > 0.0):
            raise DegenerateInput("engagement ranges must be positive")

    def moved(self, B=None, R1=None, R2=None) -> "AttackScenario":
        return AttackScenario(
            B if B is not None else self.B,
            R1 if R1 is not None else self.R1,
            R2 if R2 is not None else self.R2,
            self.Rs,
            self.beta,
            self.rho,
            self.rho_s,
        )

    def in_dominance_region(self, p, tol: float | None = None) -> bool:
        """True if B reaches ``p`` no later than either interceptor closes to rho."""
        if tol is None:
            tol = MEMBERSHIP_TOL * max(self.B.dist(self.R1), self.B.dist(self.R2))
        dB = self.B.dist(p)
        return all(R.dist(p) - self.rho - self.beta * dB >= -tol for R in (self.R1, self.R2))


@dataclass(frozen=True)
class AttackSolution:
    mode: Mode
    aimpoint: Point2
    theta_B: float
    theta_1: float
    theta_2: float
    value: float
    winner: Winner
    solo_values: tuple[float, float] | None = field(default=None, compare=False)

    def heading(self, agent: str) -> float:
        return {"B": self.theta_B, "R1": self.theta_1, "R2": self.theta_2}[agent]


def _finish(sc: AttackScenario, mode: Mode, aim: Point2, solo_values=None) -> AttackSolution:
    value = aim.dist(sc.Rs)
    return AttackSolution(
        mode=mode,
        aimpoint=aim,
        theta_B=heading_to(sc.B, aim),
        theta_1=heading_to(sc.R1, aim),
        theta_2=heading_to(sc.R2, aim),
        value=value,
        winner=Winner.BLUE if value <= sc.rho_s else Winner.RED,
        solo_values=solo_values,
    )


# ---------------------------------------------------------------- cooperative


def coop_quartic(x1: float, line: BisectorLine, beta: float, rho: float) -> RealPolynomial:
    """Quartic in x whose roots are where y = m x + n meets the (squared) oval of R1."""
    m, n = line.slope, line.intercept
    b = 1.0 - beta * beta
    eta = rho * rho - x1 * x1
    bb = beta * beta * rho * rho
    k3 = b * (1 + m * m) * (b * m * n - x1)
    k2 = b * b * n * n * (3 * m * m + 1) / 2 - b * (2 * m * n * x1 + eta * (1 + m * m) / 2) + x1 * x1 - bb * (1 + m * m)
    k1 = b * b * m * n**3 - b * n * (n * x1 + m * eta) + x1 * eta - 2 * bb * m * n
    k0 = (b * n * n - eta) ** 2 - (2 * beta * rho * n) ** 2
    return RealPolynomial([k0, 4 * k1, 4 * k2, 4 * k3, b * b * (1 + m * m) ** 2])


def line_oval_quartic(x1: float, beta: float, rho: float, p0, d) -> RealPolynomial:
    """Quartic in t for the parametrised line p0 + t d against the squared oval of R1.

    Used for steep or vertical bisectors where the slope form is ill-conditioned.
    """
    b = 1.0 - beta * beta
    eta = rho * rho - x1 * x1
    X = [p0[0], d[0]]
    Y = [p0[1], d[1]]
    S = npoly.polyadd(npoly.polymul(X, X), npoly.polymul(Y, Y))
    inner = npoly.polysub(npoly.polysub(b * S, npoly.polymul([2 * x1], X)), [eta])
    poly = npoly.polysub(npoly.polymul(inner, inner), 4 * beta * beta * rho * rho * S)
    return RealPolynomial(list(poly))


def _oval_defect(x1: float, beta: float, rho: float, p) -> float:
    """O(x): capture relation of R1 evaluated at p."""
    return math.hypot(p[0] - x1, p[1]) - beta * math.hypot(p[0], p[1]) - rho


def coop_intersections(x1: float, R2p, beta: float, rho: float) -> list[Point2]:
    """Crossings of the two inner ovals, in the relative frame.

    Raises NoIntersection when the inner ovals do not meet.
    """
    oval = CartesianOval(x1, beta, rho)
    _, r_hi = oval_radius_bounds(oval)
    reach = 1.01 * r_hi + 1e-9
    x2, y2 = R2p
    try:
        line = bisector((x1, 0.0), R2p)
        steep = abs(line.slope) > STEEP_SLOPE
    except VerticalBisector:
        line, steep = None, True
    if not steep:
        poly = coop_quartic(x1, line, beta, rho)
        params = real_roots(poly, -reach, reach).roots
        pts = [Point2(x, line.y(x)) for x in params]
    else:
        mid = Point2(0.5 * (x1 + x2), 0.5 * y2)
        seg = math.hypot(x2 - x1, y2)
        d = Point2(-y2 / seg, (x2 - x1) / seg)
        along = mid.x * d.x + mid.y * d.y
        foot = Point2(mid.x - along * d.x, mid.y - along * d.y)
        poly = line_oval_quartic(x1, beta, rho, foot, d)
        params = real_roots(poly, -reach, reach).roots
        pts = [Point2(foot.x + t * d.x, foot.y + t * d.y) for t in params]
    tol = OVAL_FILTER_TOL * x1
    out: list[Point2] = []
    for p in pts:
        if abs(_oval_defect(x1, beta, rho, p)) > tol:
            continue  # outer-oval or sign-spurious root
        o2 = math.hypot(p.x - x2, p.y - y2) - beta * math.hypot(p.x, p.y) - rho
        if abs(o2) > tol:
            continue
        if all(p.dist(q) > 1e-7 * x1 for q in out):
            out.append(p)
    if not out:
        raise NoIntersection("inner ovals of R1 and R2 do not intersect")
    return out


def _pick_closest(points, target) -> Point2:
    best = min(points, key=lambda p: (round(p.dist(target), 12), p.x, p.y))
    ties = [p for p in points if abs(p.dist(target) - best.dist(target)) <= 1e-12 * max(1.0, best.dist(target))]
    if len(ties) > 1:
        log.info("equal-cost cooperative aimpoints %s; taking the lexicographically smaller", ties)
        best = min(ties)
    return best


def solve_cooperative(sc: AttackScenario) -> AttackSolution:
    frame, x1, R2p, Rsp = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs)
    pts = coop_intersections(x1, R2p, sc.beta, sc.rho)
    rel = _pick_closest(pts, Rsp)
    return _finish(sc, Mode.COOPERATIVE, frame.to_fixed(rel))


# ---------------------------------------------------------------------- solo


def solo_sextic(x1: float, beta: float, rho: float, d_s: float, phi: float) -> RealPolynomial:
    """Sextic in r whose roots include the stationary radii of the solo cost.

    ``phi`` is the line-of-sight angle to the asset in the relative frame; only
    cos(phi) and sin(phi)**2 enter.
    """
    b = 1.0 - beta * beta
    eta = rho * rho - x1 * x1
    c = math.cos(phi)
    s2 = math.sin(phi) ** 2
    q = x1 / d_s
    p = b * c
    br = beta * rho
    br2 = br * br
    k1 = 4 * br * (eta * (br2 - x1 * x1 * s2) + 0.5 * eta * eta * (q * c - b))
    k2 = (
        2 * br2 * (2 * br2 - 2 * x1 * x1 * (1 + s2) + eta * (4 * q * c - 5 * b))
        + eta * eta * (b * b + q * (q - 2 * p))
        + 4 * x1 * x1 * s2 * (x1 * x1 + b * eta)
    )
    k3 = 4 * br * (
        br2 * (2 * q * c - 3 * b) + b * eta * (2 * b - 3 * q * c) + x1 * x1 * (eta / d_s**2 + b * (2 + s2) - 2 * q * c)
    )
    k4 = br2 * (13 * b * b + 4 * q * (q - 4 * p)) - 2 * (b * eta + 2 * x1 * x1) * (b * b + q * (q - 2 * p))
    k5 = -2 * b * br * (3 * b * b + q * (2 * q - 5 * p))
    k6 = b * b * (b * b + q * (q - 2 * p))
    return RealPolynomial([(br * eta) ** 2, k1, k2, k3, k4, k5, k6])


def solo_stationarity_residual(x1: float, beta: float, rho: float, d_s: float, phi: float, r: float) -> float:
    """Normalised residual of the un-squared stationarity condition at radius r.

    ``phi`` in [0, pi] (asset mirrored onto the upper half plane).
    """
    c, s = math.cos(phi), math.sin(phi)
    rhat = beta * r + rho
    G = r * r - rhat * rhat + x1 * x1
    S = math.sqrt(max(4 * x1 * x1 * r * r - G * G, 0.0))
    u = r - beta * rhat
    lhs = s * (2 * x1 * x1 * r - G * u)
    rhs = (x1 / d_s * r - u * c) * S
    norm = 2 * x1 * x1 * r + abs(G * u) + (abs(u) + x1 / d_s * r) * S
    return abs(lhs - rhs) / norm if norm > 0 else 0.0


def _oval_point(x1: float, beta: float, rho: float, r: float, zeta: float) -> Point2:
    G = (1 - beta * beta) * r * r - 2 * beta * rho * r - (rho * rho - x1 * x1)
    ct = max(-1.0, min(1.0, G / (2 * x1 * r)))
    st = math.sqrt(max(0.0, 1.0 - ct * ct))
    return Point2(r * ct, zeta * r * st)


def solo_stationary_radii(x1: float, beta: float, rho: float, d_s: float, phi: float) -> list[float]:
    """Sextic roots in [r_lo, r_hi] that satisfy the un-squared stationarity condition."""
    r_lo, r_hi = oval_radius_bounds(CartesianOval(x1, beta, rho))
    roots = real_roots(solo_sextic(x1, beta, rho, d_s, phi), r_lo, r_hi).roots
    keep = [r for r in roots if solo_stationarity_residual(x1, beta, rho, d_s, phi, r) <= STATIONARITY_TOL]
    if not keep:
        raise NoStationaryPoint("no sextic root passes the stationarity filter")
    return keep


def _solo_relative(x1: float, Rsp: Point2, beta: float, rho: float) -> Point2:
    """Closest point to Rsp on the inner oval of R1 = (x1, 0)."""
    oval = CartesianOval(x1, beta, rho)
    if oval.contains(Rsp):
        return Rsp
    d_s = Rsp.norm()
    zeta = -1.0 if Rsp.y < 0.0 else 1.0
    phi = math.atan2(abs(Rsp.y), Rsp.x)
    r_lo, r_hi = oval_radius_bounds(oval)
    cands = [Point2(r_lo, 0.0), Point2(-r_hi, 0.0)]
    try:
        radii = solo_stationary_radii(x1, beta, rho, d_s, phi)
    except NoStationaryPoint:
        log.debug("solo minimum at an oval vertex (phi=%g)", phi)
        radii = []
    cands += [_oval_point(x1, beta, rho, r, zeta) for r in radii]
    return min(cands, key=lambda p: p.dist(Rsp))


def solo_aimpoint(B, R, Rs, beta: float, rho: float) -> Point2:
    B = as_point(B)
    x1 = B.dist(R)
    frame = RelativeFrame(B, heading_to(B, R))
    return frame.to_fixed(_solo_relative(x1, frame.to_relative(Rs), beta, rho))


def solve_solo(sc: AttackScenario, interceptor: int) -> AttackSolution:
    R = {1: sc.R1, 2: sc.R2}[interceptor]
    aim = solo_aimpoint(sc.B, R, sc.Rs, sc.beta, sc.rho)
    return _finish(sc, Mode.SOLO1 if interceptor == 1 else Mode.SOLO2, aim)


# ----------------------------------------------------------------- selection


def select_strategy(sc: AttackScenario) -> AttackSolution:
    """Optimal aimpoint under the three-case rule (cooperative / solo / restricted)."""
    if sc.in_dominance_region(sc.Rs):
        return _finish(sc, Mode.UNOPPOSED, sc.Rs)
    a1 = solo_aimpoint(sc.B, sc.R1, sc.Rs, sc.beta, sc.rho)
    a2 = solo_aimpoint(sc.B, sc.R2, sc.Rs, sc.beta, sc.rho)
    solo_values = (a1.dist(sc.Rs), a2.dist(sc.Rs))
    in1 = sc.in_dominance_region(a1)
    in2 = sc.in_dominance_region(a2)
    if in1 and in2:
        frame, x1, R2p, Rsp = attack_relative_frame(sc.B, sc.R1, sc.R2, sc.Rs)
        try:
            line = bisector((x1, 0.0), R2p)
        except VerticalBisector:
            best = a1 if solo_values[0] <= solo_values[1] else a2
            return _finish(sc, Mode.BISECTOR_RESTRICTED, best, solo_values)
        xs = [frame.to_relative(a).x for a in (a1, a2)]
        x_star = min(xs, key=lambda x: Point2(x, line.y(x)).dist(Rsp))
        aim = frame.to_fixed(Point2(x_star, line.y(x_star)))
        return _finish(sc, Mode.BISECTOR_RESTRICTED, aim, solo_values)
    if in1 != in2:
        return _finish(sc, Mode.SOLO1 if in1 else Mode.SOLO2, a1 if in1 else a2, solo_values)
    try:
        sol = solve_cooperative(sc)
    except NoIntersection:
        # nested ovals should put one solo aimpoint inside; reached only on round-off
        log.warning("ovals disjoint and neither solo aimpoint inside; using the larger solo value")
        i = 0 if solo_values[0] >= solo_values[1] else 1
        return _finish(sc, (Mode.SOLO1, Mode.SOLO2)[i], (a1, a2)[i], solo_values)
    return _finish(sc, Mode.COOPERATIVE, sol.aimpoint, solo_values)

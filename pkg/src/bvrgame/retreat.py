"""Retreat stage: active missile defence of the retreating attacker.

Each attacker missile A is paired with a defender missile D of equal speed.
In the pair's frame D sits at the origin and A at (x_A, 0); the two missiles
meet on the bisector x = x_m = x_A / 2.  The evader B flies a fixed heading
at speed ratio alpha = v_B / v_A and the attacker chooses the bisector point
closest to B's position at the interception instant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    CoincidentAgents,
    EmptyFeasibleSet,
    InfeasibleHeading,
    InvalidSpeedRatio,
    NoFeasibleHeading,
    PathParallelToBisector,
)
from .geometry import TWO_PI, Point2, RelativeFrame, apollonius, as_point, heading_to, wrap_angle
from .rootfind import RealPolynomial, real_roots

log = logging.getLogger(__name__)

STATIONARITY_TOL = 1e-6
ARC_EPS = 1e-12
GRID_POINTS = 721
GOLDEN_TOL = 1e-6


# ------------------------------------------------------------------ arcs


@dataclass(frozen=True)
class Arc:
    """Closed arc of headings from ``lo`` counter-clockwise to ``hi``.

    ``lo`` is wrapped to [-pi, pi); ``hi`` may exceed pi so that lo <= hi.
    """

    lo: float
    hi: float
    kind: str = "chord"

    @classmethod
    def span(cls, lo: float, width: float, kind: str = "chord") -> "Arc":
        lo_w = wrap_angle(lo)
        return cls(lo_w, lo_w + max(0.0, min(width, TWO_PI)), kind)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, theta: float, eps: float = ARC_EPS) -> bool:
        d = (theta - self.lo) % TWO_PI
        return d <= self.width + eps or d >= TWO_PI - eps

    def unwrap(self, theta: float) -> float:
        """Representative of ``theta`` closest to the arc's branch."""
        d = (theta - self.lo) % TWO_PI
        if d > self.width + 0.5 * (TWO_PI - self.width):
            d -= TWO_PI
        return self.lo + d


def intersect_arcs(a: Sequence[Arc], b: Sequence[Arc]) -> list[Arc]:
    out: list[Arc] = []
    for x in a:
        for y in b:
            for k in (-1, 0, 1):
                lo = max(x.lo, y.lo + k * TWO_PI)
                hi = min(x.hi, y.hi + k * TWO_PI)
                if lo <= hi + ARC_EPS:
                    kind = x.kind if x.kind == y.kind else f"{x.kind}&{y.kind}"
                    arc = Arc.span(lo, max(hi - lo, 0.0), kind)
                    if not any(abs(wrap_angle(arc.lo - o.lo)) < 1e-12 and abs(arc.width - o.width) < 1e-12 for o in out):
                        out.append(arc)
    return sorted(out, key=lambda r: r.lo)


# ----------------------------------------------------------------- types


@dataclass(frozen=True)
class MissilePair:
    A: Point2
    D: Point2
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "A", as_point(self.A))
        object.__setattr__(self, "D", as_point(self.D))
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidSpeedRatio(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.A == self.D:
            raise CoincidentAgents("attacker and defender missiles coincide")

    def frame(self) -> tuple[RelativeFrame, float]:
        return RelativeFrame(self.D, heading_to(self.D, self.A)), self.D.dist(self.A)


@dataclass(frozen=True)
class FeasibleBand:
    """Headings of B for which D intercepts A before A reaches B.

    ``arcs`` holds the chord arc (headings crossing the bisector inside the
    Apollonius circle) and, when B already sits on D's side, the escape arc of
    headings that never reach the bisector.
    """

    arcs: tuple[Arc, ...]
    y_low: float | None
    y_high: float | None
    lam_A: float

    def _chord(self) -> Arc:
        for a in self.arcs:
            if a.kind == "chord":
                return a
        raise NoFeasibleHeading("no chord arc: the Apollonius circle misses the bisector")

    @property
    def theta_l(self) -> float:
        return self._chord().lo

    @property
    def theta_u(self) -> float:
        return self._chord().hi

    def contains(self, theta: float, eps: float = ARC_EPS) -> bool:
        return any(a.contains(theta, eps) for a in self.arcs)


@dataclass(frozen=True)
class PairSolution:
    y_star: float
    intercept_point: Point2
    chi_star: float
    psi_star: float
    value: float
    x_m: float
    phi: float
    d_m: float | None
    y_m: float | None


@dataclass(frozen=True)
class RetreatScenario:
    B: Point2
    pair1: MissilePair
    pair2: MissilePair | None
    w: float = 0.5
    constraint: Arc | None = None

    def __post_init__(self):
        object.__setattr__(self, "B", as_point(self.B))
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"weight w must lie in [0, 1], got {self.w}")

    @property
    def pairs(self) -> tuple[MissilePair, ...]:
        return (self.pair1,) if self.pair2 is None else (self.pair1, self.pair2)

    @property
    def weights(self) -> tuple[float, ...]:
        return (1.0,) if self.pair2 is None else (self.w, 1.0 - self.w)


@dataclass(frozen=True)
class HeadingResult:
    theta: float
    value: float
    pair_values: tuple[float, ...]
    constraint_active: bool
    admissible: tuple[Arc, ...]
    bands: tuple[FeasibleBand, ...]


# ---------------------------------------------------------- game of kind


def feasible_band(pair: MissilePair, B) -> FeasibleBand:
    B = as_point(B)
    frame, xA = pair.frame()
    lam = frame.rotation
    Bp = frame.to_relative(B)
    xm = 0.5 * xA
    arcs: list[Arc] = []
    y_lo = y_hi = None
    if Bp.dist((xA, 0.0)) > 0.0:
        circ = apollonius((xA, 0.0), Bp, pair.alpha) if pair.alpha > 0.0 else None
        if circ is not None:
            disc = circ.radius**2 - (xm - circ.center.x) ** 2
            if disc >= -1e-12 * circ.radius**2:
                root = math.sqrt(max(disc, 0.0))
                y_lo, y_hi = circ.center.y - root, circ.center.y + root
                a1 = math.atan2(y_lo - Bp.y, xm - Bp.x)
                a2 = math.atan2(y_hi - Bp.y, xm - Bp.x)
                width = wrap_angle(a2 - a1)
                if width < 0.0:
                    a1, width = a2, -width
                arcs.append(Arc.span(a1 + lam, width, "chord"))
    if Bp.x <= xm:
        arcs.append(Arc.span(0.5 * math.pi + lam, math.pi, "escape"))
    if not arcs:
        raise NoFeasibleHeading("Apollonius circle misses the bisector and B is on the attacker's side")
    return FeasibleBand(tuple(arcs), y_lo, y_hi, lam)


# --------------------------------------------------------- game of degree


def retreat_quartic(alpha: float, x_m: float, yB: float, d_m: float, cos_phi: float, sin_phi: float) -> RealPolynomial:
    """c4 y^4 + 2 c3 y^3 + c2 y^2 + 2 c1 y + c0 for the pair game."""
    a2 = alpha * alpha
    c, s = cos_phi, sin_phi
    y_m = yB - d_m * c
    c4 = (2 * alpha * c) ** 2 - (1 + a2) ** 2
    c3 = yB + a2 * ((1 - 2 * c * c) * y_m - d_m * c)
    c2 = a2 * ((d_m + y_m * c) ** 2 + (2 * x_m * c) ** 2) - yB * yB - x_m * x_m * (1 + a2) ** 2
    c1 = yB * x_m * x_m + a2 * x_m * x_m * y_m * s * s
    c0 = (alpha * x_m * x_m * c) ** 2 - x_m * x_m * yB * yB
    return RealPolynomial([c0, 2 * c1, c2, 2 * c3, c4])


def retreat_stationarity_residual(alpha, x_m, yB, d_m, cos_phi, y) -> float:
    """Normalised un-squared dJ/dy = 0 residual."""
    c = cos_phi
    y_m = yB - d_m * c
    L = d_m + y_m * c
    s = math.hypot(x_m, y)
    lhs = ((1 + alpha * alpha) * y - yB) * s
    rhs = alpha * (2 * c * y * y - L * y + x_m * x_m * c)
    norm = (abs((1 + alpha * alpha) * y) + abs(yB)) * s + alpha * (2 * abs(c) * y * y + abs(L * y) + x_m * x_m * abs(c))
    return abs(lhs - rhs) / norm if norm > 0 else 0.0


def retreat_cost(alpha, x_m, d_m, y_m, cos_phi, y: float) -> float:
    """Squared terminal separation |A_f - B_f|^2 for interception at (x_m, y)."""
    bmbf = d_m + alpha * math.hypot(x_m, y)
    return bmbf * bmbf + (y - y_m) ** 2 - 2 * (y - y_m) * bmbf * cos_phi


def direct_cost(alpha: float, x_m: float, Bp, theta_rel: float, y):
    """Same quantity evaluated from positions; accepts arrays."""
    t = np.hypot(x_m, y)
    bx = Bp[0] + alpha * t * math.cos(theta_rel)
    by = Bp[1] + alpha * t * math.sin(theta_rel)
    return (x_m - bx) ** 2 + (y - by) ** 2


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _minimize_direct(alpha, x_m, Bp, theta_rel, n: int = 20001) -> float:
    span = 4.0 * (abs(Bp[0]) + abs(Bp[1]) + x_m) + 1.0
    ys = np.linspace(Bp[1] - span, Bp[1] + span, n)
    J = direct_cost(alpha, x_m, Bp, theta_rel, ys)
    k = int(np.argmin(J))
    lo, hi = ys[max(k - 1, 0)], ys[min(k + 1, n - 1)]
    y, _ = golden_section_max(lambda v: -float(direct_cost(alpha, x_m, Bp, theta_rel, v)), lo, hi, 1e-12 * span)
    return y


def pair_game_solve(pair: MissilePair, B, theta_B: float, check: bool = True) -> PairSolution:
    """Optimal interception point and headings of A and D for a fixed evader heading."""
    B = as_point(B)
    frame, xA = pair.frame()
    lam = frame.rotation
    if check and not feasible_band(pair, B).contains(theta_B):
        raise InfeasibleHeading(f"heading {theta_B} is outside the feasible band")
    Bp = frame.to_relative(B)
    xm = 0.5 * xA
    alpha = pair.alpha
    phi = theta_B - 0.5 * math.pi - lam
    c, s = math.cos(phi), math.sin(phi)
    theta_rel = theta_B - lam
    if abs(s) < 1e-12:
        if Bp.x > xm:
            raise PathParallelToBisector("B moves parallel to the bisector on the attacker's side")
        y = _minimize_direct(alpha, xm, Bp, theta_rel)
        J = float(direct_cost(alpha, xm, Bp, theta_rel, y))
        d_m = y_m = None
    else:
        d_m = (xm - Bp.x) / s
        y_m = Bp.y - d_m * c
        poly = retreat_quartic(alpha, xm, Bp.y, d_m, c, s)
        bound = 1.0 + max(abs(k / poly.coefficients[-1]) for k in poly.coefficients[:-1])
        roots = real_roots(poly, -bound, bound).roots
        keep = [r for r in roots if retreat_stationarity_residual(alpha, xm, Bp.y, d_m, c, r) <= STATIONARITY_TOL]
        if keep:
            y = min(keep, key=lambda r: retreat_cost(alpha, xm, d_m, y_m, c, r))
        else:
            log.warning("no quartic root passed the stationarity filter; minimising directly")
            y = _minimize_direct(alpha, xm, Bp, theta_rel)
        J = retreat_cost(alpha, xm, d_m, y_m, c, y)
    I = frame.to_fixed((xm, y))
    return PairSolution(
        y_star=y,
        intercept_point=I,
        chi_star=wrap_angle(math.atan2(y, xm - xA) + lam),
        psi_star=wrap_angle(math.atan2(y, xm) + lam),
        value=math.sqrt(max(J, 0.0)),
        x_m=xm,
        phi=phi,
        d_m=d_m,
        y_m=y_m,
    )


def pair_values_grid(pair: MissilePair, B, thetas: np.ndarray) -> np.ndarray:
    """Vectorised pair-game values for many evader headings (used for grid seeding)."""
    B = as_point(B)
    thetas = np.asarray(thetas, dtype=float)
    frame, xA = pair.frame()
    Bp = frame.to_relative(B)
    xm, yB, alpha = 0.5 * xA, Bp.y, pair.alpha
    a2 = alpha * alpha
    phi = thetas - 0.5 * math.pi - frame.rotation
    c, s = np.cos(phi), np.sin(phi)
    out = np.full(thetas.shape, np.nan)
    ok = np.abs(s) >= 1e-9
    c, s = c[ok], s[ok]
    d_m = (xm - Bp.x) / s
    y_m = yB - d_m * c
    c4 = (2 * alpha * c) ** 2 - (1 + a2) ** 2
    c3 = yB + a2 * ((1 - 2 * c * c) * y_m - d_m * c)
    c2 = a2 * ((d_m + y_m * c) ** 2 + (2 * xm * c) ** 2) - yB * yB - xm * xm * (1 + a2) ** 2
    c1 = yB * xm * xm + a2 * xm * xm * y_m * s * s
    c0 = (alpha * xm * xm * c) ** 2 - xm * xm * yB * yB
    desc = np.stack([c4, 2 * c3, c2, 2 * c1, c0], axis=1)
    comp = np.zeros((len(c4), 4, 4))
    comp[:, 0, :] = -desc[:, 1:] / desc[:, :1]
    comp[:, [1, 2, 3], [0, 1, 2]] = 1.0
    y = np.linalg.eigvals(comp).real
    for _ in range(3):
        p = ((desc[:, :1] * y + desc[:, 1:2]) * y + desc[:, 2:3]) * y
        p = (p + desc[:, 3:4]) * y + desc[:, 4:5]
        dp = ((4 * desc[:, :1] * y + 3 * desc[:, 1:2]) * y + 2 * desc[:, 2:3]) * y + desc[:, 3:4]
        y = np.where(dp != 0.0, y - p / np.where(dp != 0.0, dp, 1.0), y)
    cc, yy = c[:, None], y
    L = d_m[:, None] + y_m[:, None] * cc
    sq = np.hypot(xm, yy)
    lhs = ((1 + a2) * yy - yB) * sq
    rhs = alpha * (2 * cc * yy * yy - L * yy + xm * xm * cc)
    norm = (np.abs((1 + a2) * yy) + abs(yB)) * sq + alpha * (2 * np.abs(cc) * yy * yy + np.abs(L * yy) + xm * xm * np.abs(cc))
    resid = np.abs(lhs - rhs) / np.where(norm > 0, norm, 1.0)
    bm = d_m[:, None] + alpha * sq
    J = bm * bm + (yy - y_m[:, None]) ** 2 - 2 * (yy - y_m[:, None]) * bm * cc
    J = np.where(resid <= STATIONARITY_TOL, J, np.inf).min(axis=1)
    out[ok] = np.sqrt(np.maximum(J, 0.0))
    for k in np.flatnonzero(~np.isfinite(out)):
        try:
            out[k] = pair_game_solve(pair, B, float(thetas[k]), check=False).value
        except PathParallelToBisector:
            out[k] = 0.0
    return out


# ------------------------------------------------------ composite heading


def admissible_arcs(sc: RetreatScenario) -> tuple[list[Arc], tuple[FeasibleBand, ...]]:
    bands = []
    arcs: list[Arc] | None = None
    for pair in sc.pairs:
        try:
            band = feasible_band(pair, sc.B)
        except NoFeasibleHeading as exc:
            raise EmptyFeasibleSet(str(exc), bands) from exc
        bands.append(band)
        arcs = list(band.arcs) if arcs is None else intersect_arcs(arcs, band.arcs)
    if sc.constraint is not None:
        arcs = intersect_arcs(arcs, [sc.constraint])
    return arcs, tuple(bands)


def _composite(sc: RetreatScenario, theta: float) -> tuple[float, tuple[float, ...]]:
    vals = tuple(pair_game_solve(p, sc.B, theta, check=False).value for p in sc.pairs)
    return sum(w * v for w, v in zip(sc.weights, vals)), vals


def composite_cost(sc: RetreatScenario, theta_B: float) -> float:
    arcs, _ = admissible_arcs(sc)
    if not any(a.contains(theta_B, 1e-9) for a in arcs):
        raise InfeasibleHeading(f"heading {theta_B} is not admissible")
    return _composite(sc, theta_B)[0]


def optimize_heading(sc: RetreatScenario, grid: int = GRID_POINTS) -> HeadingResult:
    """Maximise the weighted terminal separation over the admissible headings."""
    arcs, bands = admissible_arcs(sc)
    if not arcs:
        raise EmptyFeasibleSet("feasible bands and heading constraint do not overlap", bands)

    def f(th: float) -> float:
        return _composite(sc, th)[0]

    best_theta, best_val, best_arc = None, -math.inf, None
    for arc in arcs:
        if arc.width <= 0.0:
            cand = [(arc.lo, f(arc.lo))]
        else:
            ths = np.linspace(arc.lo, arc.hi, grid)
            vals = sum(w * pair_values_grid(p, sc.B, ths) for w, p in zip(sc.weights, sc.pairs))
            k = int(np.argmax(vals))
            cand = [(float(ths[k]), vals[k])]
            lo, hi = float(ths[max(k - 1, 0)]), float(ths[min(k + 1, grid - 1)])
            if hi > lo:
                cand.append(golden_section_max(f, lo, hi))
        for th, v in cand:
            if v > best_val:
                best_theta, best_val, best_arc = th, v, arc
    theta = wrap_angle(best_theta)
    active = False
    if sc.constraint is not None:
        for end in (sc.constraint.lo, sc.constraint.hi):
            if abs(wrap_angle(theta - end)) <= 10 * GOLDEN_TOL:
                active = True
                theta = wrap_angle(end)
    # report the heading on the branch of the arc that holds it
    theta = best_arc.unwrap(theta)
    value, pair_values = _composite(sc, theta)
    return HeadingResult(theta, value, pair_values, active, tuple(arcs), bands)

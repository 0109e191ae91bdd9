"""Frames, Cartesian ovals, Apollonius circles and bisectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import (
    CoincidentAgents,
    DegenerateOval,
    InvalidSpeedRatio,
    OutsideOval,
    VerticalBisector,
)

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scaled(self, s: float) -> "Point2":
        return Point2(s * self.x, s * self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])

    def angle(self) -> float:
        return math.atan2(self.y, self.x)


def as_point(p) -> Point2:
    return p if isinstance(p, Point2) else Point2(float(p[0]), float(p[1]))


def wrap_angle(a: float) -> float:
    """Wrap to [-pi, pi)."""
    w = math.fmod(a + math.pi, TWO_PI)
    if w < 0.0:
        w += TWO_PI
    return w - math.pi


def heading_to(src, dst) -> float:
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def unit(angle: float) -> Point2:
    return Point2(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class RelativeFrame:
    """Frame translated to ``origin`` and rotated by ``rotation`` radians."""

    origin: Point2
    rotation: float

    def __post_init__(self):
        object.__setattr__(self, "rotation", wrap_angle(self.rotation))

    def to_relative(self, p) -> Point2:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        dx, dy = p[0] - self.origin.x, p[1] - self.origin.y
        return Point2(c * dx + s * dy, -s * dx + c * dy)

    def to_fixed(self, p) -> Point2:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return Point2(self.origin.x + c * p[0] - s * p[1], self.origin.y + s * p[0] + c * p[1])

    def heading_to_relative(self, theta: float) -> float:
        return wrap_angle(theta - self.rotation)


def to_fixed_heading(theta_rel: float, frame: RelativeFrame) -> float:
    return wrap_angle(theta_rel + frame.rotation)


def attack_relative_frame(B, R1, R2, Rs) -> tuple[RelativeFrame, float, Point2, Point2]:
    """Frame with B at the origin and R1 on the positive x axis.

    Returns ``(frame, x1, R2_rel, Rs_rel)``.
    """
    B = as_point(B)
    x1 = B.dist(R1)
    if x1 == 0.0:
        raise CoincidentAgents("R1 coincides with B")
    frame = RelativeFrame(B, heading_to(B, R1))
    return frame, x1, frame.to_relative(R2), frame.to_relative(Rs)


@dataclass(frozen=True)
class CartesianOval:
    """Boundary |P - R| = rho + beta |P| with R = (pursuer_offset, 0)."""

    pursuer_offset: float
    speed_ratio: float
    engagement_range: float

    @property
    def b(self) -> float:
        return 1.0 - self.speed_ratio**2

    @property
    def eta(self) -> float:
        return self.engagement_range**2 - self.pursuer_offset**2

    def residual(self, p) -> float:
        """Capture relation residual; positive strictly inside the inner oval."""
        return (
            math.hypot(p[0] - self.pursuer_offset, p[1])
            - self.engagement_range
            - self.speed_ratio * math.hypot(p[0], p[1])
        )

    def contains(self, p, tol: float = 0.0) -> bool:
        return self.residual(p) >= -tol

    def point(self, theta: float) -> Point2:
        r = oval_inner_radius(self, theta)
        return Point2(r * math.cos(theta), r * math.sin(theta))


def oval_radius_bounds(oval: CartesianOval) -> tuple[float, float]:
    x1, rho, beta = oval.pursuer_offset, oval.engagement_range, oval.speed_ratio
    if x1 <= rho:
        raise DegenerateOval(f"pursuer offset {x1} does not exceed engagement range {rho}")
    return (x1 - rho) / (beta + 1.0), (x1 - rho) / (beta - 1.0)


def oval_inner_radius(oval: CartesianOval, theta: float) -> float:
    x1, rho, beta = oval.pursuer_offset, oval.engagement_range, oval.speed_ratio
    b = oval.b
    q = beta * rho + x1 * math.cos(theta)
    disc = q * q + b * oval.eta
    if disc < 0.0:
        raise OutsideOval(f"direction {theta} not covered by the inner oval")
    root = math.sqrt(disc)
    # (q - root)/b rewritten to avoid cancellation when q > 0
    if q > 0.0:
        return -oval.eta / (q + root)
    return (q - root) / b


@dataclass(frozen=True)
class ApolloniusCircle:
    center: Point2
    radius: float


def apollonius(A, B, alpha: float) -> ApolloniusCircle:
    """Locus |P - B| = alpha |P - A| for a pursuer A faster than B."""
    if not 0.0 < alpha < 1.0:
        raise InvalidSpeedRatio(f"alpha must lie in (0, 1), got {alpha}")
    A, B = as_point(A), as_point(B)
    d = A.dist(B)
    if d == 0.0:
        raise CoincidentAgents("A coincides with B")
    k = 1.0 - alpha * alpha
    center = Point2((B.x - alpha * alpha * A.x) / k, (B.y - alpha * alpha * A.y) / k)
    return ApolloniusCircle(center, alpha * d / k)


@dataclass(frozen=True)
class BisectorLine:
    """y = slope * x + intercept."""

    slope: float
    intercept: float

    def y(self, x: float) -> float:
        return self.slope * x + self.intercept


def bisector(R1, R2) -> BisectorLine:
    """Orthogonal bisector of R1 = (x1, 0) and R2 = (x2, y2) in the relative frame."""
    x1, y1 = R1
    x2, y2 = R2
    if x1 == x2 and y1 == y2:
        raise CoincidentAgents("R1 and R2 coincide")
    if y1 != 0.0:
        raise ValueError("R1 must lie on the x axis of the relative frame")
    if y2 == 0.0:
        raise VerticalBisector(0.5 * (x1 + x2))
    m = (x1 - x2) / y2
    n = -0.5 * (x1 * x1 - y2 * y2 - x2 * x2) / y2
    return BisectorLine(m, n)

"""Node geometry for the two-road intersection layout."""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

ROAD_X = "X"
ROAD_Y = "Y"


@dataclass(frozen=True, slots=True)
class Position:
    """Cartesian node location in meters; the intersection sits at the origin.

    x runs along the horizontal road, y along the vertical road.
    """

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("position coordinates must be finite")


@dataclass(frozen=True, slots=True)
class NodePolar:
    """Intersection-relative coordinates of a node.

    m is the distance to the intersection (meters) and theta the angle
    measured from the horizontal road, normalized to [0, 2*pi).
    """

    m: float
    theta: float


def to_polar(p: Position) -> NodePolar:
    """Convert a Cartesian position to intersection-relative polar form.

    A node at the origin gets theta = 0; the choice is inert because all
    downstream formulas depend only on m*cos(theta) and m*sin(theta).
    """
    m = math.hypot(p.x, p.y)
    if m == 0.0:
        return NodePolar(0.0, 0.0)
    theta = math.atan2(p.y, p.x) % TWO_PI
    return NodePolar(m, theta)


def from_polar(n: NodePolar) -> Position:
    """Inverse of to_polar."""
    return Position(n.m * math.cos(n.theta), n.m * math.sin(n.theta))


def distance(a: Position, b: Position) -> float:
    """Euclidean distance between two nodes."""
    return math.hypot(a.x - b.x, a.y - b.y)


def dist_to_road_point(n: NodePolar, t: float, road: str) -> float:
    """Distance from a node to the point at coordinate t on a road axis.

    For the horizontal road the perpendicular offset is m*sin(theta) and the
    along-road offset is t - m*cos(theta); the vertical road swaps the roles.
    """
    mx = n.m * math.cos(n.theta)
    my = n.m * math.sin(n.theta)
    if road == ROAD_X:
        return math.hypot(my, t - mx)
    if road == ROAD_Y:
        return math.hypot(mx, t - my)
    raise ValueError(f"unknown road {road!r}, expected 'X' or 'Y'")

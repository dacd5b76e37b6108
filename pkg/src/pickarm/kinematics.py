"""Analytic kinematics for a base-yaw plus two-link arm.

Frame: origin at the base pivot on the table plane, +z up, +y forward,
+x right.  The shoulder sits ``c`` above the origin.  Lengths are in cm and
angles in radians throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateAtShoulder, TriangleInequalityViolated, Unreachable

# acos arguments this far outside [-1, 1] are float noise at the reach boundary
ACOS_CLAMP_TOL = 1e-9
# same tolerance expressed on the shoulder-to-target distance, in cm
REACH_TOL_CM = 1e-9


class Gripper(enum.Enum):
    OPEN = "Open"
    CLOSED = "Closed"


@dataclass(frozen=True)
class ArmGeometry:
    a: float = 14.9  # segment 1
    b: float = 14.6  # segment 2
    c: float = 5.4  # shoulder height above the table plane

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c >= 0):
            raise ValueError(f"invalid arm geometry {self}")


DEFAULT_GEOMETRY = ArmGeometry(14.9, 14.6, 5.4)


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self}")

    def distance_to(self, other: CartesianPoint) -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class ReachParameters:
    rho: float  # horizontal radius
    r: float  # shoulder-to-target distance
    u: float  # projection of segment a onto the shoulder-target line
    g: float  # elevation of the shoulder-target line


@dataclass(frozen=True)
class JointAngles:
    """Arm pose.

    ``theta1`` is the shoulder elevation from horizontal, ``theta2`` the
    interior elbow angle between the two segments (pi means straight) and
    ``theta3`` the derived wrist control ``theta1 + theta2 - pi``.
    """

    theta0: float
    theta1: float
    theta2: float
    theta3: float = 0.0
    gripper: Gripper = Gripper.OPEN

    def with_gripper(self, gripper: Gripper) -> JointAngles:
        return JointAngles(self.theta0, self.theta1, self.theta2, self.theta3, gripper)


# arm pointing straight up, gripper open
REST_POSE = JointAngles(0.0, math.pi / 2, math.pi, math.pi / 2)


@dataclass(frozen=True)
class TriangleAngles:
    alpha: float  # opposite B
    beta: float  # opposite D
    gamma: float  # opposite A


def _angle_opposite(opp: float, s1: float, s2: float) -> float:
    # Kahan's needle-safe form of arccos((s1^2 + s2^2 - opp^2) / (2 s1 s2)).
    a, b = (s1, s2) if s1 >= s2 else (s2, s1)
    c = opp
    if b >= c:
        mu = c - (a - b)
    else:
        mu = b - (a - c)
    num = ((a - b) + c) * mu
    den = (a + (b + c)) * ((a - c) + b)
    return 2.0 * math.atan(math.sqrt(num / den))


def law_of_cosines_angles(A: float, B: float, D: float) -> TriangleAngles:
    """Interior angles of the triangle with sides A, B, D.

    ``alpha`` is ``arccos((A^2 + D^2 - B^2) / 2AD)``, ``beta`` is
    ``arccos((A^2 + B^2 - D^2) / 2AB)`` and ``gamma`` is
    ``arccos((B^2 + D^2 - A^2) / 2BD)``.  They are evaluated with a
    cancellation-free half-angle form so that thin triangles still sum to pi.
    """
    if not (A > 0 and B > 0 and D > 0) or A >= B + D or B >= A + D or D >= A + B:
        raise TriangleInequalityViolated(A, B, D)
    return TriangleAngles(
        alpha=_angle_opposite(B, A, D),
        beta=_angle_opposite(D, A, B),
        gamma=_angle_opposite(A, B, D),
    )


def reach_parameters(p: CartesianPoint, geom: ArmGeometry) -> ReachParameters:
    rho = math.hypot(p.x, p.y)
    dz = p.z - geom.c
    r = math.hypot(rho, dz)
    if r == 0.0:
        raise DegenerateAtShoulder(p)
    u = (geom.a**2 - geom.b**2 + r**2) / (2.0 * r)
    g = math.atan2(dz, rho)
    return ReachParameters(rho=rho, r=r, u=u, g=g)


def _clamped_acos(value: float, r: float, geom: ArmGeometry) -> float:
    if value > 1.0 + ACOS_CLAMP_TOL or value < -1.0 - ACOS_CLAMP_TOL:
        raise Unreachable(r, geom.a, geom.b)
    return math.acos(min(1.0, max(-1.0, value)))


def shoulder_offset_angle(rp: ReachParameters, geom: ArmGeometry) -> float:
    """``arccos(u / a)``: angle between segment a and the shoulder-target line."""
    return _clamped_acos(rp.u / geom.a, rp.r, geom)


def _in_shell(r: float, geom: ArmGeometry) -> bool:
    return abs(geom.a - geom.b) - REACH_TOL_CM <= r <= geom.a + geom.b + REACH_TOL_CM


def _triangle_angles(r: float, geom: ArmGeometry) -> tuple[float, float]:
    # (shoulder offset, interior elbow) for the triangle with sides a, b, r
    a, b = geom.a, geom.b
    if r >= a + b:
        return 0.0, math.pi
    if r <= abs(a - b):
        return (0.0 if a >= b else math.pi), 0.0
    tri = law_of_cosines_angles(a, b, r)
    return tri.alpha, tri.beta


def inverse_kinematics(p: CartesianPoint, geom: ArmGeometry) -> JointAngles:
    """Elbow-up joint angles placing the end effector at ``p``.

    Raises Unreachable outside the annular workspace and DegenerateAtShoulder
    when ``p`` is the shoulder pivot itself.
    """
    rp = reach_parameters(p, geom)
    if not _in_shell(rp.r, geom):
        raise Unreachable(rp.r, geom.a, geom.b)
    shoulder, elbow = _triangle_angles(rp.r, geom)
    theta0 = math.atan2(p.x, p.y) if rp.rho > 0.0 else 0.0
    if theta0 <= -math.pi:
        theta0 += 2.0 * math.pi
    theta1 = rp.g + shoulder
    return JointAngles(theta0, theta1, elbow, theta1 + elbow - math.pi)


def forward_kinematics(j: JointAngles, geom: ArmGeometry) -> CartesianPoint:
    forearm = j.theta1 + j.theta2 - math.pi
    rho = geom.a * math.cos(j.theta1) + geom.b * math.cos(forearm)
    z = geom.c + geom.a * math.sin(j.theta1) + geom.b * math.sin(forearm)
    return CartesianPoint(rho * math.sin(j.theta0), rho * math.cos(j.theta0), z)


def workspace_contains(p: CartesianPoint, geom: ArmGeometry) -> bool:
    try:
        rp = reach_parameters(p, geom)
    except DegenerateAtShoulder:
        return False
    return _in_shell(rp.r, geom)

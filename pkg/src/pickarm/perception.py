"""Pinhole ranging, a simulated object detector and the camera-to-base transform.

The camera is mounted level.  Ranges are horizontal distances from the
optical centre, and bearings are horizontal angles measured from the optical
axis toward the camera's right (clockwise seen from above), the same sense as
base yaw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NonPositiveInput, OutOfView
from .kinematics import CartesianPoint


@dataclass(frozen=True)
class PinholeCamera:
    focal_px: float
    image_w: int
    image_h: int
    mount: CartesianPoint = field(default_factory=lambda: CartesianPoint(0.0, 0.0, 0.0))
    bearing_axis: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if not self.focal_px > 0:
            raise ValueError("focal_px must be positive")
        if not (self.image_w > 0 and self.image_h > 0):
            raise ValueError("image dimensions must be positive")
        if abs(math.hypot(*self.bearing_axis) - 1.0) > 1e-9:
            raise ValueError(f"bearing_axis {self.bearing_axis} is not a unit vector")

    @property
    def half_fov(self) -> float:
        """Horizontal half field of view in radians."""
        return math.atan2(self.image_w / 2.0, self.focal_px)

    @property
    def right_axis(self) -> tuple[float, float]:
        ax, ay = self.bearing_axis
        return (ay, -ax)


@dataclass(frozen=True)
class WorldObject:
    id: str
    class_label: str
    position: CartesianPoint
    width: float
    height: float
    similarity: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"object {self.id}: width and height must be positive")
        if not 0.0 <= self.similarity <= 1.0:
            raise ValueError(f"object {self.id}: similarity {self.similarity} outside [0, 1]")

    def moved_to(self, position: CartesianPoint) -> WorldObject:
        return WorldObject(
            self.id, self.class_label, position, self.width, self.height, self.similarity
        )


@dataclass(frozen=True)
class DetectedObject:
    class_label: str
    similarity: float
    apparent_size: float  # image-plane width, px
    bearing: float
    source_id: str


def estimate_distance(real_size: float, focal: float, apparent: float) -> float:
    """Range from apparent size: ``real_size * focal / apparent``."""
    if not (real_size > 0 and focal > 0 and apparent > 0):
        raise NonPositiveInput(
            f"estimate_distance needs positive inputs, got {real_size}, {focal}, {apparent}"
        )
    return real_size * focal / apparent


def _camera_frame(obj: WorldObject, cam: PinholeCamera) -> tuple[float, float]:
    dx = obj.position.x - cam.mount.x
    dy = obj.position.y - cam.mount.y
    ax, ay = cam.bearing_axis
    rx, ry = cam.right_axis
    return dx * ax + dy * ay, dx * rx + dy * ry


def project_object(obj: WorldObject, cam: PinholeCamera) -> DetectedObject:
    forward, lateral = _camera_frame(obj, cam)
    if forward <= 0.0:
        raise OutOfView(f"object {obj.id} is not in front of the camera")
    bearing = math.atan2(lateral, forward)
    if abs(bearing) > cam.half_fov:
        raise OutOfView(f"object {obj.id} bearing {bearing:.4f} rad outside field of view")
    rng = math.hypot(forward, lateral)
    return DetectedObject(
        class_label=obj.class_label,
        similarity=obj.similarity,
        apparent_size=obj.width * cam.focal_px / rng,
        bearing=bearing,
        source_id=obj.id,
    )


def detection_gate(d: DetectedObject, target_class: str, threshold: float) -> bool:
    """Accept only the target class at or above the similarity threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    return d.class_label == target_class and d.similarity >= threshold


def camera_to_base(
    d: DetectedObject, range_cm: float, cam: PinholeCamera, z: float = 0.0
) -> CartesianPoint:
    """Base-frame point ``range_cm`` along the detection's bearing.

    ``z`` is supplied by the caller, since a level camera gives no vertical fix.
    """
    if not range_cm > 0:
        raise NonPositiveInput(f"range must be positive, got {range_cm}")
    c, s = math.cos(d.bearing), math.sin(d.bearing)
    ax, ay = cam.bearing_axis
    rx, ry = cam.right_axis
    return CartesianPoint(
        cam.mount.x + range_cm * (c * ax + s * rx),
        cam.mount.y + range_cm * (c * ay + s * ry),
        z,
    )

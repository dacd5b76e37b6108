"""Physics-free world: objects, arm pose, camera and sensor queries.

Joint targets are reached instantaneously.  Every tick is 10 ms of simulated
time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Union

from .errors import OutOfView
from .kinematics import (
    REST_POSE,
    ArmGeometry,
    CartesianPoint,
    Gripper,
    JointAngles,
    forward_kinematics,
)
from .perception import DetectedObject, PinholeCamera, WorldObject, project_object
from .sensing import (
    SEA_LEVEL_PA,
    SPEED_OF_SOUND,
    PressureReading,
    UltrasonicReading,
    simulate_echo,
)

TICK_MS = 10


@dataclass(frozen=True)
class JointTarget:
    pose: JointAngles  # gripper field ignored


@dataclass(frozen=True)
class GripperAction:
    action: Gripper


Command = Union[JointTarget, GripperAction]


@dataclass(frozen=True)
class World:
    objects: tuple[WorldObject, ...]
    geom: ArmGeometry
    camera: PinholeCamera
    arm_pose: JointAngles = REST_POSE
    held_object: str | None = None
    tick: int = 0
    grip_delta: float = 100.0
    reach_tolerance_cm: float = 1.0
    baseline_pressure: float = SEA_LEVEL_PA
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        ids = [o.id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate object ids in {ids}")
        if self.held_object is not None and self.held_object not in ids:
            raise ValueError(f"held object {self.held_object} does not exist")

    @property
    def time_ms(self) -> int:
        return self.tick * TICK_MS

    def end_effector(self) -> CartesianPoint:
        return forward_kinematics(self.arm_pose, self.geom)

    def object(self, oid: str) -> WorldObject:
        for o in self.objects:
            if o.id == oid:
                return o
        raise KeyError(oid)

    def pressure_delta(self) -> float:
        return self.grip_delta if self.held_object is not None else 0.0


@dataclass(frozen=True)
class SensorSnapshot:
    detections: tuple[DetectedObject, ...]
    ultrasonic: UltrasonicReading | None
    pressure: PressureReading
    end_effector: CartesianPoint
    # object records known to the operator; supplies real width and table height
    records: dict[str, WorldObject] = field(default_factory=dict)


def _carry_held(world: World) -> World:
    if world.held_object is None:
        return world
    ee = world.end_effector()
    objects = tuple(o.moved_to(ee) if o.id == world.held_object else o for o in world.objects)
    return replace(world, objects=objects)


def attach_detach(world: World, action: Gripper) -> World:
    """Close grabs the nearest object within tolerance; Open lets go in place."""
    pose = world.arm_pose.with_gripper(action)
    if action is Gripper.OPEN:
        return replace(world, arm_pose=pose, held_object=None)
    held = world.held_object
    if held is None:
        ee = world.end_effector()
        best = None
        for o in world.objects:
            d = ee.distance_to(o.position)
            if d <= world.reach_tolerance_cm and (best is None or d < best[0]):
                best = (d, o.id)
        held = best[1] if best else None
    return _carry_held(replace(world, arm_pose=pose, held_object=held))


def tick(world: World, commands: Iterable[Command] = ()) -> World:
    for cmd in commands:
        if isinstance(cmd, JointTarget):
            p = cmd.pose
            pose = JointAngles(p.theta0, p.theta1, p.theta2, p.theta3, world.arm_pose.gripper)
            world = _carry_held(replace(world, arm_pose=pose))
        elif isinstance(cmd, GripperAction):
            world = attach_detach(world, cmd.action)
        else:
            raise TypeError(f"unknown command {cmd!r}")
    world = _carry_held(world)
    return replace(world, tick=world.tick + 1)


def sensor_snapshot(world: World) -> SensorSnapshot:
    detections = []
    for o in world.objects:
        try:
            detections.append(project_object(o, world.camera))
        except OutOfView:
            continue
    ee = world.end_effector()
    echo = None
    if world.objects:
        nearest = min(world.objects, key=lambda o: ee.distance_to(o.position))
        echo = simulate_echo(ee, nearest.position, world.speed_of_sound)
    pressure = PressureReading(
        world.baseline_pressure, world.baseline_pressure + world.pressure_delta()
    )
    return SensorSnapshot(
        tuple(detections), echo, pressure, ee, {o.id: o for o in world.objects}
    )

"""Pick-and-place mission as a deterministic finite state machine.

Detecting -> Ranging -> Planning -> Reaching -> Gripping -> Verifying ->
Transporting -> Releasing -> Homing -> Done, with failure exits for an
unreachable target, a grip that never confirms, and an exhausted tick budget.
Each non-terminal state occupies one tick.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .actuation import (
    ControlCalibration,
    DutyMapping,
    PwmCommand,
    ServoSpec,
    SimulatedPwmBackend,
    default_servos,
    emit_pwm,
    joint_to_control,
)
from .errors import DegenerateAtShoulder, ScenarioInvalid, Unreachable
from .kinematics import (
    REST_POSE,
    ArmGeometry,
    CartesianPoint,
    Gripper,
    JointAngles,
    inverse_kinematics,
)
from .perception import PinholeCamera, camera_to_base, detection_gate, estimate_distance
from .sensing import grip_confirmed, ultrasonic_distance
from .world import Command, GripperAction, JointTarget, SensorSnapshot, World, sensor_snapshot, tick

HOME_TOL_CM = 1e-6


class Phase(str, enum.Enum):
    IDLE = "Idle"
    DETECTING = "Detecting"
    RANGING = "Ranging"
    PLANNING = "Planning"
    REACHING = "Reaching"
    GRIPPING = "Gripping"
    VERIFYING = "Verifying"
    TRANSPORTING = "Transporting"
    RELEASING = "Releasing"
    HOMING = "Homing"
    DONE = "Done"
    FAILED = "Failed"


class FailReason(str, enum.Enum):
    UNREACHABLE = "Unreachable"
    GRIP_FAILED = "GripFailed"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class MissionState:
    """Current phase plus what the controller has learned so far."""

    phase: Phase = Phase.IDLE
    reason: FailReason | None = None
    target_id: str | None = None
    target_point: CartesianPoint | None = None
    plan: JointAngles | None = None
    home_plan: JointAngles | None = None
    grip_attempts: int = 0

    @property
    def terminal(self) -> bool:
        return self.phase in (Phase.DONE, Phase.FAILED)

    def fail(self, reason: FailReason) -> MissionState:
        return replace(self, phase=Phase.FAILED, reason=reason)

    def to(self, phase: Phase, **memory) -> MissionState:
        return replace(self, phase=phase, **memory)


@dataclass(frozen=True)
class PickTask:
    target_class: str
    similarity_threshold: float
    home_position: CartesianPoint
    grip_threshold: float
    max_grip_retries: int = 1

    def __post_init__(self):
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError(f"similarity_threshold {self.similarity_threshold} outside [0, 1]")
        if not self.grip_threshold > 0:
            raise ValueError("grip_threshold must be positive")
        if self.max_grip_retries < 0:
            raise ValueError("max_grip_retries must be non-negative")


@dataclass(frozen=True)
class MissionConfig:
    geom: ArmGeometry
    camera: PinholeCamera
    servos: tuple[ServoSpec, ...] = field(default_factory=lambda: tuple(default_servos()))
    calibration: ControlCalibration = ControlCalibration()
    duty_mapping: DutyMapping = DutyMapping.PAPER
    clamp_angles: bool = True
    reach_tolerance_cm: float = 1.0
    tick_budget: int = 10_000

    @classmethod
    def for_world(cls, world: World, **overrides) -> MissionConfig:
        overrides.setdefault("reach_tolerance_cm", world.reach_tolerance_cm)
        return cls(geom=world.geom, camera=world.camera, **overrides)


@dataclass(frozen=True)
class TraceEvent:
    t: int
    state: str
    detail: tuple[tuple[str, str], ...] = ()

    def line(self) -> str:
        parts = [f"t_ms={self.t}", f"state={self.state}"]
        parts += [f"{k}={v}" for k, v in self.detail]
        return " ".join(parts)


@dataclass(frozen=True)
class StepResult:
    state: MissionState
    commands: tuple[Command, ...]
    detail: tuple[tuple[str, str], ...]


def _num(v: float, places: int) -> str:
    s = f"{v:.{places}f}"
    return s[1:] if s.startswith("-") and not s.strip("-0.") else s


def format_cm(v: float) -> str:
    return _num(v, 6)


def format_rad(v: float) -> str:
    return _num(v, 9)


def _xyz(p: CartesianPoint | None, prefix: str = "") -> list[tuple[str, str]]:
    keys = (f"{prefix}x_cm", f"{prefix}y_cm", f"{prefix}z_cm")
    if p is None:
        return [(k, "none") for k in keys]
    return list(zip(keys, map(format_cm, p.as_tuple())))


def _id_key(oid: str):
    return (0, int(oid), "") if oid.isdigit() else (1, 0, oid)


def _detecting(state, snap, task):
    matches = [d for d in snap.detections if d.class_label == task.target_class]
    best = min(matches, key=lambda d: (-d.similarity, _id_key(d.source_id)), default=None)
    accepted = best is not None and detection_gate(best, task.target_class, task.similarity_threshold)
    detail = [("detections", str(len(snap.detections)))]
    if best is None:
        detail += [("target", "none"), ("class", "none"), ("similarity", "none")]
    else:
        detail += [
            ("target", best.source_id),
            ("class", best.class_label),
            ("similarity", _num(best.similarity, 4)),
        ]
    detail.append(("gate", "accept" if accepted else "reject"))
    nxt = state.to(Phase.RANGING, target_id=best.source_id) if accepted else state
    return nxt, (), detail


def _ranging(state, snap, config):
    det = next((d for d in snap.detections if d.source_id == state.target_id), None)
    record = snap.records.get(state.target_id)
    if det is None or record is None:
        # target vanished from view between ticks: look again
        detail = [("target", state.target_id), ("apparent_px", "none"), ("range_cm", "none")]
        return state.to(Phase.DETECTING, target_id=None), (), detail + _xyz(None)
    rng = estimate_distance(record.width, config.camera.focal_px, det.apparent_size)
    point = camera_to_base(det, rng, config.camera, z=record.position.z)
    detail = [
        ("target", state.target_id),
        ("apparent_px", _num(det.apparent_size, 6)),
        ("range_cm", format_cm(rng)),
    ]
    return state.to(Phase.PLANNING, target_point=point), (), detail + _xyz(point)


def _planning(state, config):
    try:
        plan = inverse_kinematics(state.target_point, config.geom)
    except (Unreachable, DegenerateAtShoulder):
        detail = [(f"theta{i}", "none") for i in range(4)] + [(f"ctrl{i}", "none") for i in range(4)]
        return state.fail(FailReason.UNREACHABLE), (), detail + [("result", "Unreachable")]
    thetas = (plan.theta0, plan.theta1, plan.theta2, plan.theta3)
    ctrl = joint_to_control(plan, config.calibration)
    detail = [(f"theta{i}", format_rad(v)) for i, v in enumerate(thetas)]
    detail += [(f"ctrl{i}", _num(v, 6)) for i, v in enumerate(ctrl)]
    detail.append(("result", "ok"))
    return state.to(Phase.REACHING, plan=plan), (JointTarget(plan),), detail


def _reaching(state, snap, config):
    echo = ultrasonic_distance(snap.ultrasonic) if snap.ultrasonic is not None else math.inf
    reached = echo < config.reach_tolerance_cm
    detail = [("echo_cm", format_cm(echo) if math.isfinite(echo) else "none"), ("reached", str(int(reached)))]
    if reached:
        return state.to(Phase.GRIPPING), (), detail
    return state, (JointTarget(state.plan),), detail


def _gripping(state):
    attempt = state.grip_attempts + 1
    detail = [("attempt", str(attempt)), ("gripper", "close")]
    return (
        state.to(Phase.VERIFYING, grip_attempts=attempt),
        (GripperAction(Gripper.CLOSED),),
        detail,
    )


def _verifying(state, snap, task, config):
    ok = grip_confirmed(snap.pressure, task.grip_threshold)
    left = task.max_grip_retries + 1 - state.grip_attempts
    detail = [
        ("pressure_delta", _num(snap.pressure.delta, 4)),
        ("confirmed", str(int(ok))),
        ("retries_left", str(max(left, 0))),
    ]
    if not ok:
        nxt = state.to(Phase.GRIPPING) if left > 0 else state.fail(FailReason.GRIP_FAILED)
        return nxt, (GripperAction(Gripper.OPEN),), detail
    try:
        home = inverse_kinematics(task.home_position, config.geom)
    except (Unreachable, DegenerateAtShoulder):
        return state.fail(FailReason.UNREACHABLE), (), detail
    return state.to(Phase.TRANSPORTING, home_plan=home), (JointTarget(home),), detail


def _transporting(state, snap, task):
    at_home = snap.end_effector.distance_to(task.home_position) <= HOME_TOL_CM
    detail = _xyz(snap.end_effector, "ee_") + [("at_home", str(int(at_home)))]
    if at_home:
        return state.to(Phase.RELEASING), (), detail
    return state, (JointTarget(state.home_plan),), detail


def step(
    state: MissionState, snap: SensorSnapshot, task: PickTask, config: MissionConfig
) -> StepResult:
    """Advance the mission by one tick.

    Returns the successor state, the commands to apply during this tick, and
    the trace detail (ordered key/value pairs) for the state just executed.
    """
    phase = state.phase
    if state.terminal:
        return StepResult(state, (), ())
    if phase is Phase.IDLE:
        nxt, cmds, detail = state.to(Phase.DETECTING), (), []
    elif phase is Phase.DETECTING:
        nxt, cmds, detail = _detecting(state, snap, task)
    elif phase is Phase.RANGING:
        nxt, cmds, detail = _ranging(state, snap, config)
    elif phase is Phase.PLANNING:
        nxt, cmds, detail = _planning(state, config)
    elif phase is Phase.REACHING:
        nxt, cmds, detail = _reaching(state, snap, config)
    elif phase is Phase.GRIPPING:
        nxt, cmds, detail = _gripping(state)
    elif phase is Phase.VERIFYING:
        nxt, cmds, detail = _verifying(state, snap, task, config)
    elif phase is Phase.TRANSPORTING:
        nxt, cmds, detail = _transporting(state, snap, task)
    elif phase is Phase.RELEASING:
        nxt = state.to(Phase.HOMING)
        cmds = (GripperAction(Gripper.OPEN),)
        detail = [("gripper", "open")] + _xyz(snap.end_effector, "ee_")
    else:  # HOMING
        nxt, cmds, detail = state.to(Phase.DONE), (JointTarget(REST_POSE),), [("pose", "rest")]
    return StepResult(nxt, tuple(cmds), tuple(detail))


@dataclass(frozen=True)
class MissionReport:
    final_state: MissionState
    trace: tuple[TraceEvent, ...]
    pwm_log: tuple[PwmCommand, ...]
    ticks_used: int
    world: World

    @property
    def done(self) -> bool:
        return self.final_state.phase is Phase.DONE

    @property
    def target_position(self) -> CartesianPoint | None:
        tid = self.final_state.target_id
        return self.world.object(tid).position if tid is not None else None


def _terminal_event(state: MissionState, world: World) -> TraceEvent:
    if state.phase is Phase.FAILED:
        return TraceEvent(world.time_ms, Phase.FAILED.value, (("reason", state.reason.value),))
    tid = state.target_id
    pos = world.object(tid).position if tid is not None else None
    return TraceEvent(world.time_ms, Phase.DONE.value, tuple([("object", tid or "none")] + _xyz(pos, "obj_")))


def run_mission(
    world: World, task: PickTask, config: MissionConfig | None = None
) -> MissionReport:
    """Run the state machine against the simulator until it terminates.

    A budget exhausted before Done or Failed ends as Failed(Timeout); that
    outcome is reported in the final state and adds no trace record.
    """
    config = config or MissionConfig.for_world(world)
    if config.tick_budget <= 0:
        raise ScenarioInvalid("tick_budget must be positive")
    try:
        inverse_kinematics(task.home_position, config.geom)
    except (Unreachable, DegenerateAtShoulder) as exc:
        raise ScenarioInvalid(f"home position unreachable: {exc}") from exc

    backend = SimulatedPwmBackend()
    trace: list[TraceEvent] = []
    state = MissionState(Phase.DETECTING)
    ticks = 0
    while not state.terminal and ticks < config.tick_budget:
        snap = sensor_snapshot(world)
        result = step(state, snap, task, config)
        trace.append(TraceEvent(world.time_ms, state.phase.value, result.detail))
        t_issue = world.time_ms
        world = tick(world, result.commands)
        if result.commands:
            emit_pwm(
                world.arm_pose, config.servos, config.calibration, config.duty_mapping,
                t_issue, backend, config.clamp_angles,
            )
        state = result.state
        ticks += 1
    if state.terminal:
        trace.append(_terminal_event(state, world))
    else:
        state = state.fail(FailReason.TIMEOUT)
    return MissionReport(state, tuple(trace), tuple(backend.snapshot()), ticks, world)


def safety_ordering_ok(trace: Sequence[TraceEvent]) -> bool:
    """Gripping only after Reaching; Releasing only after a confirmed Verifying."""
    reached = confirmed = False
    for ev in trace:
        if ev.state == Phase.REACHING.value:
            reached = True
        elif ev.state == Phase.GRIPPING.value and not reached:
            return False
        elif ev.state == Phase.VERIFYING.value and dict(ev.detail).get("confirmed") == "1":
            confirmed = True
        elif ev.state == Phase.RELEASING.value and not confirmed:
            return False
    return True

"""Servo duty-cycle conversion, control-value maps, header pin lookup and PWM output."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import AngleOutOfRange, NotAGpioPin, UnknownPin
from .kinematics import Gripper, JointAngles

log = logging.getLogger(__name__)

N_SERVOS = 5
GRIPPER_CHANNEL = 4


class DutyMapping(str, enum.Enum):
    PAPER = "paper"  # angle / 180 + 2
    CALIBRATED = "calibrated"  # angle / 18 + 2, the usual 1-2 ms hobby band


class PinMode(str, enum.Enum):
    BCM = "BCM"
    BOARD = "BOARD"


@dataclass(frozen=True)
class ServoSpec:
    model: str
    channel: int
    board_pin: int
    angle_min: float = 0.0
    angle_max: float = 180.0
    pwm_freq: float = 50.0

    def __post_init__(self):
        if self.model not in ("MG996", "MG995", "MG90S"):
            raise ValueError(f"unknown servo model {self.model!r}")
        if not 0 <= self.channel < N_SERVOS:
            raise ValueError(f"channel {self.channel} outside 0-{N_SERVOS - 1}")
        if not 0.0 <= self.angle_min < self.angle_max <= 180.0:
            raise ValueError(f"bad servo range [{self.angle_min}, {self.angle_max}]")
        if not self.pwm_freq > 0:
            raise ValueError("pwm_freq must be positive")


DEFAULT_SERVO_PINS = (11, 12, 13, 15, 16)
_DEFAULT_MODELS = ("MG996", "MG995", "MG995", "MG90S", "MG90S")


def default_servos(pins: Sequence[int] = DEFAULT_SERVO_PINS) -> list[ServoSpec]:
    """Base on the MG996, shoulder and elbow on MG995s, wrist and gripper on MG90Ss."""
    if len(pins) != N_SERVOS:
        raise ValueError(f"need {N_SERVOS} servo pins, got {len(pins)}")
    for pin in pins:
        pin_lookup(pin, PinMode.BOARD)
    return [ServoSpec(m, ch, pin) for ch, (m, pin) in enumerate(zip(_DEFAULT_MODELS, pins))]


@dataclass(frozen=True)
class ControlCalibration:
    offsets: tuple[float, float, float] = (0.02, -2.4, -10.0)
    slope: float = 3.3
    wrist_divisor: float = 0.3


@dataclass(frozen=True)
class PwmCommand:
    channel: int
    duty: float  # percent of the PWM period
    pulse_ms: float
    timestamp: int  # ms since mission start

    def __post_init__(self):
        if not 0.0 <= self.duty <= 100.0:
            raise ValueError(f"duty {self.duty} outside [0, 100]")

    def log_line(self) -> str:
        return f"t_ms={self.timestamp} ch={self.channel} duty={self.duty:.4f} pulse_ms={self.pulse_ms:.4f}"


def angle_to_duty(angle: float, mapping: DutyMapping | str = DutyMapping.PAPER) -> float:
    if not 0.0 <= angle <= 180.0:
        raise AngleOutOfRange(angle)
    if DutyMapping(mapping) is DutyMapping.CALIBRATED:
        return angle / 18 + 2
    return angle / 180 + 2


def duty_to_pulse(duty: float, freq: float) -> float:
    """Pulse high-time in ms for a duty percentage at ``freq`` Hz."""
    if not freq > 0:
        raise ValueError("freq must be positive")
    return duty / 100 * (1000 / freq)


def joint_to_control(j: JointAngles, cal: ControlCalibration = ControlCalibration()):
    """The four linear control values derived from a pose.

    These are reported alongside each plan; the servos themselves are driven
    by duty cycle.
    """
    o0, o1, o2 = cal.offsets
    return (
        o0 + cal.slope * j.theta0,
        o1 + cal.slope * (math.pi / 2 - j.theta1),
        o2 + cal.slope * (math.pi - j.theta2),
        (j.theta1 + j.theta2 - math.pi) / cal.wrist_divisor,
    )


# Physical header pins 1-40: (function, BCM number or None, alternate function)
_HEADER = {
    1: ("3.3V PWR", None, None),
    2: ("5V PWR", None, None),
    3: ("GPIO", 2, "I2C1 SDA"),
    4: ("5V PWR", None, None),
    5: ("GPIO", 3, "I2C1 SCL"),
    6: ("GND", None, None),
    7: ("GPIO", 4, None),
    8: ("GPIO", 14, "UART0 TX"),
    9: ("GND", None, None),
    10: ("GPIO", 15, "UART0 RX"),
    11: ("GPIO", 17, None),
    12: ("GPIO", 18, None),
    13: ("GPIO", 27, None),
    14: ("GND", None, None),
    15: ("GPIO", 22, None),
    16: ("GPIO", 23, None),
    17: ("3.3V PWR", None, None),
    18: ("GPIO", 24, None),
    19: ("GPIO", 10, "SPI0 MOSI"),
    20: ("GND", None, None),
    21: ("GPIO", 9, "SPI0 MISO"),
    22: ("GPIO", 25, None),
    23: ("GPIO", 11, "SPI0 SCLK"),
    24: ("GPIO", 8, None),
    25: ("GND", None, None),
    26: ("GPIO", 7, None),
    27: ("Reserved", None, None),
    28: ("Reserved", None, None),
    29: ("GPIO", 5, None),
    30: ("GND", None, None),
    31: ("GPIO", 6, None),
    32: ("GPIO", 12, None),
    33: ("GPIO", 13, None),
    34: ("GND", None, None),
    35: ("GPIO", 19, "SPI1 MISO"),
    36: ("GPIO", 16, None),
    37: ("GPIO", 26, None),
    38: ("GPIO", 20, None),
    39: ("GND", None, None),
    40: ("GPIO", 21, None),
}
_BCM_TO_BOARD = {bcm: pin for pin, (_, bcm, _) in _HEADER.items() if bcm is not None}


@dataclass(frozen=True)
class PinInfo:
    board: int
    kind: str  # GPIO, GND, 3.3V PWR, 5V PWR or Reserved
    gpio: int | None = None
    alt: str | None = None

    @property
    def function(self) -> str:
        return f"GPIO {self.gpio}" if self.kind == "GPIO" else self.kind


def describe_pin(board: int) -> PinInfo:
    """Header entry for a physical pin, whatever its kind."""
    try:
        kind, bcm, alt = _HEADER[board]
    except KeyError:
        raise UnknownPin(f"no physical pin {board} on the 40-pin header") from None
    return PinInfo(board, kind, bcm, alt)


def pin_lookup(pin: int, mode: PinMode | str) -> PinInfo:
    """Resolve a GPIO pin by physical (BOARD) or Broadcom (BCM) number."""
    if PinMode(mode) is PinMode.BCM:
        try:
            board = _BCM_TO_BOARD[pin]
        except KeyError:
            raise UnknownPin(f"GPIO {pin} is not on the 40-pin header") from None
        return describe_pin(board)
    info = describe_pin(pin)
    if info.kind != "GPIO":
        raise NotAGpioPin(pin, info.kind)
    return info


class PwmBackend(Protocol):
    def append(self, command: PwmCommand) -> None: ...

    def snapshot(self) -> list[PwmCommand]: ...


class SimulatedPwmBackend:
    """In-memory append-only command log standing in for the GPIO PWM driver."""

    def __init__(self):
        self._log: list[PwmCommand] = []

    def append(self, command: PwmCommand) -> None:
        self._log.append(command)

    def snapshot(self) -> list[PwmCommand]:
        return list(self._log)

    def __len__(self):
        return len(self._log)


def _servo_angle(j: JointAngles, servo: ServoSpec, clamp: bool) -> float:
    if servo.channel == GRIPPER_CHANNEL:
        return servo.angle_max if j.gripper is Gripper.CLOSED else servo.angle_min
    theta = (j.theta0, j.theta1, j.theta2, j.theta3)[servo.channel]
    deg = math.degrees(theta)
    if servo.angle_min <= deg <= servo.angle_max:
        return deg
    if not clamp:
        raise AngleOutOfRange(deg, servo.angle_min, servo.angle_max)
    return min(servo.angle_max, max(servo.angle_min, deg))


def emit_pwm(
    j: JointAngles,
    servos: Sequence[ServoSpec],
    cal: ControlCalibration = ControlCalibration(),
    mapping: DutyMapping | str = DutyMapping.PAPER,
    t: int = 0,
    backend: PwmBackend | None = None,
    clamp: bool = True,
) -> list[PwmCommand]:
    """Convert a pose into one PWM command per servo, in channel order."""
    ordered = sorted(servos, key=lambda s: s.channel)
    if [s.channel for s in ordered] != list(range(N_SERVOS)):
        raise ValueError(f"need exactly one servo per channel 0-{N_SERVOS - 1}")
    log.debug("t=%d control values %s", t, joint_to_control(j, cal))
    commands = []
    for servo in ordered:
        duty = angle_to_duty(_servo_angle(j, servo, clamp), mapping)
        cmd = PwmCommand(servo.channel, duty, duty_to_pulse(duty, servo.pwm_freq), t)
        if backend is not None:
            backend.append(cmd)
        commands.append(cmd)
    return commands

"""HC-SR04 style ultrasonic ranging and barometric grip confirmation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal

from .kinematics import CartesianPoint

SPEED_OF_SOUND = 343.0  # m/s
SEA_LEVEL_PA = 101325.0


@dataclass(frozen=True)
class UltrasonicReading:
    echo_round_trip: float  # s
    speed_of_sound: float = SPEED_OF_SOUND  # m/s

    def __post_init__(self):
        if not self.echo_round_trip >= 0:
            raise ValueError(f"negative echo time {self.echo_round_trip}")
        if not self.speed_of_sound > 0:
            raise ValueError("speed_of_sound must be positive")


@dataclass(frozen=True)
class PressureReading:
    baseline: float
    current: float

    def __post_init__(self):
        for v in (self.baseline, self.current):
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"invalid pressure {v}")

    @property
    def delta(self) -> float:
        return self.current - self.baseline


def ultrasonic_distance(r: UltrasonicReading) -> float:
    """One-way distance in cm: half the echo path at the speed of sound.

    Evaluated in decimal on the inputs' shortest representations so that
    decimal inputs such as 0.001 s give the decimal answer.
    """
    v = Decimal(repr(r.speed_of_sound))
    t = Decimal(repr(r.echo_round_trip))
    return float(v * t * 50)


def simulate_echo(
    sensor_pos: CartesianPoint, target_pos: CartesianPoint, v: float = SPEED_OF_SOUND
) -> UltrasonicReading:
    if not v > 0:
        raise ValueError("speed of sound must be positive")
    metres = sensor_pos.distance_to(target_pos) / 100.0
    return UltrasonicReading(2.0 * metres / v, v)


def grip_confirmed(p: PressureReading, threshold: float) -> bool:
    if not threshold > 0:
        raise ValueError("grip threshold must be positive")
    return p.current - p.baseline >= threshold

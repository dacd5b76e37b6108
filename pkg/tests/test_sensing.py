import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickarm.kinematics import CartesianPoint
from pickarm.sensing import (
    PressureReading,
    UltrasonicReading,
    grip_confirmed,
    simulate_echo,
    ultrasonic_distance,
)

ORIGIN = CartesianPoint(0, 0, 0)


def test_zero_echo():
    assert ultrasonic_distance(UltrasonicReading(0.0)) == 0.0


def test_one_millisecond():
    assert ultrasonic_distance(UltrasonicReading(0.001, 343)) == 17.15


def test_echo_coincident():
    assert simulate_echo(ORIGIN, ORIGIN).echo_round_trip == 0.0


def test_echo_one_metre():
    assert simulate_echo(ORIGIN, CartesianPoint(0, 100, 0), 343).echo_round_trip == 2 / 343


def test_round_trip_random_pairs():
    rng = random.Random(3)
    for _ in range(100):
        s = CartesianPoint(*(rng.uniform(-50, 50) for _ in range(3)))
        p = CartesianPoint(*(rng.uniform(-50, 50) for _ in range(3)))
        d = s.distance_to(p)
        assert ultrasonic_distance(simulate_echo(s, p)) == pytest.approx(d, rel=1e-9)


@given(st.floats(0, 0.05), st.floats(300, 360), st.floats(0.1, 10))
def test_linear_in_time_and_speed(t, v, k):
    base = ultrasonic_distance(UltrasonicReading(t, v))
    assert ultrasonic_distance(UltrasonicReading(t * k, v)) == pytest.approx(k * base, rel=1e-12, abs=1e-12)
    assert ultrasonic_distance(UltrasonicReading(t, v * k)) == pytest.approx(k * base, rel=1e-12, abs=1e-12)


def test_reading_validation():
    with pytest.raises(ValueError):
        UltrasonicReading(-1.0)
    with pytest.raises(ValueError):
        UltrasonicReading(0.1, 0.0)
    with pytest.raises(ValueError):
        PressureReading(math.nan, 1.0)


@pytest.mark.parametrize(
    "current,expected", [(101325, False), (101425, True), (101375, True), (101374.9, False)]
)
def test_grip(current, expected):
    assert grip_confirmed(PressureReading(101325, current), 50) is expected


@given(st.floats(0, 2e5), st.floats(0, 2e5), st.floats(1, 500))
def test_grip_monotone_in_current(c1, c2, thr):
    lo, hi = sorted((c1, c2))
    if grip_confirmed(PressureReading(101325, lo), thr):
        assert grip_confirmed(PressureReading(101325, hi), thr)


def test_grip_threshold_must_be_positive():
    with pytest.raises(ValueError):
        grip_confirmed(PressureReading(1, 2), 0)

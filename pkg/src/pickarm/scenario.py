"""Sectioned key=value scenario files.

Sections are ``[arm]``, ``[camera]``, ``[task]``, an optional ``[sensors]``
and any number of ``[object.<id>]``.  ``#`` starts a comment.  Lengths are cm.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .actuation import DEFAULT_SERVO_PINS, DutyMapping, PinMode, default_servos, pin_lookup
from .errors import ParseError, PickArmError, ValidationError
from .kinematics import ArmGeometry, CartesianPoint
from .mission import MissionConfig, PickTask
from .perception import PinholeCamera, WorldObject
from .sensing import SEA_LEVEL_PA, SPEED_OF_SOUND
from .world import World

_REQUIRED = object()


def _float(key, raw):
    try:
        v = float(raw)
    except ValueError:
        raise ValidationError(key, f"not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise ValidationError(key, f"not finite: {raw!r}")
    return v


def _int(key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(key, f"not an integer: {raw!r}") from None


def _bool(key, raw):
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValidationError(key, f"not a boolean: {raw!r}")


def _pins(key, raw):
    try:
        pins = tuple(int(p) for p in raw.split(","))
    except ValueError:
        raise ValidationError(key, f"not a comma-separated pin list: {raw!r}") from None
    if len(pins) != 5:
        raise ValidationError(key, f"need 5 pins, got {len(pins)}")
    if len(set(pins)) != 5:
        raise ValidationError(key, "pins must be distinct")
    for p in pins:
        try:
            pin_lookup(p, PinMode.BOARD)
        except PickArmError as exc:
            raise ValidationError(key, str(exc)) from None
    return pins


def _mapping(key, raw):
    try:
        return DutyMapping(raw)
    except ValueError:
        raise ValidationError(key, f"expected paper or calibrated, got {raw!r}") from None


def _text(key, raw):
    if not raw:
        raise ValidationError(key, "empty value")
    return raw


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, DutyMapping):
        return v.value
    if isinstance(v, tuple):
        return ", ".join(str(p) for p in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# key -> (parser, default)
_SCHEMA = {
    "arm": {
        "a_cm": (_float, _REQUIRED),
        "b_cm": (_float, _REQUIRED),
        "c_cm": (_float, _REQUIRED),
        "duty_mapping": (_mapping, DutyMapping.PAPER),
        "servo_pins": (_pins, DEFAULT_SERVO_PINS),
        "clamp_angles": (_bool, True),
    },
    "camera": {
        "focal_px": (_float, _REQUIRED),
        "image_w": (_int, _REQUIRED),
        "image_h": (_int, _REQUIRED),
        "mount_x_cm": (_float, 0.0),
        "mount_y_cm": (_float, 0.0),
        "mount_z_cm": (_float, 0.0),
        "axis_x": (_float, 0.0),
        "axis_y": (_float, 1.0),
    },
    "task": {
        "target_class": (_text, _REQUIRED),
        "similarity_threshold": (_float, _REQUIRED),
        "home_x_cm": (_float, _REQUIRED),
        "home_y_cm": (_float, _REQUIRED),
        "home_z_cm": (_float, _REQUIRED),
        "grip_threshold": (_float, _REQUIRED),
        "max_grip_retries": (_int, 1),
        "reach_tolerance_cm": (_float, 1.0),
        "tick_budget": (_int, 10_000),
    },
    "sensors": {
        "grip_delta": (_float, 100.0),
        "baseline_pressure": (_float, SEA_LEVEL_PA),
        "speed_of_sound": (_float, SPEED_OF_SOUND),
    },
    "object": {
        "class": (_text, _REQUIRED),
        "x_cm": (_float, _REQUIRED),
        "y_cm": (_float, _REQUIRED),
        "z_cm": (_float, _REQUIRED),
        "width_cm": (_float, _REQUIRED),
        "height_cm": (_float, _REQUIRED),
        "similarity": (_float, _REQUIRED),
    },
}


@dataclass(frozen=True)
class ObjectSpec:
    id: str
    values: dict


@dataclass(frozen=True)
class Scenario:
    arm: dict
    camera: dict
    task: dict
    sensors: dict = field(default_factory=dict)
    objects: tuple[ObjectSpec, ...] = ()

    @property
    def geometry(self) -> ArmGeometry:
        return ArmGeometry(self.arm["a_cm"], self.arm["b_cm"], self.arm["c_cm"])

    def build_camera(self) -> PinholeCamera:
        c = self.camera
        return PinholeCamera(
            c["focal_px"], c["image_w"], c["image_h"],
            CartesianPoint(c["mount_x_cm"], c["mount_y_cm"], c["mount_z_cm"]),
            (c["axis_x"], c["axis_y"]),
        )

    def build_task(self) -> PickTask:
        t = self.task
        return PickTask(
            t["target_class"], t["similarity_threshold"],
            CartesianPoint(t["home_x_cm"], t["home_y_cm"], t["home_z_cm"]),
            t["grip_threshold"], t["max_grip_retries"],
        )

    def build_world(self) -> World:
        objects = tuple(
            WorldObject(
                o.id, o.values["class"],
                CartesianPoint(o.values["x_cm"], o.values["y_cm"], o.values["z_cm"]),
                o.values["width_cm"], o.values["height_cm"], o.values["similarity"],
            )
            for o in self.objects
        )
        return World(
            objects, self.geometry, self.build_camera(),
            grip_delta=self.sensors["grip_delta"],
            reach_tolerance_cm=self.task["reach_tolerance_cm"],
            baseline_pressure=self.sensors["baseline_pressure"],
            speed_of_sound=self.sensors["speed_of_sound"],
        )

    def build_config(self) -> MissionConfig:
        return MissionConfig(
            geom=self.geometry,
            camera=self.build_camera(),
            servos=tuple(default_servos(self.arm["servo_pins"])),
            duty_mapping=self.arm["duty_mapping"],
            clamp_angles=self.arm["clamp_angles"],
            reach_tolerance_cm=self.task["reach_tolerance_cm"],
            tick_budget=self.task["tick_budget"],
        )


def _section(name: str, kind: str, raw: dict) -> dict:
    schema = _SCHEMA[kind]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ValidationError(f"{name}.{unknown[0]}", "unknown key")
    out = {}
    for key, (conv, default) in schema.items():
        qualified = f"{name}.{key}"
        if key in raw:
            out[key] = conv(qualified, raw[key])
        elif default is _REQUIRED:
            raise ValidationError(qualified, "missing required key")
        else:
            out[key] = default
    return out


def _validate_ranges(sc: Scenario) -> None:
    def positive(sec, key, value):
        if not value > 0:
            raise ValidationError(f"{sec}.{key}", f"must be positive, got {value}")

    for key in ("a_cm", "b_cm"):
        positive("arm", key, sc.arm[key])
    if sc.arm["c_cm"] < 0:
        raise ValidationError("arm.c_cm", "must be non-negative")
    for key in ("focal_px", "image_w", "image_h"):
        positive("camera", key, sc.camera[key])
    if abs(math.hypot(sc.camera["axis_x"], sc.camera["axis_y"]) - 1.0) > 1e-9:
        raise ValidationError("camera.axis_x", "optical axis must be a unit vector")
    t = sc.task
    if not 0.0 <= t["similarity_threshold"] <= 1.0:
        raise ValidationError("task.similarity_threshold", "outside [0, 1]")
    for key in ("grip_threshold", "reach_tolerance_cm", "tick_budget"):
        positive("task", key, t[key])
    if t["max_grip_retries"] < 0:
        raise ValidationError("task.max_grip_retries", "must be non-negative")
    for key in ("baseline_pressure", "speed_of_sound"):
        positive("sensors", key, sc.sensors[key])
    if sc.sensors["grip_delta"] < 0:
        raise ValidationError("sensors.grip_delta", "must be non-negative")
    for o in sc.objects:
        name = f"object.{o.id}"
        for key in ("width_cm", "height_cm"):
            positive(name, key, o.values[key])
        if not 0.0 <= o.values["similarity"] <= 1.0:
            raise ValidationError(f"{name}.similarity", "outside [0, 1]")


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario text, filling defaults for optional keys."""
    cp = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        strict=True,
        empty_lines_in_values=False,
        default_section="\x00no-default",
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError(exc.lineno, "key outside of any section") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ParseError(lineno, f"expected key = value, got {line.strip()}") from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.lineno, exc.message.split(":")[-1].strip()) from None

    sections = {}
    objects = []
    for name in cp.sections():
        raw = dict(cp.items(name))
        if name.startswith("object."):
            oid = name[len("object."):]
            if not oid:
                raise ValidationError(name, "object id is empty")
            objects.append(ObjectSpec(oid, _section(name, "object", raw)))
        elif name in ("arm", "camera", "task", "sensors"):
            sections[name] = _section(name, name, raw)
        else:
            raise ValidationError(name, "unknown section")
    for required in ("arm", "camera", "task"):
        if required not in sections:
            raise ValidationError(required, "missing required section")
    sections.setdefault("sensors", _section("sensors", "sensors", {}))
    sc = Scenario(objects=tuple(objects), **sections)
    _validate_ranges(sc)
    return sc


def format_scenario(sc: Scenario) -> str:
    """Render a scenario with every key explicit; parses back to an equal value."""
    lines = []
    for name in ("arm", "camera", "task", "sensors"):
        lines.append(f"[{name}]")
        lines += [f"{k} = {_fmt(v)}" for k, v in getattr(sc, name).items()]
    for o in sc.objects:
        lines.append(f"[object.{o.id}]")
        lines += [f"{k} = {_fmt(v)}" for k, v in o.values.items()]
    return "\n".join(lines) + "\n"


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())

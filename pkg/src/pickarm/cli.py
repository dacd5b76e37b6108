"""Command-line entry point: ``pickarm run|ik|fk|distance|duty|pins``.

Exit codes: 0 success, 1 usage or input error, 2 mission failed or target
unreachable.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .actuation import DutyMapping, PinMode, angle_to_duty, describe_pin, pin_lookup
from .errors import DegenerateAtShoulder, PickArmError, Unreachable
from .kinematics import (
    DEFAULT_GEOMETRY,
    ArmGeometry,
    CartesianPoint,
    JointAngles,
    forward_kinematics,
    inverse_kinematics,
)
from .mission import MissionReport, format_cm, format_rad, run_mission
from .perception import estimate_distance
from .report import emit_report, format_pwm_log, format_trace
from .scenario import load_scenario

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(v: float) -> str:
    return f"{v:.12g}"


def _geometry(args) -> ArmGeometry:
    return ArmGeometry(args.a, args.b, args.c)


def _run_one(path: Path) -> MissionReport:
    sc = load_scenario(path)
    return run_mission(sc.build_world(), sc.build_task(), sc.build_config())


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def cmd_run(args, out) -> int:
    target = Path(args.scenario)
    if target.is_dir():
        paths = sorted(target.glob("*.scn"))
        if not paths:
            raise UsageError(f"no .scn files in {target}")
        for opt in (args.trace, args.pwm_log):
            if opt is not None:
                Path(opt).mkdir(parents=True, exist_ok=True)
        # one mission per worker; results are reported in file-name order
        with ThreadPoolExecutor() as pool:
            reports = list(pool.map(_run_one, paths))
        for path, report in zip(paths, reports):
            out.write(f"== {path.name} ==\n")
            emit_report(report, out)
            if args.trace:
                _write(Path(args.trace) / f"{path.stem}.trace", format_trace(report))
            if args.pwm_log:
                _write(Path(args.pwm_log) / f"{path.stem}.pwm", format_pwm_log(report))
        return EXIT_OK if all(r.done for r in reports) else EXIT_FAILED

    report = _run_one(target)
    emit_report(report, out)
    if args.trace:
        _write(Path(args.trace), format_trace(report))
    if args.pwm_log:
        _write(Path(args.pwm_log), format_pwm_log(report))
    return EXIT_OK if report.done else EXIT_FAILED


def cmd_ik(args, out) -> int:
    try:
        j = inverse_kinematics(CartesianPoint(args.x, args.y, args.z), _geometry(args))
    except (Unreachable, DegenerateAtShoulder) as exc:
        out.write(f"{exc}\n")
        return EXIT_FAILED
    vals = (j.theta0, j.theta1, j.theta2, j.theta3)
    out.write(" ".join(f"theta{i}={format_rad(v)}" for i, v in enumerate(vals)) + "\n")
    return EXIT_OK


def cmd_fk(args, out) -> int:
    p = forward_kinematics(JointAngles(args.t0, args.t1, args.t2), _geometry(args))
    out.write(f"x_cm={format_cm(p.x)} y_cm={format_cm(p.y)} z_cm={format_cm(p.z)}\n")
    return EXIT_OK


def cmd_distance(args, out) -> int:
    out.write(_num(estimate_distance(args.width, args.focal, args.apparent)) + "\n")
    return EXIT_OK


def cmd_duty(args, out) -> int:
    out.write(_num(angle_to_duty(args.angle, args.mapping)) + "\n")
    return EXIT_OK


def cmd_pins(args, out) -> int:
    if args.bcm is not None:
        out.write(f"BOARD {pin_lookup(args.bcm, PinMode.BCM).board}\n")
        return EXIT_OK
    info = describe_pin(args.board)
    out.write(info.function + (f" ({info.alt})" if info.alt else "") + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pickarm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file, or every .scn in a directory")
    p.add_argument("scenario")
    p.add_argument("--trace", help="write the trace here (a directory when running a directory)")
    p.add_argument("--pwm-log", help="write the PWM log here (a directory when running a directory)")
    p.set_defaults(func=cmd_run)

    def geometry_opts(p):
        p.add_argument("--a", type=float, default=DEFAULT_GEOMETRY.a)
        p.add_argument("--b", type=float, default=DEFAULT_GEOMETRY.b)
        p.add_argument("--c", type=float, default=DEFAULT_GEOMETRY.c)

    p = sub.add_parser("ik", help="joint angles for a target point (cm)")
    for axis in "xyz":
        p.add_argument(f"--{axis}", type=float, required=True)
    geometry_opts(p)
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("fk", help="end-effector point for joint angles (rad)")
    for name in ("t0", "t1", "t2"):
        p.add_argument(f"--{name}", type=float, required=True)
    geometry_opts(p)
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("distance", help="pinhole range from apparent size")
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--focal", type=float, required=True)
    p.add_argument("--apparent", type=float, required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("duty", help="servo duty cycle for an angle in degrees")
    p.add_argument("--angle", type=float, required=True)
    p.add_argument("--mapping", choices=[m.value for m in DutyMapping], default="paper")
    p.set_defaults(func=cmd_duty)

    p = sub.add_parser("pins", help="40-pin header lookup")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--board", type=int, help="physical pin number")
    g.add_argument("--bcm", type=int, help="GPIO number; prints its physical pin")
    p.set_defaults(func=cmd_pins)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"pickarm: usage error: {exc}\n")
    except (PickArmError, ValueError) as exc:
        err.write(f"pickarm: {exc}\n")
    except OSError as exc:
        err.write(f"pickarm: {exc.strerror or exc}: {exc.filename or ''}\n")
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Plain-text trace, PWM log and summary rendering for finished missions."""

from __future__ import annotations

from typing import TextIO

from .mission import MissionReport, Phase, format_cm


def format_trace(report: MissionReport) -> str:
    return "".join(ev.line() + "\n" for ev in report.trace)


def format_pwm_log(report: MissionReport) -> str:
    return "".join(cmd.log_line() + "\n" for cmd in report.pwm_log)


def format_summary(report: MissionReport) -> str:
    state = report.final_state
    if state.phase is Phase.FAILED:
        head = f"final_state=Failed reason={state.reason.value}"
    else:
        head = f"final_state={state.phase.value}"
    pos = report.target_position
    if pos is None:
        obj = "object=none"
    else:
        x, y, z = map(format_cm, pos.as_tuple())
        obj = f"object={state.target_id} x_cm={x} y_cm={y} z_cm={z}"
    lines = ["# summary", head, f"ticks_used={report.ticks_used}", obj,
             f"pwm_commands={len(report.pwm_log)}"]
    return "\n".join(lines) + "\n"


def emit_report(report: MissionReport, out: TextIO | None = None) -> str:
    """Trace followed by the summary block; also written to ``out`` if given."""
    text = format_trace(report) + format_summary(report)
    if out is not None:
        out.write(text)
    return text

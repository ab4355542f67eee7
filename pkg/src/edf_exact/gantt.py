"""ASCII and SVG Gantt renderings of schedule traces."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .engine import ScheduleTrace
from .model import TaskSystem

GLYPHS = "123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"

PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

TICK_WIDTH = 16
BAND_HEIGHT = 28
BAND_GAP = 12
MARGIN_LEFT = 48
MARGIN_TOP = 24


class WindowError(ValueError):
    pass


def glyph(task_index: int) -> str:
    return GLYPHS[task_index] if task_index < len(GLYPHS) else "#"


def _window(trace: ScheduleTrace, start: int | None, end: int | None) -> tuple[int, int]:
    lo = 0 if start is None else start
    hi = trace.horizon if end is None else end
    if lo < 0 or hi > trace.horizon or lo > hi:
        raise WindowError(f"window [{lo}, {hi}) outside trace [0, {trace.horizon})")
    return lo, hi


def render_ascii(trace: ScheduleTrace, start: int | None = None, end: int | None = None) -> str:
    """One row per CPU, one column per tick: task number (1-based) or ``.`` when idle."""
    lo, hi = _window(trace, start, end)
    if hi == lo:
        return ""
    lines = [f"{'t=' + str(lo):>6} " + "".join("|" if t % 10 == 0 else " " for t in range(lo, hi))]
    for cpu, segs in enumerate(trace.segments):
        row = ["."] * (hi - lo)
        for seg in segs:
            if seg.job is None:
                continue
            for t in range(max(seg.start, lo), min(seg.end, hi)):
                row[t - lo] = glyph(seg.job.task_index)
        lines.append(f"{'cpu' + str(cpu + 1):>6} " + "".join(row))
    return "\n".join(lines) + "\n"


def gridlines(system: TaskSystem, lo: int, hi: int) -> list[int]:
    """Instants O_max + kP inside the closed window ``[lo, hi]``."""
    P, t = system.hyperperiod, system.o_max
    out = []
    while t <= hi:
        if t >= lo:
            out.append(t)
        t += P
    return out


def render_svg(
    trace: ScheduleTrace,
    system: TaskSystem | None = None,
    start: int | None = None,
    end: int | None = None,
) -> str:
    """Deterministic SVG: a band per CPU, colors keyed by task index.

    With ``system`` given, releases and deadlines are marked under the bands
    and dashed gridlines drawn at O_max + kP.
    """
    lo, hi = _window(trace, start, end)
    span = hi - lo
    n_cpu = trace.cpus
    marks_h = 0 if system is None else 10 * len(system.tasks) + 8
    width = MARGIN_LEFT + span * TICK_WIDTH + 16
    height = MARGIN_TOP + n_cpu * (BAND_HEIGHT + BAND_GAP) + marks_h + 16

    def x(t: int) -> int:
        return MARGIN_LEFT + (t - lo) * TICK_WIDTH

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for t in range(lo, hi + 1):
        if t % 5 == 0 or t in (lo, hi):
            out.append(f'<text x="{x(t)}" y="{MARGIN_TOP - 8}" text-anchor="middle">{t}</text>')
    for cpu, segs in enumerate(trace.segments):
        y = MARGIN_TOP + cpu * (BAND_HEIGHT + BAND_GAP)
        out.append(f'<g class="band" id="cpu{cpu + 1}">')
        out.append(f'<text x="4" y="{y + BAND_HEIGHT // 2 + 4}">cpu{cpu + 1}</text>')
        out.append(
            f'<rect x="{x(lo)}" y="{y}" width="{span * TICK_WIDTH}" height="{BAND_HEIGHT}" '
            f'fill="#f4f4f4" stroke="#999999"/>'
        )
        for seg in segs:
            if seg.job is None:
                continue
            s, e = max(seg.start, lo), min(seg.end, hi)
            if e <= s:
                continue
            color = PALETTE[seg.job.task_index % len(PALETTE)]
            label = escape(str(seg.job))
            out.append(
                f'<rect x="{x(s)}" y="{y}" width="{(e - s) * TICK_WIDTH}" height="{BAND_HEIGHT}" '
                f'fill="{color}" stroke="#333333"><title>{label}</title></rect>'
            )
            out.append(
                f'<text x="{(x(s) + x(e)) // 2}" y="{y + BAND_HEIGHT // 2 + 4}" '
                f'text-anchor="middle" fill="#ffffff">{seg.job.task_index + 1}</text>'
            )
        out.append("</g>")
    if system is not None:
        base = MARGIN_TOP + n_cpu * (BAND_HEIGHT + BAND_GAP)
        out.append('<g class="marks">')
        for i, task in enumerate(system.tasks):
            y = base + 10 * i + 8
            color = PALETTE[i % len(PALETTE)]
            r = task.offset
            while r < hi:
                if r >= lo:
                    out.append(f'<path class="release" d="M{x(r)} {y} l-3 4 h6 z" fill="{color}"/>')
                d = r + task.deadline
                if lo <= d <= hi:
                    out.append(f'<path class="deadline" d="M{x(d)} {y + 4} l-3 -4 h6 z" '
                               f'fill="none" stroke="{color}"/>')
                r += task.period
        out.append("</g>")
        bottom = height - 8
        for t in gridlines(system, lo, hi):
            out.append(
                f'<line class="grid" x1="{x(t)}" y1="{MARGIN_TOP - 4}" x2="{x(t)}" y2="{bottom}" '
                f'stroke="#000000" stroke-dasharray="4 3"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"

"""Minimal static SVG charts (no scripting, byte-stable output)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=20, top=40, bottom=50)


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Axes:
    def __init__(self, xs, ys, xpad=0.5):
        self.x0, self.x1 = min(xs) - xpad, max(xs) + xpad
        ys = [y for y in ys if math.isfinite(y)] or [0.0]
        lo, hi = min(min(ys), 0.0), max(ys)
        ticks = _nice_ticks(lo, hi)
        self.yticks = ticks
        self.y0, self.y1 = ticks[0], max(ticks[-1], hi)
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.pw = WIDTH - MARGIN["left"] - MARGIN["right"]
        self.ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(self, x: float) -> float:
        return MARGIN["left"] + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y: float) -> float:
        return MARGIN["top"] + (1 - (y - self.y0) / (self.y1 - self.y0)) * self.ph


def _frame(ax: _Axes, title: str, xlabel: str, ylabel: str, xticks) -> list[str]:
    left, top = MARGIN["left"], MARGIN["top"]
    bottom = top + ax.ph
    out = [
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{left + ax.pw}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    for t in ax.yticks:
        y = ax.py(t)
        out.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 7}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{_fmt(t)}</text>')
    for t in xticks:
        x = ax.px(t)
        out.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{bottom + 17}" text-anchor="middle" font-size="11">{t}</text>')
    out.append(f'<text x="{left + ax.pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ax.ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {top + ax.ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    return out


def _xticks(xs) -> list[int]:
    xs = list(xs)
    stride = max(1, math.ceil(len(xs) / 20))
    return xs[::stride]


def _marker(ax: _Axes, k: int) -> str:
    x = ax.px(k)
    return (
        f'<line class="chosen-k" data-k="{k}" x1="{x:.2f}" y1="{MARGIN["top"]}" '
        f'x2="{x:.2f}" y2="{MARGIN["top"] + ax.ph}" stroke="red" stroke-dasharray="6,4"/>'
    )


def _document(title: str, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" aria-label={quoteattr(title)}>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def line_chart(xs, ys, title: str, xlabel: str, ylabel: str, mark_k: int | None = None) -> str:
    """Connected points; an optional dashed red rule at x = ``mark_k``."""
    xs, ys = list(xs), [float(y) for y in ys]
    if not xs:
        ax = _Axes([0], [0.0])
        return _document(title, _frame(ax, title, xlabel, ylabel, []))
    ax = _Axes(xs, ys)
    body = _frame(ax, title, xlabel, ylabel, _xticks(xs))
    pts = " ".join(f"{ax.px(x):.2f},{ax.py(y):.2f}" for x, y in zip(xs, ys))
    body.append(f'<polyline class="series" fill="none" stroke="steelblue" stroke-width="2" points="{pts}"/>')
    for x, y in zip(xs, ys):
        body.append(
            f'<circle class="point" data-x="{x}" data-y="{y!r}" cx="{ax.px(x):.2f}" '
            f'cy="{ax.py(y):.2f}" r="3.5" fill="steelblue"/>'
        )
    if mark_k is not None:
        body.append(_marker(ax, mark_k))
    return _document(title, body)


def bar_chart(xs, ys, title: str, xlabel: str, ylabel: str, mark_k: int | None = None) -> str:
    xs, ys = list(xs), [float(y) for y in ys]
    ax = _Axes(xs or [0], ys)
    body = _frame(ax, title, xlabel, ylabel, _xticks(xs))
    width = 0.7 * ax.pw / max(len(xs), 1) if xs else 0
    base = ax.py(max(ax.y0, 0.0))
    for x, y in zip(xs, ys):
        top = ax.py(y)
        body.append(
            f'<rect class="bar" data-x="{x}" data-y="{y!r}" x="{ax.px(x) - width / 2:.2f}" '
            f'y="{min(top, base):.2f}" width="{width:.2f}" height="{abs(base - top):.2f}" fill="steelblue"/>'
        )
    if mark_k is not None:
        body.append(_marker(ax, mark_k))
    return _document(title, body)

"""Deterministic JSON, CSV and SVG emission with a provenance header."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from typing import Any, Iterable, Sequence

TOOL = "tiltbench"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def header(config: dict, version: str) -> dict:
    return {"tool": TOOL, "version": version, "config_hash": config_hash(config)}


def to_json_text(head: dict, result: Any) -> str:
    return json.dumps({"header": head, "result": result}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_csv_text(head: dict, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    buf.write(f"# tool={head['tool']} version={head['version']} config_hash={head['config_hash']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if x is None else x for x in row])
    return buf.getvalue()


def decimal12(x: Fraction) -> str:
    """Fixed 12-digit decimal rendering, rounded half to even."""
    n = round(Fraction(x) * 10**12)
    sgn = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10**12)
    return f"{sgn}{whole}.{frac:012d}"


class Svg:
    """Minimal SVG writer mapping a rational data box onto a pixel viewport."""

    def __init__(self, head: dict, xlim: tuple[Fraction, Fraction], ylim: tuple[Fraction, Fraction],
                 width: int = 480, height: int = 360, margin: int = 40):
        self.head = head
        self.x0, self.x1 = (Fraction(v) for v in xlim)
        self.y0, self.y1 = (Fraction(v) for v in ylim)
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError("degenerate plot box")
        self.width, self.height, self.margin = width, height, margin
        self.items: list[str] = []

    def px(self, x: Fraction, y: Fraction) -> tuple[str, str]:
        m = self.margin
        sx = m + (Fraction(x) - self.x0) / (self.x1 - self.x0) * (self.width - 2 * m)
        sy = self.height - m - (Fraction(y) - self.y0) / (self.y1 - self.y0) * (self.height - 2 * m)
        return decimal12(sx), decimal12(sy)

    def polyline(self, points: Sequence[tuple[Fraction, Fraction]], stroke: str, cls: str = ""):
        pts = " ".join(",".join(self.px(x, y)) for x, y in points)
        self.items.append(f'<polyline class="{cls}" points="{pts}" fill="none" stroke="{stroke}"/>')

    def line(self, p: tuple[Fraction, Fraction], q: tuple[Fraction, Fraction], stroke: str, cls: str = ""):
        (x1, y1), (x2, y2) = self.px(*p), self.px(*q)
        self.items.append(
            f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}"/>'
        )

    def rect(self, lo: tuple[Fraction, Fraction], hi: tuple[Fraction, Fraction], fill: str, title: str = ""):
        (xa, ya), (xb, yb) = self.px(*lo), self.px(*hi)
        x, y = min(xa, xb, key=Fraction), min(ya, yb, key=Fraction)
        w = decimal12(abs(Fraction(xb) - Fraction(xa)))
        h = decimal12(abs(Fraction(yb) - Fraction(ya)))
        body = f"<title>{_escape(title)}</title>" if title else ""
        self.items.append(f'<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}">{body}</rect>')

    def text(self, x: Fraction, y: Fraction, s: str):
        px, py = self.px(x, y)
        self.items.append(f'<text x="{px}" y="{py}" font-size="10">{_escape(s)}</text>')

    def render(self) -> str:
        h = self.head
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f"<!-- tool={h['tool']} version={h['version']} config_hash={h['config_hash']} -->",
            f'<metadata>{_escape(canonical_json(h))}</metadata>',
            *self.items,
            "</svg>",
        ]
        return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def clip_line(A: Fraction, B: Fraction, C0: Fraction, box: tuple[Fraction, Fraction, Fraction, Fraction]):
    """Segment of A*y + B*x + C0 = 0 inside [x0, x1] x [y0, y1], or None."""
    x0, x1, y0, y1 = box
    pts = set()
    if A != 0:
        for x in (x0, x1):
            y = -(B * x + C0) / A
            if y0 <= y <= y1:
                pts.add((x, y))
    if B != 0:
        for y in (y0, y1):
            x = -(A * y + C0) / B
            if x0 <= x <= x1:
                pts.add((x, y))
    if not pts:
        return None
    ordered = sorted(pts)
    return ordered[0], ordered[-1]

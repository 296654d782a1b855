"""
Minimal SVG charts for the witness results: data points with one-sigma error
bars, an optional quantum-prediction curve and the classical bound at zero.
"""
from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 80
MARGIN_RIGHT = 30
MARGIN_TOP = 50
MARGIN_BOTTOM = 60

DATA_COLOR = '#f28e2b'
QUANTUM_COLOR = '#4e79a7'
BOUND_COLOR = '#e15759'

SVG_STYLE = """<style>
.axis { stroke:#333; stroke-width:1.2; }
.grid { stroke:#ddd; stroke-width:0.8; }
.label { font-family:Arial,sans-serif; font-size:13px; fill:#333; }
.tick { font-family:Arial,sans-serif; font-size:11px; fill:#555; }
.title { font-family:Arial,sans-serif; font-size:15px; font-weight:bold; fill:#222; }
</style>"""


@dataclass
class Series:
    x: Sequence[float]
    y: Sequence[float]
    yerr: Optional[Sequence[float]] = None


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    data: Series
    quantum: Optional[Series] = None
    bound: Optional[float] = 0.0

    def _limits(self):
        xs = np.asarray(self.data.x, dtype=float)
        ys = [np.asarray(self.data.y, dtype=float)]
        if self.data.yerr is not None:
            err = np.asarray(self.data.yerr, dtype=float)
            ys += [ys[0] - err, ys[0] + err]
        if self.quantum is not None:
            ys.append(np.asarray(self.quantum.y, dtype=float))
        if self.bound is not None:
            ys.append(np.array([self.bound]))
        y_all = np.concatenate(ys)
        y_min, y_max = float(y_all.min()), float(y_all.max())
        pad = 0.08 * (y_max - y_min or 1.0)
        return float(xs.min()) - 1, float(xs.max()) + 1, y_min - pad, y_max + pad

    def render(self) -> str:
        x_lo, x_hi, y_lo, y_hi = self._limits()
        plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        px = lambda x: MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w
        py = lambda y: MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg width="{WIDTH}" height="{HEIGHT}" xmlns="http://www.w3.org/2000/svg">',
            SVG_STYLE,
            f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" class="title">{escape(self.title)}</text>',
        ]

        for tick in np.linspace(y_lo, y_hi, 6):
            y = py(tick)
            out.append(f'<line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{WIDTH - MARGIN_RIGHT}" y2="{y:.2f}" class="grid"/>')
            out.append(f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" class="tick">{tick:.3g}</text>')
        for x_value in self.data.x:
            x = px(x_value)
            out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_BOTTOM + 18}" text-anchor="middle" class="tick">{x_value:g}</text>')

        out.append(f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{HEIGHT - MARGIN_BOTTOM}" class="axis"/>')
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{WIDTH - MARGIN_RIGHT}" y2="{HEIGHT - MARGIN_BOTTOM}" class="axis"/>')
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 18}" text-anchor="middle" class="label">{escape(self.xlabel)}</text>')
        out.append(
            f'<text x="20" y="{HEIGHT / 2:.1f}" text-anchor="middle" class="label" '
            f'transform="rotate(-90 20 {HEIGHT / 2:.1f})">{escape(self.ylabel)}</text>'
        )

        if self.bound is not None:
            y = py(self.bound)
            out.append(
                f'<line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{WIDTH - MARGIN_RIGHT}" y2="{y:.2f}" '
                f'stroke="{BOUND_COLOR}" stroke-width="1.5" stroke-dasharray="6,4"/>'
            )

        if self.quantum is not None:
            points = ' '.join(f'{px(x):.2f},{py(y):.2f}' for x, y in zip(self.quantum.x, self.quantum.y))
            out.append(f'<polyline points="{points}" fill="none" stroke="{QUANTUM_COLOR}" stroke-width="1.5"/>')

        errors = self.data.yerr if self.data.yerr is not None else [0.0] * len(self.data.x)
        for x_value, y_value, err in zip(self.data.x, self.data.y, errors):
            x = px(x_value)
            if err > 0:
                top, bottom = py(y_value + err), py(y_value - err)
                out.append(f'<line x1="{x:.2f}" y1="{top:.2f}" x2="{x:.2f}" y2="{bottom:.2f}" stroke="{DATA_COLOR}" stroke-width="1.5"/>')
                for cap in (top, bottom):
                    out.append(f'<line x1="{x - 4:.2f}" y1="{cap:.2f}" x2="{x + 4:.2f}" y2="{cap:.2f}" stroke="{DATA_COLOR}" stroke-width="1.5"/>')
            out.append(f'<circle cx="{x:.2f}" cy="{py(y_value):.2f}" r="3.5" fill="{DATA_COLOR}"/>')

        out.append('</svg>')
        return '\n'.join(out) + '\n'

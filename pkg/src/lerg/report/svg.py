"""Hand-rolled SVG rendering for heatmaps and metric curves.

String assembly instead of a plotting library keeps the output
byte-deterministic across platforms and reruns, which the artifact
contract requires. Coordinates are formatted to fixed precision, and
colors come from fixed palettes.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..evaluation import MetricCurve
from ..types import Example, ExplanationMatrix

CELL = 42
LEFT = 130
TOP = 56
BOTTOM = 96

# diverging endpoints: blue for negative, red for positive
_NEG = (59, 76, 192)
_POS = (180, 4, 38)

_PALETTE = ("#1b6ca8", "#c2453b", "#3f8f4f", "#8a5fbf", "#c28a1f", "#555555")


def _f(value: float) -> str:
    return f"{value:.2f}"


def _cell_color(value: float, scale: float) -> str:
    if scale == 0.0:
        return "rgb(255,255,255)"
    t = max(-1.0, min(1.0, value / scale))
    anchor = _POS if t >= 0 else _NEG
    t = abs(t)
    channels = tuple(round(255 + (c - 255) * t) for c in anchor)
    return f"rgb({channels[0]},{channels[1]},{channels[2]})"


def heatmap_svg(matrix: ExplanationMatrix, example: Example) -> str:
    """Attribution heatmap: input segments run horizontally, response
    segments vertically; color is symmetric around zero and normalized
    by the matrix's own max-abs (display-only scaling, annotated)."""
    m, n = matrix.m, matrix.n
    width = LEFT + CELL * m + 20
    height = TOP + CELL * n + BOTTOM
    scale = float(abs(matrix.phi).max())
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{LEFT}" y="20">method={escape(matrix.method.value)} example={escape(example.id)}</text>',
        f'<text x="{LEFT}" y="36" fill="#666">display scaling: color = value / {_f(scale)} (max|value|)</text>',
    ]
    for j in range(n):
        y = TOP + j * CELL
        label = escape(example.response.segments[j])
        parts.append(f'<text x="{LEFT - 8}" y="{y + CELL / 2 + 4:.1f}" text-anchor="end">{label}</text>')
        for i in range(m):
            x = LEFT + i * CELL
            value = float(matrix.phi[i, j])
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{_cell_color(value, scale)}" stroke="#ccc"><title>'
                f"{escape(example.context.segments[i])} / {escape(example.response.segments[j])}: {value!r}"
                f"</title></rect>"
            )
    base = TOP + n * CELL
    for i in range(m):
        x = LEFT + i * CELL + CELL / 2
        label = escape(example.context.segments[i])
        parts.append(
            f'<text x="{_f(x)}" y="{base + 14}" text-anchor="end" '
            f'transform="rotate(-45 {_f(x)} {base + 14})">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curves_svg(curves: list[tuple[str, MetricCurve]], title: str) -> str:
    """Line plot of metric curves over the ratio grid, one polyline per
    labeled curve."""
    width, height = 560, 360
    left, right, top, bottom = 70, 20, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    ratios = sorted({r for _, curve in curves for r in curve.ratios})
    values = [v for _, curve in curves for v in curve.values]
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    r_lo, r_hi = min(ratios), max(ratios)
    span = (r_hi - r_lo) or 1.0

    def px(ratio: float) -> float:
        return left + (ratio - r_lo) / span * plot_w

    def py(value: float) -> float:
        return top + (hi - value) / (hi - lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="22">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for ratio in ratios:
        x = px(ratio)
        parts.append(f'<line x1="{_f(x)}" y1="{top + plot_h}" x2="{_f(x)}" y2="{top + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{_f(x)}" y="{top + plot_h + 20}" text-anchor="middle">{_f(ratio)}</text>')
    for tick in range(5):
        value = lo + tick * (hi - lo) / 4
        y = py(value)
        parts.append(f'<line x1="{left - 5}" y1="{_f(y)}" x2="{left}" y2="{_f(y)}" stroke="black"/>')
        parts.append(f'<text x="{left - 8}" y="{_f(y + 4)}" text-anchor="end">{value:.3f}</text>')
    for idx, (label, curve) in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{_f(px(r))},{_f(py(v))}" for r, v in zip(curve.ratios, curve.values))
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>')
        for r, v in zip(curve.ratios, curve.values):
            parts.append(f'<circle cx="{_f(px(r))}" cy="{_f(py(v))}" r="3" fill="{color}"/>')
        ly = top + 16 * idx
        parts.append(f'<line x1="{left + plot_w - 120}" y1="{ly}" x2="{left + plot_w - 100}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + plot_w - 94}" y="{ly + 4}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

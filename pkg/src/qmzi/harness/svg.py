"""Minimal self-contained SVG line plots."""
import math
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#000000", "#9467bd", "#8c564b"]


def _ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_plot(series, *, title="", xlabel="", ylabel="", log_y=False, width=640, height=420):
    """Render {name: (xs, ys)} as an SVG document string, one polyline per series.

    Points with non-finite y (or y <= 0 on a log axis) are dropped.
    """
    margin_l, margin_r, margin_t, margin_b = 70, 150, 40, 55
    pw, ph = width - margin_l - margin_r, height - margin_t - margin_b

    def ty(y):
        return math.log10(y) if log_y else y

    pts = {}
    for name, (xs, ys) in series.items():
        keep = [(float(x), float(y)) for x, y in zip(xs, ys)
                if y is not None and math.isfinite(float(y)) and (not log_y or float(y) > 0)]
        pts[name] = keep
    allx = [x for p in pts.values() for x, _ in p] or [0.0, 1.0]
    ally = [ty(y) for p in pts.values() for _, y in p] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(x):
        return margin_l + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return margin_t + ph - (ty(y) - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text class="title" x="{margin_l + pw / 2:.1f}" y="24" text-anchor="middle" '
           f'font-size="15">{escape(title)}</text>',
           f'<line class="axis" x1="{margin_l}" y1="{margin_t + ph}" x2="{margin_l + pw}" '
           f'y2="{margin_t + ph}" stroke="black"/>',
           f'<line class="axis" x1="{margin_l}" y1="{margin_t}" x2="{margin_l}" '
           f'y2="{margin_t + ph}" stroke="black"/>']
    for xt in _ticks(x0, x1):
        out.append(f'<text x="{sx(xt):.1f}" y="{margin_t + ph + 18}" text-anchor="middle" '
                   f'font-size="11">{xt:.3g}</text>')
    for yt in _ticks(y0, y1):
        label = f"{10 ** yt:.3g}" if log_y else f"{yt:.3g}"
        ypix = margin_t + ph - (yt - y0) / (y1 - y0) * ph
        out.append(f'<text x="{margin_l - 6}" y="{ypix + 4:.1f}" text-anchor="end" '
                   f'font-size="11">{label}</text>')
    out.append(f'<text class="xlabel" x="{margin_l + pw / 2:.1f}" y="{height - 12}" '
               f'text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    out.append(f'<text class="ylabel" x="16" y="{margin_t + ph / 2:.1f}" text-anchor="middle" '
               f'font-size="13" transform="rotate(-90 16 {margin_t + ph / 2:.1f})">'
               f'{escape(ylabel)}</text>')
    for i, (name, p) in enumerate(pts.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
        out.append(f'<polyline class="series" data-series="{escape(name)}" fill="none" '
                   f'stroke="{color}" stroke-width="1.8" points="{coords}"/>')
        ly = margin_t + 14 + 18 * i
        out.append(f'<line x1="{margin_l + pw + 10}" y1="{ly}" x2="{margin_l + pw + 30}" '
                   f'y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{margin_l + pw + 35}" y="{ly + 4}" '
                   f'font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

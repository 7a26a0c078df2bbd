"""Minimal deterministic SVG line charts (no plotting dependency)."""

from __future__ import annotations

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 56, 16, 28, 40


def line_chart(path, xs, ys, title: str, color: str = "#1f6fb2") -> None:
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    iw, ih = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + iw * (x - x0) / (x1 - x0)

    def py(y):
        return _MT + ih * (1.0 - (y - y0) / (y1 - y0))

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{_ML}" y1="{_MT + ih}" x2="{_ML + iw}" y2="{_MT + ih}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + ih}" '
        'stroke="black" stroke-width="1"/>',
        f'<text x="{_ML}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x0:.6g}</text>',
        f'<text x="{_ML + iw}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x1:.6g}</text>',
        f'<text x="{_ML - 6}" y="{py(y0):.2f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y0:.6g}</text>',
        f'<text x="{_ML - 6}" y="{py(y1) + 10:.2f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y1:.6g}</text>',
        f'<polyline points="{pts}" fill="none" stroke="{color}" '
        'stroke-width="1.5"/>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")

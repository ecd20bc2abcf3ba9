"""SVG rendering of configurations as a hexagon tiling with feature
overlays.

Sites map to the plane by (x, y) -> (x + y/2, y * sqrt(3)/2); the Voronoi
cell of each site is a regular hexagon, so the six lattice neighbors are
exactly the six adjacent hexagons.  Output is deterministic: same
configuration and flags give identical bytes.
"""

from __future__ import annotations

import math

from .percolation import Configuration
from .features import feature_sets

SCALE = 14.0
HEX_R = SCALE / math.sqrt(3.0)

FILL_OPEN = "#f2ead9"
FILL_CLOSED = "#3d4351"
FILL_L = "#e4572e"
FILL_F = "#f3a712"
STROKE_GAMMA = "#1d7874"
FILL_Q = "#2337c6"
EDGE = "#9a948a"


def _center(x: int, y: int) -> tuple[float, float]:
    return (x + 0.5 * y) * SCALE, -y * (math.sqrt(3.0) / 2.0) * SCALE


def _hex_points(cx: float, cy: float) -> str:
    pts = []
    for k in range(6):
        a = math.pi / 6 + k * math.pi / 3
        pts.append(f"{cx + HEX_R * math.cos(a):.2f},{cy + HEX_R * math.sin(a):.2f}")
    return " ".join(pts)


def render_svg(config: Configuration, overlays: str = "") -> str:
    """SVG document for the configuration.

    ``overlays`` is a subset of "LFQG": fill the lowest crossing, fill the
    pioneering fringe, dot the pivotal sites, stroke the crossing path.
    """
    overlays = overlays.upper()
    bad = set(overlays) - set("LFQG")
    if bad:
        raise ValueError(f"unknown overlay flags: {''.join(sorted(bad))}")
    n = config.n
    feats = feature_sets(config) if overlays else None

    xs = []
    ys = []
    for y in (-n, n):
        for x in (-n, n):
            px, py = _center(x, y)
            xs.append(px)
            ys.append(py)
    pad = 2 * SCALE
    min_x, max_x = min(xs) - pad, max(xs) + pad
    min_y, max_y = min(ys) - pad, max(ys) + pad
    width = max_x - min_x
    height = max_y - min_y + 2.2 * SCALE  # room for the legend

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{min_x:.2f} {min_y:.2f} {width:.2f} {height:.2f}" '
        f'width="{width:.0f}" height="{height:.0f}">',
        f'<rect x="{min_x:.2f}" y="{min_y:.2f}" width="{width:.2f}" '
        f'height="{height:.2f}" fill="#ffffff"/>',
    ]
    for y in range(-n, n + 1):
        for x in range(-n, n + 1):
            cx, cy = _center(x, y)
            v = (x, y)
            if feats is not None and "L" in overlays and v in feats.L:
                fill = FILL_L
            elif feats is not None and "F" in overlays and v in feats.F:
                fill = FILL_F
            elif config.is_open(v):
                fill = FILL_OPEN
            else:
                fill = FILL_CLOSED
            parts.append(f'<polygon points="{_hex_points(cx, cy)}" '
                         f'fill="{fill}" stroke="{EDGE}" stroke-width="0.4"/>')
    if feats is not None and "G" in overlays and feats.gamma:
        pts = " ".join(f"{_center(x, y)[0]:.2f},{_center(x, y)[1]:.2f}"
                       for x, y in feats.gamma)
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{STROKE_GAMMA}" stroke-width="2.2"/>')
    if feats is not None and "Q" in overlays:
        for x, y in sorted(feats.Q):
            cx, cy = _center(x, y)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" '
                         f'r="{0.28 * SCALE:.2f}" fill="{FILL_Q}"/>')
    legend = [("open", FILL_OPEN), ("closed", FILL_CLOSED)]
    if "L" in overlays:
        legend.append(("lowest crossing", FILL_L))
    if "F" in overlays:
        legend.append(("pioneering fringe", FILL_F))
    if "Q" in overlays:
        legend.append(("pivotal", FILL_Q))
    lx = min_x + pad / 2
    ly = max_y + 1.2 * SCALE
    for name, color in legend:
        parts.append(f'<rect x="{lx:.2f}" y="{ly - 0.8 * SCALE:.2f}" '
                     f'width="{0.9 * SCALE:.2f}" height="{0.9 * SCALE:.2f}" '
                     f'fill="{color}" stroke="{EDGE}" stroke-width="0.4"/>')
        parts.append(f'<text x="{lx + 1.2 * SCALE:.2f}" y="{ly:.2f}" '
                     f'font-family="sans-serif" font-size="{0.85 * SCALE:.1f}">'
                     f'{name}</text>')
        lx += (len(name) * 0.55 + 3.2) * SCALE
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

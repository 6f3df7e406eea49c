"""Deterministic SVG rendering of shape space.

Draws the unit disk (with the dashed radius-1/2 circle), confidence
region clouds per level, markers for the observed / median / extreme
shapes, small triangle glyphs for those four shapes, and a legend.
Output is plain SVG 1.1 text with fixed number formatting, so a given
report always renders to identical bytes.
"""

from __future__ import annotations

from .shape import SideLengths, configuration_from_sides

_W, _H = 720, 520
_CX, _CY, _R = 260.0, 260.0, 220.0

_LEVEL_COLORS = ["#9ecae1", "#3182bd", "#08519c", "#041f4a"]
_MARKERS = [
    ("observed", "#d62728"),
    ("median", "#2ca02c"),
    ("max_tau", "#9467bd"),
    ("min_tau", "#ff7f0e"),
]


def _fmt(x: float) -> str:
    return format(x, ".3f")


def _to_canvas(u: float, v: float) -> tuple:
    return _CX + _R * u, _CY - _R * v


def _triangle_glyph(sides: SideLengths, cx: float, cy: float, half: float) -> str:
    """Triangle with the given side lengths fitted into a square glyph box."""
    lm = configuration_from_sides(sides).landmarks
    lm = lm - lm.mean(axis=0)
    span = max(abs(lm).max(), 1e-9)
    pts = []
    for x, y in lm:
        pts.append(f"{_fmt(cx + half * x / span)},{_fmt(cy - half * y / span)}")
    vertex_dots = "".join(
        f'<circle cx="{p.split(",")[0]}" cy="{p.split(",")[1]}" r="2.2" fill="{col}"/>'
        for p, col in zip(pts, ("#d62728", "#2ca02c", "#1f77b4"))
    )
    return (
        f'<polygon points="{" ".join(pts)}" fill="none" stroke="#333333" '
        f'stroke-width="1.2"/>{vertex_dots}'
    )


def render_shape_space_svg(
    observed: dict,
    regions: dict | None = None,
    title: str = "shape space",
) -> str:
    """Render a report-shaped payload to an SVG document string.

    ``observed`` needs keys u, v, a2, b2, c2; ``regions`` maps a level
    key to a dict with ``points`` (sequence of (u, v)) and the summary
    blocks ``median`` / ``max_tau`` / ``min_tau`` (u, v, a2, b2, c2).
    Regions may be empty or None, in which case only the disk and the
    observed marker are drawn.
    """
    regions = regions or {}
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_fmt(_CX)}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        # the disk and the dashed half-radius circle
        f'<circle cx="{_fmt(_CX)}" cy="{_fmt(_CY)}" r="{_fmt(_R)}" '
        f'fill="#fbfbfb" stroke="black" stroke-width="1.5"/>',
        f'<circle cx="{_fmt(_CX)}" cy="{_fmt(_CY)}" r="{_fmt(_R / 2)}" '
        f'fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="6,5"/>',
        f'<line x1="{_fmt(_CX - _R)}" y1="{_fmt(_CY)}" x2="{_fmt(_CX + _R)}" '
        f'y2="{_fmt(_CY)}" stroke="#dddddd" stroke-width="1"/>',
        f'<line x1="{_fmt(_CX)}" y1="{_fmt(_CY - _R)}" x2="{_fmt(_CX)}" '
        f'y2="{_fmt(_CY + _R)}" stroke="#dddddd" stroke-width="1"/>',
    ]

    # widest region first so narrower levels draw on top
    level_keys = sorted(regions, key=lambda k: -float(regions[k].get("level", k)))
    for i, key in enumerate(level_keys):
        color = _LEVEL_COLORS[min(i, len(_LEVEL_COLORS) - 1)]
        pts = regions[key].get("points", [])
        dots = []
        for u, v in pts:
            x, y = _to_canvas(float(u), float(v))
            dots.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.4" '
                        f'fill="{color}" fill-opacity="0.55"/>')
        parts.append(f'<g id="region-{key}">{"".join(dots)}</g>')

    # markers: observed plus the summaries of the narrowest region
    marks = {"observed": observed}
    if level_keys:
        inner = regions[level_keys[-1]]
        for name in ("median", "max_tau", "min_tau"):
            if inner.get(name):
                marks[name] = inner[name]

    glyph_x, glyph_y, glyph_step = _W - 150.0, 92.0, 108.0
    legend = []
    for i, (name, color) in enumerate(_MARKERS):
        blk = marks.get(name)
        if blk is None:
            continue
        x, y = _to_canvas(float(blk["u"]), float(blk["v"]))
        parts.append(
            f'<g id="marker-{name}">'
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4.5" fill="none" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<line x1="{_fmt(x - 6)}" y1="{_fmt(y)}" x2="{_fmt(x + 6)}" y2="{_fmt(y)}" '
            f'stroke="{color}" stroke-width="1"/>'
            f'<line x1="{_fmt(x)}" y1="{_fmt(y - 6)}" x2="{_fmt(x)}" y2="{_fmt(y + 6)}" '
            f'stroke="{color}" stroke-width="1"/></g>'
        )
        gy = glyph_y + len(legend) * glyph_step
        sides = SideLengths(float(blk["a2"]), float(blk["b2"]), float(blk["c2"]))
        parts.append(
            f'<g id="glyph-{name}">'
            f'<rect x="{_fmt(glyph_x - 46)}" y="{_fmt(gy - 46)}" width="92" height="92" '
            f'fill="none" stroke="#cccccc" stroke-width="1"/>'
            + _triangle_glyph(sides, glyph_x, gy, 36.0)
            + f'<text x="{_fmt(glyph_x)}" y="{_fmt(gy + 60)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" fill="{color}">{name}</text></g>'
        )
        legend.append(name)

    # legend for the region levels
    ly = _H - 40.0
    for i, key in enumerate(level_keys):
        color = _LEVEL_COLORS[min(i, len(_LEVEL_COLORS) - 1)]
        lx = 40.0 + 140.0 * i
        parts.append(
            f'<g id="legend-{key}">'
            f'<circle cx="{_fmt(lx)}" cy="{_fmt(ly)}" r="4" fill="{color}"/>'
            f'<text x="{_fmt(lx + 10)}" y="{_fmt(ly + 4)}" font-family="sans-serif" '
            f'font-size="12">level {key}</text></g>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_from_report(report: dict, ensemble_points: dict | None = None) -> str:
    """Adapt a report dictionary (plus optional per-level point arrays)."""
    regions = {}
    for key, blk in report.get("regions", {}).items():
        regions[key] = {
            "level": blk["level"],
            "points": (ensemble_points or {}).get(key, []),
            "median": blk["median"],
            "max_tau": blk["max_tau"],
            "min_tau": blk["min_tau"],
        }
    title = "shape space: " + ", ".join(report["config"]["feature_columns"])
    return render_shape_space_svg(report["observed"], regions, title=title)


def glyph_count(svg: str) -> int:
    """Number of triangle glyph groups in a rendered document (test aid)."""
    return svg.count('<g id="glyph-')


def is_well_formed_xml(svg: str) -> bool:
    import xml.etree.ElementTree as ET

    try:
        ET.fromstring(svg)
        return True
    except ET.ParseError:
        return False

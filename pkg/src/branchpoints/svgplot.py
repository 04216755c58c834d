"""Minimal deterministic SVG writers for the CLI plots.

Hand-rolled on purpose: byte-stable output across runs, no plotting
dependency.  Every figure has a CSV twin written by the CLI carrying the
same data.
"""

from __future__ import annotations

import math

from .ioutil import atomic_write_text

FAMILY_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _header(size):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n'
            f'<rect width="{size}" height="{size}" fill="white"/>\n')


def _fmt(x):
    return f"{x:.3f}"


def star_plot(families, path, size=480, title=""):
    """Direction star: one ray per (angle, multiplicity), colored by family.

    families: list of (label, [(angle, count), ...]) in drawing order.
    """
    c = size / 2
    r_out = 0.42 * size
    parts = [_header(size)]
    parts.append(f'<circle cx="{c}" cy="{c}" r="{_fmt(r_out)}" fill="none" '
                 f'stroke="#cccccc" stroke-width="1"/>\n')
    for fam_idx, (label, rays) in enumerate(families):
        color = FAMILY_COLORS[fam_idx % len(FAMILY_COLORS)]
        for angle, count in rays:
            x = c + r_out * math.cos(angle)
            y = c - r_out * math.sin(angle)
            width = 1.0 + 0.8 * (count - 1)
            parts.append(f'<line x1="{c}" y1="{c}" x2="{_fmt(x)}" y2="{_fmt(y)}" '
                         f'stroke="{color}" stroke-width="{_fmt(width)}"/>\n')
        parts.append(f'<text x="8" y="{16 + 14 * fam_idx}" font-size="12" '
                     f'fill="{color}">{label}</text>\n')
    if title:
        parts.append(f'<text x="{c}" y="{size - 8}" font-size="12" fill="#333333" '
                     f'text-anchor="middle">{title}</text>\n')
    parts.append("</svg>\n")
    atomic_write_text(path, "".join(parts))


def curve_plot(curves, r_max, path, size=480, title=""):
    """Traced curves in the wrap plane, colored by family."""
    c = size / 2
    scale = 0.45 * size / r_max
    parts = [_header(size)]
    parts.append(f'<circle cx="{c}" cy="{c}" r="{_fmt(scale * r_max)}" fill="none" '
                 f'stroke="#cccccc" stroke-width="1"/>\n')
    seen_labels = set()
    for curve in curves:
        color = FAMILY_COLORS[(curve.k - 1) % len(FAMILY_COLORS)]
        pts = " ".join(f"{_fmt(c + scale * w.real)},{_fmt(c - scale * w.imag)}"
                       for w in curve.w)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1"/>\n')
        label = f"family k={curve.k}"
        if label not in seen_labels:
            seen_labels.add(label)
            parts.append(f'<text x="8" y="{16 + 14 * (curve.k - 1)}" font-size="12" '
                         f'fill="{color}">{label}</text>\n')
    if title:
        parts.append(f'<text x="{c}" y="{size - 8}" font-size="12" fill="#333333" '
                     f'text-anchor="middle">{title}</text>\n')
    parts.append("</svg>\n")
    atomic_write_text(path, "".join(parts))

"""Deterministic SVG output for tile collections and point clouds.

Output bytes depend only on the input data: tiles are emitted in the given
order, floats are printed with nine significant digits (the platform's
round-half-even binary-to-decimal conversion), and no timestamps or
identifiers are embedded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Polygon
from .sifs import AddressedTile

#: one fill per leading address symbol
PALETTE = (
    "#4477aa",
    "#ee6677",
    "#228833",
    "#ccbb44",
    "#66ccee",
    "#aa3377",
    "#bbbbbb",
    "#994455",
)


@dataclass
class RenderSpec:
    colors: Sequence[str] = PALETTE
    stroke: str = "#222222"
    stroke_width_fraction: float = 0.004  # of the viewport diagonal
    pad_fraction: float = 0.02
    width_px: int = 800
    point_radius_fraction: float = 0.0015


def _fmt(x: float) -> str:
    out = format(float(x), ".9g")
    # normalise negative zero for byte stability
    return "0" if out == "-0" else out


def _viewport(xs: np.ndarray, ys: np.ndarray, spec: RenderSpec):
    min_x, max_x = float(xs.min()), float(xs.max())
    min_y, max_y = float(ys.min()), float(ys.max())
    span_x = max_x - min_x
    span_y = max_y - min_y
    pad = spec.pad_fraction * max(span_x, span_y, 1e-9)
    min_x -= pad
    min_y -= pad
    span_x += 2 * pad
    span_y += 2 * pad
    return min_x, min_y, span_x, span_y


def _document(body: list[str], box, spec: RenderSpec) -> str:
    min_x, min_y, span_x, span_y = box
    height = spec.width_px * span_y / span_x if span_x > 0 else spec.width_px
    head = (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(spec.width_px)}" height="{_fmt(height)}" '
        f'viewBox="{_fmt(min_x)} {_fmt(min_y)} {_fmt(span_x)} {_fmt(span_y)}">'
    )
    return "\n".join([head] + body + ["</svg>", ""])


def render_svg(
    tiles: Sequence[AddressedTile],
    prototiles: Polygon | Sequence[Polygon],
    spec: RenderSpec | None = None,
) -> str:
    """One path per tile, filled by the first address symbol.

    The y axis is flipped so the mathematical orientation is preserved on
    screen.  Identical inputs give byte-identical documents.
    """
    if not tiles:
        raise ValueError("nothing to render: empty tile list")
    spec = spec or RenderSpec()
    protos = (prototiles,) if isinstance(prototiles, Polygon) else tuple(prototiles)
    proto_floats = [p.float_vertices() for p in protos]
    polys = []
    for t in tiles:
        a, reflect, tr = t.transform.affine_floats()
        base = np.conj(proto_floats[t.prototile]) if reflect else proto_floats[t.prototile]
        img = a * base + tr
        polys.append((t, img))
    all_pts = np.concatenate([img for _, img in polys])
    box = _viewport(all_pts.real, -all_pts.imag, spec)
    stroke_w = spec.stroke_width_fraction * (box[2] ** 2 + box[3] ** 2) ** 0.5
    body = []
    for t, img in polys:
        coords = " ".join(f"{_fmt(z.real)},{_fmt(-z.imag)}" for z in img)
        first = t.address[0] if t.address else 1
        fill = spec.colors[(first - 1) % len(spec.colors)]
        body.append(
            f'<polygon points="{coords}" fill="{fill}" '
            f'stroke="{spec.stroke}" stroke-width="{_fmt(stroke_w)}"/>'
        )
    return _document(body, box, spec)


def render_cloud(points, spec: RenderSpec | None = None) -> str:
    """One marker per point; deterministic for identical inputs."""
    spec = spec or RenderSpec()
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size == 0:
        raise ValueError("nothing to render: empty point set")
    xs = pts.real
    ys = -pts.imag
    box = _viewport(xs, ys, spec)
    radius = max(spec.point_radius_fraction * max(box[2], box[3]), 1e-9)
    body = [
        f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(radius)}" fill="#223355"/>'
        for x, y in zip(xs, ys)
    ]
    return _document(body, box, spec)

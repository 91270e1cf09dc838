"""Deterministic image and report emitters.

Grids become binary PGM (grayscale) or PPM (color) rasters, or a small
SVG subset (rect, polygon, text).  The binary formats carry no
timestamps or encoder state, so identical inputs give identical bytes,
which makes golden-file testing trivial.  Hexagonal grids stagger odd
rows half a cell and draw flat-top hexagons in SVG.
"""

from dataclasses import dataclass, replace

import numpy as np

from .analysis import ColorGrid, LinkProfile
from .somcore import HEXA, RECT, GridTopology
from .util import format_real

PGM = "pgm"
PPM = "ppm"
SVG = "svg"

_FORMATS = (PGM, PPM, SVG)


@dataclass
class ImageSpec:
    """Rendering knobs: cell edge in pixels, output format, lattice."""

    cell_px: int = 24
    format: str = PGM
    lattice: str = RECT

    def __post_init__(self):
        if self.cell_px < 1:
            raise ValueError("cell_px must be positive")
        if self.format not in _FORMATS:
            raise ValueError("format must be one of %s" % (_FORMATS,))
        if self.lattice not in (HEXA, RECT):
            raise ValueError("lattice must be hexa or rect")


def units_to_grid(values, topology: GridTopology):
    """Reshape a per-unit sequence into (ysize, xsize) plus a mask.

    None entries become masked cells.
    """
    if len(values) != topology.n_units:
        raise ValueError(
            "expected %d per-unit values, got %d" % (topology.n_units, len(values))
        )
    grid = np.zeros((topology.ysize, topology.xsize))
    mask = np.zeros((topology.ysize, topology.xsize), dtype=bool)
    for unit, value in enumerate(values):
        col, row = topology.unit_coords(unit)
        if value is not None:
            grid[row, col] = float(value)
            mask[row, col] = True
    return grid, mask


def _gray_levels(values: np.ndarray, mask: np.ndarray, invert: bool) -> np.ndarray:
    """Min-max scale masked values to 0..255 (constant grid stays at 128)."""
    if not mask.any():
        raise ValueError("every cell is masked; nothing to render")
    present = values[mask]
    vmin, vmax = float(present.min()), float(present.max())
    if vmax == vmin:
        levels = np.full(values.shape, 128.0)
    else:
        levels = np.floor((values - vmin) / (vmax - vmin) * 255.0 + 0.5)
    if invert:
        levels = 255.0 - levels
    levels = np.where(mask, levels, 0.0)
    return levels.astype(np.uint8)


def _cell_origin(x: int, y: int, spec: ImageSpec) -> tuple[int, int]:
    offset = spec.cell_px // 2 if spec.lattice == HEXA and y % 2 == 1 else 0
    return x * spec.cell_px + offset, y * spec.cell_px


def _image_size(width: int, height: int, spec: ImageSpec) -> tuple[int, int]:
    stagger = spec.cell_px // 2 if spec.lattice == HEXA and height > 1 else 0
    return width * spec.cell_px + stagger, height * spec.cell_px


def _hexagon_points(x0: float, y0: float, s: float) -> str:
    # flat-top hexagon inscribed in the s-by-s cell box
    pts = [
        (x0 + 0.25 * s, y0),
        (x0 + 0.75 * s, y0),
        (x0 + s, y0 + 0.5 * s),
        (x0 + 0.75 * s, y0 + s),
        (x0 + 0.25 * s, y0 + s),
        (x0, y0 + 0.5 * s),
    ]
    return " ".join("%s,%s" % (format_real(px), format_real(py)) for px, py in pts)


def _svg_open(w: int, h: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="%d" height="%d" viewBox="0 0 %d %d">' % (w, h, w, h),
    ]


def _svg_cell(x: int, y: int, spec: ImageSpec, fill: str, stroke: str | None = None) -> str:
    x0, y0 = _cell_origin(x, y, spec)
    s = spec.cell_px
    stroke_attr = ' stroke="%s"' % stroke if stroke else ""
    if spec.lattice == HEXA:
        return '<polygon points="%s" fill="%s"%s/>' % (
            _hexagon_points(x0, y0, s), fill, stroke_attr,
        )
    return '<rect x="%d" y="%d" width="%d" height="%d" fill="%s"%s/>' % (
        x0, y0, s, s, fill, stroke_attr,
    )


def _svg_star(x: int, y: int, spec: ImageSpec) -> str:
    x0, y0 = _cell_origin(x, y, spec)
    s = spec.cell_px
    return (
        '<text x="%s" y="%s" font-size="%d" text-anchor="middle">*</text>'
        % (format_real(x0 + s / 2), format_real(y0 + 0.75 * s), max(s - 2, 4))
    )


def render_gray(values, mask, spec: ImageSpec, invert: bool = False) -> bytes:
    """Render a masked real grid as a grayscale image.

    Values are min-max scaled to 0..255.  ``invert=True`` flips the ramp
    so small values come out light; use it for U-Matrices, where clusters
    should read as bright basins between dark ridges.  Masked cells are
    black in PGM and a white cell with an asterisk in SVG.
    """
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if values.shape != mask.shape or values.ndim != 2:
        raise ValueError("values and mask must be matching 2-D arrays")
    levels = _gray_levels(values, mask, invert)
    h, w = values.shape
    if spec.format == SVG:
        parts = _svg_open(*_image_size(w, h, spec))
        for y in range(h):
            for x in range(w):
                if mask[y, x]:
                    level = int(levels[y, x])
                    parts.append(_svg_cell(x, y, spec, "rgb(%d,%d,%d)" % (level, level, level)))
                else:
                    parts.append(_svg_cell(x, y, spec, "rgb(255,255,255)"))
                    parts.append(_svg_star(x, y, spec))
        parts.append("</svg>")
        return ("\n".join(parts) + "\n").encode("utf-8")
    if spec.format != PGM:
        raise ValueError("gray grids render as pgm or svg, not %s" % spec.format)
    img_w, img_h = _image_size(w, h, spec)
    img = np.zeros((img_h, img_w), dtype=np.uint8)
    s = spec.cell_px
    for y in range(h):
        for x in range(w):
            x0, y0 = _cell_origin(x, y, spec)
            img[y0:y0 + s, x0:x0 + s] = levels[y, x]
    return b"P5\n%d %d\n255\n" % (img_w, img_h) + img.tobytes()


def render_color(grid: ColorGrid, topology: GridTopology, spec: ImageSpec) -> bytes:
    """Render per-unit colors as PPM or SVG.

    Uncolored units draw white with a gray outline.
    """
    if len(grid.colors) != topology.n_units:
        raise ValueError("color grid does not match the topology")
    if spec.lattice != topology.lattice:
        spec = replace(spec, lattice=topology.lattice)
    h, w = topology.ysize, topology.xsize
    cells: list[list[tuple[int, int, int] | None]] = [
        [None] * w for _ in range(h)
    ]
    for unit, color in enumerate(grid.colors):
        col, row = topology.unit_coords(unit)
        cells[row][col] = color
    if spec.format == SVG:
        parts = _svg_open(*_image_size(w, h, spec))
        for y in range(h):
            for x in range(w):
                color = cells[y][x]
                if color is None:
                    parts.append(
                        _svg_cell(x, y, spec, "rgb(255,255,255)", stroke="rgb(128,128,128)")
                    )
                else:
                    parts.append(_svg_cell(x, y, spec, "rgb(%d,%d,%d)" % color))
        parts.append("</svg>")
        return ("\n".join(parts) + "\n").encode("utf-8")
    if spec.format != PPM:
        raise ValueError("color grids render as ppm or svg, not %s" % spec.format)
    img_w, img_h = _image_size(w, h, spec)
    img = np.zeros((img_h, img_w, 3), dtype=np.uint8)
    s = spec.cell_px
    for y in range(h):
        for x in range(w):
            x0, y0 = _cell_origin(x, y, spec)
            block = img[y0:y0 + s, x0:x0 + s]
            color = cells[y][x]
            if color is None:
                block[:, :] = (255, 255, 255)
                block[0, :] = block[-1, :] = (128, 128, 128)
                block[:, 0] = block[:, -1] = (128, 128, 128)
            else:
                block[:, :] = color
    return b"P6\n%d %d\n255\n" % (img_w, img_h) + img.tobytes()


def text_report(values, mask) -> str:
    """Fixed-width text table of a masked grid; '*' marks masked cells."""
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    lines = []
    for row_values, row_mask in zip(values, mask):
        tokens = [
            ("%.6g" % v if m else "*").rjust(10)
            for v, m in zip(row_values, row_mask)
        ]
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"


def render_profile(profile: LinkProfile, spec: ImageSpec) -> bytes:
    """Render link profiles as an SVG bar chart, one row per node.

    Bar heights are proportional to relative link strength; component
    labels run along the bottom axis.  Rows whose profile is all zero
    show just the row label and baseline.
    """
    if not profile.rows:
        raise ValueError("no profiles selected")
    s = spec.cell_px
    dim = len(profile.component_labels)
    label_w = 6 * s
    bar_h = 4 * s
    gap = s
    axis_h = 4 * s
    width = label_w + dim * s + s
    height = len(profile.rows) * (bar_h + gap) + axis_h
    parts = _svg_open(width, height)
    parts.append(
        '<text x="2" y="%d" font-size="%d">%s links</text>'
        % (s, max(s // 2, 8), profile.direction)
    )
    font = max(s // 2, 8)
    for r, (label, vector) in enumerate(profile.rows):
        base = (r + 1) * (bar_h + gap)
        parts.append(
            '<rect x="%d" y="%d" width="%d" height="1" fill="rgb(0,0,0)"/>'
            % (label_w, base, dim * s)
        )
        parts.append(
            '<text x="2" y="%d" font-size="%d">%s</text>' % (base, font, label)
        )
        for j, value in enumerate(vector):
            if value <= 0:
                continue
            bh = float(value) * bar_h
            parts.append(
                '<rect x="%s" y="%s" width="%s" height="%s" fill="rgb(70,130,180)"/>'
                % (
                    format_real(label_w + j * s + 0.1 * s),
                    format_real(base - bh),
                    format_real(0.8 * s),
                    format_real(bh),
                )
            )
    axis_y = height - axis_h + font
    for j, name in enumerate(profile.component_labels):
        cx = label_w + j * s + s // 2
        parts.append(
            '<text x="%d" y="%d" font-size="%d" transform="rotate(60 %d %d)">%s</text>'
            % (cx, axis_y, font, cx, axis_y, name)
        )
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")

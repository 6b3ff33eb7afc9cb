"""Shaded raster output: per-segment colors with cushion-style profiles.

Every maximal same-label run of cells along an axis carries a quadratic
height profile: ramps of width ``w`` rising to ``h`` (segments) or
falling to ``-h`` (separators) with a flat plateau between them.  The
surface normal at a pixel combines the x-run and y-run profiles and is
Lambert-shaded with a fixed light, which outlines every region boundary
independently of the color choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .labels import BACKGROUND, CROSSING
from .state import CellState


def _unit(v: tuple[float, float, float]) -> tuple[float, float, float]:
    n = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    return (v[0] / n, v[1] / n, v[2] / n)


# A categorical palette of 20 distinguishable colors.
DEFAULT_COLORS = [
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
    (188, 189, 34), (23, 190, 207), (174, 199, 232), (255, 187, 120),
    (152, 223, 138), (255, 152, 150), (197, 176, 213), (196, 156, 148),
    (247, 182, 210), (199, 199, 199), (219, 219, 141), (158, 218, 229),
]


def default_palette(labels) -> dict[int, tuple[int, int, int]]:
    """Assign every segment id a color, perturbing luminance beyond 20."""
    palette = {}
    for i, label in enumerate(sorted(labels)):
        r, g, b = DEFAULT_COLORS[i % len(DEFAULT_COLORS)]
        cycle = i // len(DEFAULT_COLORS)
        if cycle:
            scale = 0.7 ** cycle
            r, g, b = (int(r * scale), int(g * scale), int(b * scale))
        palette[label] = (r, g, b)
    return palette


def load_palette(path) -> dict[int, tuple[int, int, int]]:
    """Read a palette file: one ``label #RRGGBB`` pair per line."""
    palette = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            label, color = line.split()
            color = color.lstrip("#")
            palette[int(label)] = (int(color[0:2], 16),
                                   int(color[2:4], 16),
                                   int(color[4:6], 16))
    return palette


@dataclass
class ShadingProfile:
    """Geometry and lighting of the cushion shading."""

    h: float = 1.0
    r: int = 8                       # pixels per cell
    w: float | None = None           # ramp width in pixels; default 0.5 * r
    light_direction: tuple[float, float, float] = _unit((-1.0, -1.0, 2.0))
    separator_color: tuple[int, int, int] = (60, 60, 60)
    crossing_color: tuple[int, int, int] = (10, 10, 10)
    palette: dict[int, tuple[int, int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("pixels per cell must be >= 1")
        if self.h <= 0:
            raise ValueError("height must be positive")
        if self.w is None:
            self.w = 0.5 * self.r
        if self.w <= 0:
            raise ValueError("ramp width must be positive")


def shading_coefficients(x1: float, x2: float, x: float,
                         profile: ShadingProfile,
                         is_separator: bool) -> tuple[float, float]:
    """(a, b) of the quadratic profile for one axis position in a run.

    The slope at ``x`` is 2(a*x + b): zero in the plateau, linear in the
    entry ramp [x1, x1+w] and exit ramp [x2-w, x2].  Separators flip the
    sign so their profile is a valley reaching -h.
    """
    s = -1.0 if is_separator else 1.0
    w = min(profile.w, (x2 - x1) / 2)
    if w <= 0:
        return 0.0, 0.0
    k = s * profile.h / (w * w)
    if x <= x1 + w:
        return -k, k * (x1 + w)
    if x >= x2 - w:
        return -k, k * (x2 - w)
    return 0.0, 0.0


def run_height(x1: float, x2: float, x: float, profile: ShadingProfile,
               is_separator: bool) -> float:
    """Height z(x) of the run's profile (0 at both boundaries, +-h on the
    plateau); integral of the slope 2(a*x + b)."""
    s = -1.0 if is_separator else 1.0
    w = min(profile.w, (x2 - x1) / 2)
    if w <= 0:
        return 0.0
    k = s * profile.h / (w * w)
    if x <= x1 + w:
        d = x - x1
        return k * d * (2 * w - d)
    if x >= x2 - w:
        d = x2 - x
        return k * d * (2 * w - d)
    return s * profile.h


def normal_at(pixel: tuple[float, float],
              x_run: tuple[float, float], y_run: tuple[float, float],
              profile: ShadingProfile,
              is_separator: bool) -> tuple[float, float, float]:
    """Unit normal (2(ax+b), 2(ay+c), 1) of the combined run profiles."""
    x, y = pixel
    a, b = shading_coefficients(x_run[0], x_run[1], x, profile, is_separator)
    a2, c = shading_coefficients(y_run[0], y_run[1], y, profile, is_separator)
    return _unit((2 * (a * x + b), 2 * (a2 * y + c), 1.0))


def _runs(line: np.ndarray):
    """Maximal same-label runs (start, stop exclusive) along one line."""
    breaks = np.flatnonzero(line[1:] != line[:-1]) + 1
    edges = np.concatenate(([0], breaks, [line.size]))
    return zip(edges[:-1], edges[1:])


def _slope_field(labels: np.ndarray, profile: ShadingProfile) -> np.ndarray:
    """Per-pixel slope 2(a*x+b) of the x-axis profile for each pixel row."""
    height, width = labels.shape
    out = np.zeros((height, width))
    for row in range(height):
        line = labels[row]
        for start, stop in _runs(line):
            label = int(line[start])
            xs = np.arange(start, stop, dtype=float) + 0.5
            x1, x2 = float(start), float(stop)
            sep = label == BACKGROUND
            s = -1.0 if sep else 1.0
            w = min(profile.w, (x2 - x1) / 2)
            if w <= 0:
                continue
            k = s * profile.h / (w * w)
            slope = np.zeros(xs.size)
            entry = xs <= x1 + w
            exit_ = xs >= x2 - w
            slope[entry] = 2 * (-k * xs[entry] + k * (x1 + w))
            slope[exit_] = 2 * (-k * xs[exit_] + k * (x2 - w))
            out[row, start:stop] = slope
    return out


def render_image(cs: CellState, profile: ShadingProfile | None = None) -> np.ndarray:
    """Expand each cell to r x r shaded pixels; returns uint8 RGB array."""
    profile = profile or ShadingProfile()
    labels = np.repeat(np.repeat(cs.cells, profile.r, axis=0),
                       profile.r, axis=1)
    palette = profile.palette or default_palette(
        np.unique(cs.cells[cs.cells >= 0]).tolist())
    present = set(np.unique(cs.cells[cs.cells >= 0]).tolist())
    missing = present - set(palette)
    if missing:
        raise KeyError(f"palette misses labels {sorted(missing)}")

    slope_x = _slope_field(labels, profile)
    slope_y = _slope_field(labels.T, profile).T
    inv_norm = 1.0 / np.sqrt(slope_x ** 2 + slope_y ** 2 + 1.0)
    lx, ly, lz = profile.light_direction
    lambert = np.maximum(0.0, (slope_x * lx + slope_y * ly + lz) * inv_norm)

    base = np.zeros((*labels.shape, 3), dtype=np.float64)
    base[labels == BACKGROUND] = profile.separator_color
    base[labels == CROSSING] = profile.crossing_color
    for label in present:
        base[labels == label] = palette[label]
    rgb = np.clip(base * lambert[..., None], 0, 255).astype(np.uint8)
    return rgb


def save_image(image: np.ndarray, path, fmt: str = "png") -> None:
    """Write the RGB array as PNG (Pillow) or as a binary PPM (P6)."""
    if fmt == "ppm":
        with open(path, "wb") as fh:
            fh.write(f"P6\n{image.shape[1]} {image.shape[0]}\n255\n"
                     .encode("ascii"))
            fh.write(image.tobytes())
        return
    from PIL import Image
    Image.fromarray(image, "RGB").save(path, format=fmt.upper())

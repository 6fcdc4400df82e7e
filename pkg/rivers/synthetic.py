"""
Synthetic rivers and river beds.

Analytic river shapes are built as shapely polygons and rasterized at cell
centers. Polygons run past the map frame at both ends so the river's inlet
and outlet touch the border; from_mask then closes the border and the open
ends become the openings.
"""
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon

from . import geometry
from .river_map import RiverMap, rasterize


@dataclass(frozen=True, eq=False)
class SyntheticRiver:
    """
    A rasterized analytic river.

    Fields:
    - river_map: the rasterized map
    - start: a start point at the first end of the analytic centerline
    - centerline: analytic centerline clipped to the map frame
    - nominal_width: the width the shape was built with (mean for varying widths)
    """

    river_map: RiverMap
    start: np.ndarray
    centerline: np.ndarray
    nominal_width: float

    @property
    def end(self):
        return self.centerline[-1].copy()


def band_polygon(centerline, half_widths):
    """Polygon bounded by the normal offsets of ``centerline`` on both sides."""
    centerline = geometry.as_points(centerline)
    half_widths = np.broadcast_to(np.asarray(half_widths, dtype=float), (len(centerline),))
    tangents = np.gradient(centerline, axis=0)
    tangents /= np.hypot(*tangents.T)[:, None]
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])
    left = centerline + normals * half_widths[:, None]
    right = centerline - normals * half_widths[:, None]
    return Polygon(np.vstack([left, right[::-1]])).buffer(0)


def _half_height(reach, resolution):
    # Frame edges stay on the cell lattice and leave room above and below the river.
    return (np.ceil(reach / resolution) + 6) * resolution


def _build(centerline, half_widths, bounds, resolution, nominal_width):
    polygon = band_polygon(centerline, half_widths)
    mask, transform = rasterize(polygon, resolution, bounds)
    river_map = RiverMap.from_mask(mask, resolution, transform)
    minx, miny, maxx, maxy = bounds
    inside = (
        (centerline[:, 0] >= minx) & (centerline[:, 0] <= maxx)
        & (centerline[:, 1] >= miny) & (centerline[:, 1] <= maxy)
    )
    clipped = centerline[inside]
    return SyntheticRiver(river_map, clipped[0].copy(), clipped, float(nominal_width))


def _along_x(length, resolution):
    overshoot = 10 * resolution
    return np.arange(-overshoot, length + overshoot + resolution / 4, resolution / 2)


def rectangle(length=1000.0, width=90.0, resolution=3.0):
    """Straight west-east river of constant width centered on y = 0."""
    x = _along_x(length, resolution)
    centerline = np.column_stack([x, np.zeros_like(x)])
    half = _half_height(width / 2, resolution)
    return _build(centerline, width / 2, (0.0, -half, length, half), resolution, width)


def taper(length=1000.0, start_width=120.0, end_width=60.0, resolution=3.0):
    """Straight river whose width changes linearly from ``start_width`` to ``end_width``."""
    x = _along_x(length, resolution)
    centerline = np.column_stack([x, np.zeros_like(x)])
    widths = np.interp(x, [0.0, length], [start_width, end_width])
    half = _half_height(max(start_width, end_width) / 2, resolution)
    return _build(centerline, widths / 2, (0.0, -half, length, half), resolution, 0.5 * (start_width + end_width))


def widening(widths=(60.0, 90.0, 120.0), length=1500.0, resolution=3.0, transition=60.0):
    """Straight river stepping through ``widths`` in equal stretches with smooth transitions."""
    x = _along_x(length, resolution)
    centerline = np.column_stack([x, np.zeros_like(x)])
    stretch = length / len(widths)
    profile = np.full_like(x, widths[0])
    for i in range(1, len(widths)):
        ramp = 0.5 * (1 + np.tanh((x - i * stretch) / (transition / 4)))
        profile += (widths[i] - widths[i - 1]) * ramp
    half = _half_height(max(widths) / 2, resolution)
    return _build(centerline, profile / 2, (0.0, -half, length, half), resolution, float(np.mean(widths)))


def sine(amplitude=50.0, wavelength=500.0, width=80.0, length=1000.0, resolution=2.0, width_fn=None):
    """
    Meandering river with centerline y = amplitude * sin(2*pi*x / wavelength).

    ``width_fn(x)`` overrides the constant width.
    """
    x = _along_x(length, resolution)
    centerline = np.column_stack([x, amplitude * np.sin(2 * np.pi * x / wavelength)])
    widths = np.full_like(x, width) if width_fn is None else np.asarray(width_fn(x), dtype=float)
    half = _half_height(abs(amplitude) + widths.max() / 2, resolution)
    return _build(centerline, widths / 2, (0.0, -half, length, half), resolution, float(np.mean(widths)))


def quarter_annulus(inner=100.0, outer=180.0, resolution=1.0):
    """
    Quarter bend around the origin between radii ``inner`` and ``outer``.

    The river enters across y = 0 and leaves across x = 0.
    """
    overshoot = 0.1
    angles = np.linspace(-overshoot, np.pi / 2 + overshoot, 2000)
    outer_arc = outer * np.column_stack([np.cos(angles), np.sin(angles)])
    inner_arc = inner * np.column_stack([np.cos(angles), np.sin(angles)])
    polygon = Polygon(np.vstack([outer_arc, inner_arc[::-1]]))
    extent = (np.ceil(outer / resolution) + 10) * resolution
    mask, transform = rasterize(polygon, resolution, (0.0, 0.0, extent, extent))
    river_map = RiverMap.from_mask(mask, resolution, transform)
    middle = 0.5 * (inner + outer)
    quarter = np.linspace(0.0, np.pi / 2, 500)
    centerline = middle * np.column_stack([np.cos(quarter), np.sin(quarter)])
    return SyntheticRiver(river_map, centerline[0].copy(), centerline, outer - inner)


def centerline_from_curvature(pieces, step, origin=(0.0, 0.0), heading=0.0):
    """
    Integrate a centerline from ``(length, curvature)`` pieces.

    Returns points every ``step`` meters starting at ``origin`` with initial
    ``heading`` in radians.
    """
    curvatures = np.concatenate([np.full(max(int(round(length / step)), 1), kappa) for length, kappa in pieces])
    headings = heading + np.concatenate([[0.0], np.cumsum(curvatures * step)])
    moves = step * np.column_stack([np.cos(headings[:-1]), np.sin(headings[:-1])])
    return np.asarray(origin, dtype=float) + np.vstack([[0.0, 0.0], np.cumsum(moves, axis=0)])


def s_curve(radius=200.0, width=60.0, tail=300.0, resolution=2.0):
    """
    Left bend, right bend, then a straight tail, entering across x = 0 heading east.

    Both bends turn through 90 degrees.
    """
    overshoot = 10 * resolution
    bend = np.pi / 2 * radius
    pieces = [(overshoot, 0.0), (bend, 1.0 / radius), (bend, -1.0 / radius), (tail + overshoot, 0.0)]
    centerline = centerline_from_curvature(pieces, resolution / 2, origin=(-overshoot, 0.0))
    # x extent of the two bends plus the tail, snapped to the lattice.
    length = np.floor((2 * radius + tail) / resolution) * resolution
    miny = (np.floor((-width / 2) / resolution) - 6) * resolution
    maxy = (np.ceil((2 * radius + width / 2) / resolution) + 6) * resolution
    return _build(centerline, width / 2, (0.0, miny, length, maxy), resolution, width)


def random_river(seed, resolution=3.0):
    """
    Randomized meandering river: width 80-100 m, amplitude 15-40 m, wavelength 800-1200 m.

    The reach spans one and a half wavelengths.
    """
    rng = np.random.default_rng(seed)
    width = rng.uniform(80.0, 100.0)
    amplitude = rng.uniform(15.0, 40.0)
    wavelength = rng.uniform(800.0, 1200.0)
    length = np.round(1.5 * wavelength / resolution) * resolution
    return sine(amplitude, wavelength, width, length, resolution)


def reach_2760m():
    """About 2.76 km of centerline, 90 m wide, gently meandering."""
    return sine(amplitude=40.0, wavelength=920.0, width=90.0, length=2709.0, resolution=3.0)


def stepped_width(x, narrow=72.0, wide=106.0, middle=1990.5, transition=80.0):
    """Width stepping from ``narrow`` to ``wide`` around ``middle`` over about ``transition`` meters."""
    return narrow + (wide - narrow) * 0.5 * (1 + np.tanh((x - middle) / (transition / 4)))


def reach_4120m():
    """About 4.12 km of centerline, 72 m wide for the first half and 106 m for the second."""
    return sine(amplitude=60.0, wavelength=1000.0, width_fn=stepped_width, length=3981.0, resolution=3.0)


def three_meanders(resolution=3.0):
    """One and a half wavelengths of a 90 m wide sine river: three bends of alternating sides."""
    return sine(amplitude=60.0, wavelength=1000.0, width=90.0, length=1500.0, resolution=resolution)


def three_bends(bend_length=1200.0, middle_length=200.0, width=90.0, resolution=3.0):
    """
    Long left bend, short right bend, long left bend, entering across x = 0 heading east.

    The outer bends turn through 60 degrees and the middle bend through 120,
    so the river leaves heading east again. The start sits a quarter width
    off the centerline toward the right bank, the outer bank of the long bends.
    """
    overshoot = 10 * resolution
    turn = np.pi / 3
    pieces = [
        (overshoot, 0.0),
        (bend_length, turn / bend_length),
        (middle_length, -2 * turn / middle_length),
        (bend_length, turn / bend_length),
        (overshoot, 0.0),
    ]
    centerline = centerline_from_curvature(pieces, resolution / 2, origin=(-overshoot, 0.0))
    outer_radius = bend_length / turn
    middle_radius = middle_length / (2 * turn)
    reach = 2 * outer_radius * np.sin(turn) + 2 * middle_radius * np.sin(turn)
    rise = outer_radius * (1 - np.cos(turn)) + middle_radius * (1 - np.cos(turn))
    length = np.floor(reach / resolution) * resolution
    miny = (np.floor((-width / 2) / resolution) - 6) * resolution
    maxy = (np.ceil((rise + width / 2) / resolution) + 6) * resolution
    river = _build(centerline, width / 2, (0.0, miny, length, maxy), resolution, width)
    start = np.array([resolution, -width / 4])
    return SyntheticRiver(river.river_map, start, river.centerline, river.nominal_width)


# River beds

def plane_bed(points):
    points = np.asarray(points, dtype=float)
    return 5.0 + 0.001 * points[..., 0]


def sine_bed(points):
    points = np.asarray(points, dtype=float)
    return 4.0 + 1.5 * np.sin(points[..., 0] / 120.0) * np.cos(points[..., 1] / 60.0)


def sample_bed(river_map, bed, count, seed=0, noise=0.0):
    """
    Random depth soundings over the Free cells of ``river_map``.

    Returns:
        (positions, depths) arrays
    """
    rng = np.random.default_rng(seed)
    free = river_map.free_points()
    picks = rng.choice(len(free), size=min(count, len(free)), replace=False)
    jitter = rng.uniform(-0.5, 0.5, size=(len(picks), 2)) * river_map.resolution
    positions = free[np.sort(picks)] + jitter
    depths = bed(positions)
    if noise:
        depths = depths + rng.normal(0.0, noise, size=len(depths))
    return positions, depths

"""
Polyline helpers shared by the planners.

Polylines are ``(N, 2)`` float arrays in the map's metric frame. Arc length
is measured in meters from the first vertex.
"""
import numpy as np
from scipy import interpolate
from shapely.geometry import LineString


def as_points(points):
    """Return ``points`` as an ``(N, 2)`` float array."""
    array = np.asarray(points, dtype=float)
    if array.ndim != 2 or array.shape[1] != 2:
        raise ValueError(f"Expected an (N, 2) array of points, got shape {array.shape}")
    return array


def unit(vector):
    """Normalize a 2-vector; zero vectors are rejected."""
    vector = np.asarray(vector, dtype=float)
    norm = np.hypot(vector[0], vector[1])
    if norm == 0.0:
        raise ValueError("Cannot normalize a zero-length vector")
    return vector / norm


def arc_lengths(poly):
    """Cumulative arc length at every vertex, starting at 0."""
    steps = np.hypot(*np.diff(poly, axis=0).T)
    return np.concatenate([[0.0], np.cumsum(steps)])


def polyline_length(poly):
    if len(poly) < 2:
        return 0.0
    return float(np.sum(np.hypot(*np.diff(poly, axis=0).T)))


def dedupe(poly, eps=1e-9):
    """Drop vertices closer than ``eps`` to their predecessor."""
    poly = as_points(poly)
    if len(poly) < 2:
        return poly
    keep = np.concatenate([[True], np.hypot(*np.diff(poly, axis=0).T) > eps])
    return poly[keep]


def point_at(poly, arcs, cum=None):
    """Interpolate points at arc positions (scalar or array), clamped to the ends."""
    cum = arc_lengths(poly) if cum is None else cum
    arcs = np.asarray(arcs, dtype=float)
    x = np.interp(arcs, cum, poly[:, 0])
    y = np.interp(arcs, cum, poly[:, 1])
    return np.stack([x, y], axis=-1)


def resample(poly, step):
    """Resample at uniform arc spacing ``step``; both ends are kept."""
    cum = arc_lengths(poly)
    total = cum[-1]
    if total == 0.0:
        return poly[:1].copy()
    count = max(int(np.ceil(total / step)), 1)
    return point_at(poly, np.linspace(0.0, total, count + 1), cum)


def substring(poly, start_arc, end_arc, cum=None):
    """
    Sub-polyline between two arc positions.

    When ``end_arc < start_arc`` the result runs backwards along ``poly``.
    """
    cum = arc_lengths(poly) if cum is None else cum
    lo, hi = sorted((float(start_arc), float(end_arc)))
    inner = poly[(cum > lo) & (cum < hi)]
    ends = point_at(poly, [lo, hi], cum)
    piece = np.vstack([ends[:1], inner, ends[1:]])
    piece = dedupe(piece)
    return piece[::-1].copy() if end_arc < start_arc else piece


def moving_average(poly, window):
    """
    Moving-average smoothing with a centered window of ``window`` vertices.

    The window shrinks symmetrically near the ends, so the end vertices stay put.
    """
    half = window // 2
    count = len(poly)
    if half == 0 or count < 3:
        return poly.copy()
    cumsum = np.vstack([np.zeros((1, 2)), np.cumsum(poly, axis=0)])
    index = np.arange(count)
    reach = np.minimum(np.minimum(index, count - 1 - index), half)
    lo = index - reach
    hi = index + reach + 1
    return (cumsum[hi] - cumsum[lo]) / (hi - lo)[:, None]


def simplify(poly, tolerance):
    """Douglas–Peucker simplification."""
    line = LineString(poly)
    return np.asarray(line.simplify(tolerance, preserve_topology=False).coords, dtype=float)


def spline_resample(poly, step):
    """
    Interpolating parametric spline through ``poly``, sampled every ``step`` meters.

    The spline degree drops for short inputs (two vertices give a straight line).
    """
    poly = dedupe(poly)
    if len(poly) < 3:
        return resample(poly, step)
    cum = arc_lengths(poly)
    degree = min(3, len(poly) - 1)
    tck, _ = interpolate.splprep([poly[:, 0], poly[:, 1]], u=cum, k=degree, s=0)
    count = max(int(np.ceil(cum[-1] / step)), 1)
    x, y = interpolate.splev(np.linspace(0.0, cum[-1], count + 1), tck)
    return np.column_stack([x, y])


def line_intersection(p1, d1, p2, d2):
    """
    Intersection of the lines ``p1 + t*d1`` and ``p2 + u*d2``.

    Returns None for parallel lines.
    """
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < 1e-12:
        return None
    diff = np.asarray(p2, dtype=float) - np.asarray(p1, dtype=float)
    t = (diff[0] * d2[1] - diff[1] * d2[0]) / cross
    return np.asarray(p1, dtype=float) + t * np.asarray(d1, dtype=float)


def left_normal(direction):
    return np.array([-direction[1], direction[0]])


def signed_turn(d1, d2):
    """Signed angle in radians from direction ``d1`` to ``d2``."""
    return float(np.arctan2(d1[0] * d2[1] - d1[1] * d2[0], np.dot(d1, d2)))


def decimate(poly, max_vertices, max_tolerance):
    """
    Douglas–Peucker decimation down to ``max_vertices``.

    Searches the smallest tolerance, up to ``max_tolerance``, that meets the
    vertex budget. Returns the decimated polyline and the tolerance used; when
    even ``max_tolerance`` leaves too many vertices the tolerance keeps growing
    until the budget is met and the returned tolerance exceeds ``max_tolerance``.
    """
    poly = dedupe(poly)
    if len(poly) <= max_vertices:
        return poly, 0.0
    lo, hi = 0.0, max(max_tolerance, 1e-6)
    while len(simplify(poly, hi)) > max_vertices:
        lo, hi = hi, hi * 2.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if len(simplify(poly, mid)) > max_vertices:
            lo = mid
        else:
            hi = mid
    return simplify(poly, hi), hi

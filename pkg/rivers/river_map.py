"""
River maps and the geometry derived from them.

A RiverMap is the occupancy grid every planner works on. From a map and a
start point come the directional bank contours, the downriver direction and
the width profile along the centerline.
"""
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

import geojson
import numpy as np
import shapely
import yaml
from affine import Affine
from django.db import models
from PIL import Image, UnidentifiedImageError
from scipy import ndimage
from shapely.geometry import LinearRing, LineString, Point, shape
from skimage import measure

from . import geometry
from .conf import resolve
from .exceptions import GeometryError, MapError

logger = logging.getLogger(__name__)

# Raster pixels at or above mid-gray are water.
FREE_THRESHOLD = 128


class Orientation(models.TextChoices):
    START_IS_DOWNSTREAM_END = 'downstream', 'Start is the downstream end'
    START_IS_UPSTREAM_END = 'upstream', 'Start is the upstream end'


class Bank(models.TextChoices):
    LEFT = 'left', 'Left bank'
    RIGHT = 'right', 'Right bank'

    @property
    def opposite(self):
        return Bank.RIGHT if self == Bank.LEFT else Bank.LEFT


@dataclass(frozen=True, eq=False)
class RiverMap:
    """
    Occupancy grid of a river reach.

    Fields:
    - grid: boolean array indexed [row, col], True for Free cells
    - resolution: meters per cell
    - transform: Affine from (col, row) cell coordinates to the metric frame
    - crs: projected CRS of the metric frame; None when not geo-referenced
    - open_edges: declared inlet/outlet segments (polygon sources only)
    - discarded_cells: Free cells dropped outside the largest component
    """

    grid: np.ndarray
    resolution: float
    transform: Affine
    crs: str | None = None
    open_edges: tuple = ()
    discarded_cells: int = 0

    def __post_init__(self):
        self.grid.setflags(write=False)

    @classmethod
    def from_mask(cls, mask, resolution, transform=None, crs=None, open_edges=()):
        """
        Build a valid map from a raw Free mask.

        The grid border is closed and only the largest 4-connected Free
        component is kept.

        Raises:
            MapError if the resolution is not positive or nothing is Free
        """
        if resolution is None or not resolution > 0:
            raise MapError(f"Map resolution must be positive, got {resolution}")
        free = np.array(mask, dtype=bool)
        if free.ndim != 2:
            raise MapError(f"Map grid must be two-dimensional, got shape {free.shape}")
        free[0, :] = free[-1, :] = False
        free[:, 0] = free[:, -1] = False

        # The default 2D structuring element is 4-connectivity.
        labels, count = ndimage.label(free)
        if count == 0:
            raise MapError("Map has no Free cells")
        sizes = np.bincount(labels.ravel())[1:]
        keep = int(np.argmax(sizes)) + 1
        discarded = int(sizes.sum() - sizes[keep - 1])
        if discarded:
            logger.warning("Discarded %d Free cells outside the largest river component", discarded)

        if transform is None:
            transform = Affine.scale(resolution)
        edges = tuple(np.asarray(edge, dtype=float) for edge in open_edges)
        return cls(
            grid=labels == keep,
            resolution=float(resolution),
            transform=transform,
            crs=crs,
            open_edges=edges,
            discarded_cells=discarded,
        )

    @property
    def shape(self):
        return self.grid.shape

    @property
    def free_count(self):
        return int(self.grid.sum())

    @property
    def is_georeferenced(self):
        return self.crs is not None

    @property
    def digest(self):
        """Stable fingerprint of the grid and its placement."""
        sha = hashlib.sha1()
        sha.update(np.packbits(self.grid).tobytes())
        sha.update(repr((self.grid.shape, self.resolution, tuple(self.transform)[:6], self.crs)).encode())
        return sha.hexdigest()

    def cell_centers(self, rows, cols):
        """Metric coordinates of cell centers; fractional indices are allowed."""
        x, y = self.transform * (np.asarray(cols, dtype=float) + 0.5, np.asarray(rows, dtype=float) + 0.5)
        return np.stack([x, y], axis=-1)

    def to_cells(self, points):
        """(rows, cols) integer indices of the cells holding ``points``."""
        points = np.asarray(points, dtype=float)
        col, row = ~self.transform * (points[..., 0], points[..., 1])
        return np.floor(row).astype(int), np.floor(col).astype(int)

    def _lookup(self, rows, cols):
        rows = np.asarray(rows)
        cols = np.asarray(cols)
        height, width = self.grid.shape
        inside = (rows >= 0) & (rows < height) & (cols >= 0) & (cols < width)
        result = np.zeros(rows.shape, dtype=bool)
        result[inside] = self.grid[rows[inside], cols[inside]]
        return result

    def is_free(self, points):
        """Cell label at each point; cells outside the grid are Obstacle."""
        return self._lookup(*self.to_cells(points))

    def majority_free(self, points):
        """3x3 neighborhood vote around each point's cell."""
        rows, cols = self.to_cells(points)
        votes = np.zeros(np.shape(rows), dtype=int)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                votes += self._lookup(rows + dr, cols + dc)
        return votes >= 5

    def free_points(self):
        """Metric centers of all Free cells, in row-major order."""
        rows, cols = np.nonzero(self.grid)
        return self.cell_centers(rows, cols)

    def _nearest_free_cell(self, point):
        row, col = self.to_cells(point)
        height, width = self.grid.shape
        if not (0 <= row < height and 0 <= col < width):
            return None, np.inf
        r0, r1 = max(row - 3, 0), min(row + 4, height)
        c0, c1 = max(col - 3, 0), min(col + 4, width)
        rr, cc = np.nonzero(self.grid[r0:r1, c0:c1])
        if rr.size == 0:
            return None, np.inf
        gaps = np.hypot(rr + r0 - row, cc + c0 - col)
        best = int(np.argmin(gaps))
        return (rr[best] + r0, cc[best] + c0), float(gaps[best])

    def distance_to_free(self, point):
        """Distance in cells from ``point``'s cell to the nearest Free cell (inf off-grid)."""
        return self._nearest_free_cell(point)[1]

    def snap(self, point):
        """``point`` itself when Free, else the center of the nearest Free cell within three cells."""
        point = np.asarray(point, dtype=float)
        cell, distance = self._nearest_free_cell(point)
        if cell is None:
            raise GeometryError(f"No Free cell near {tuple(point)}")
        return point.copy() if distance == 0 else self.cell_centers(*cell)

    def bounds(self):
        height, width = self.grid.shape
        corners = np.array([self.transform * (c, r) for c, r in ((0, 0), (width, 0), (0, height), (width, height))])
        return (*corners.min(axis=0), *corners.max(axis=0))


@dataclass(frozen=True, eq=False)
class BankContours:
    """
    Directional bank polylines with their matched pairs.

    Both banks and the centerline run away from the start end. Pair arrays
    are aligned with the centerline: vertex i of the centerline is the
    midpoint of ``left_pairs[i]`` and ``right_pairs[i]``, which sit at arc
    ``left_arcs[i]`` / ``right_arcs[i]`` along their banks.
    """

    left_bank: np.ndarray
    right_bank: np.ndarray
    centerline: np.ndarray
    centerline_arcs: np.ndarray
    widths: np.ndarray
    left_pairs: np.ndarray
    right_pairs: np.ndarray
    left_arcs: np.ndarray
    right_arcs: np.ndarray
    start_opening: np.ndarray
    end_opening: np.ndarray
    resolution: float

    @property
    def length(self):
        return float(self.centerline_arcs[-1])

    @property
    def step(self):
        """Mean centerline vertex spacing."""
        return self.length / max(len(self.centerline) - 1, 1)

    def bank(self, side):
        return self.left_bank if side == Bank.LEFT else self.right_bank

    def pairs(self, side):
        return self.left_pairs if side == Bank.LEFT else self.right_pairs

    def pair_arcs(self, side):
        return self.left_arcs if side == Bank.LEFT else self.right_arcs

    def to_centerline_arc(self, side, bank_arcs):
        """Map arc positions along one bank to centerline arcs through the matched pairs."""
        return np.interp(bank_arcs, self.pair_arcs(side), self.centerline_arcs)

    def width_at(self, arcs):
        return np.interp(arcs, self.centerline_arcs, self.widths)

    def section(self, arcs, side):
        """Points on ``side``'s bank matched with centerline arcs ``arcs``."""
        pairs = self.pairs(side)
        arcs = np.asarray(arcs, dtype=float)
        x = np.interp(arcs, self.centerline_arcs, pairs[:, 0])
        y = np.interp(arcs, self.centerline_arcs, pairs[:, 1])
        return np.stack([x, y], axis=-1)

    def across(self, arcs, fraction, inner_bank):
        """Points at cross-fraction ``fraction`` measured from ``inner_bank``."""
        inner = self.section(arcs, inner_bank)
        outer = self.section(arcs, Bank(inner_bank).opposite)
        return inner + fraction * (outer - inner)

    def inset(self, arcs, distance, side):
        """Points ``distance`` meters in from ``side``'s bank along the matched cross-section."""
        near = self.section(arcs, side)
        far = self.section(arcs, Bank(side).opposite)
        span = far - near
        return near + distance * span / np.linalg.norm(span, axis=-1, keepdims=True)

    def bounds(self):
        points = np.vstack([self.left_bank, self.right_bank, self.centerline])
        return (*points.min(axis=0), *points.max(axis=0))


@dataclass(frozen=True)
class FlowDirection:
    """
    Coverage heading away from the start end.

    Fields:
    - heading: unit vector along the centerline, away from the end nearest the start
    - orientation: which end of the river the start point sits at
    - from_far_end: True when the start is nearest the last centerline vertex
    """

    heading: tuple
    orientation: Orientation = Orientation.START_IS_DOWNSTREAM_END
    from_far_end: bool = False

    @property
    def downstream_sign(self):
        """+1 when increasing centerline arc runs downstream, -1 otherwise."""
        sign = -1 if self.orientation == Orientation.START_IS_DOWNSTREAM_END else 1
        return -sign if self.from_far_end else sign

    @property
    def start_is_downstream(self):
        return self.orientation == Orientation.START_IS_DOWNSTREAM_END


@dataclass(frozen=True, eq=False)
class WidthProfile:
    arcs: np.ndarray
    widths: np.ndarray

    @property
    def samples(self):
        return list(zip(self.arcs.tolist(), self.widths.tolist()))

    @property
    def mean_width(self):
        return float(np.mean(self.widths))


def rasterize(polygon, resolution, bounds):
    """
    Free mask of ``polygon`` sampled at cell centers inside ``bounds``.

    Returns:
        (mask, transform) with the mask indexed [row, col]
    """
    minx, miny, maxx, maxy = bounds
    cols = int(round((maxx - minx) / resolution))
    rows = int(round((maxy - miny) / resolution))
    transform = Affine.translation(minx, miny) * Affine.scale(resolution)
    cc, rr = np.meshgrid(np.arange(cols) + 0.5, np.arange(rows) + 0.5)
    x, y = transform * (cc, rr)
    return shapely.contains_xy(polygon, x, y), transform


def load_map(source, resolution=None, crs=None):
    """
    Load a river map from a PGM raster, a GeoJSON polygon or a YAML sidecar.

    Raises:
        MapError for unreadable documents, empty maps and bad resolutions
    """
    path = Path(source)
    suffix = path.suffix.lower()
    try:
        if suffix in ('.yaml', '.yml'):
            river_map = _load_sidecar(path)
        elif suffix in ('.geojson', '.json'):
            river_map = _load_polygon(path, resolution, crs)
        else:
            mask = _read_raster(path)
            river_map = RiverMap.from_mask(mask, resolve(resolution, 'PGM_RESOLUTION'), crs=resolve(crs, 'CRS'))
    except (OSError, UnidentifiedImageError, ValueError, TypeError, KeyError, yaml.YAMLError) as exc:
        raise MapError(f"Cannot read map {path}: {exc}") from exc
    logger.info(
        "Loaded map %s: %dx%d cells at %.2f m, %d Free",
        path.name, river_map.shape[1], river_map.shape[0], river_map.resolution, river_map.free_count,
    )
    return river_map


def _read_raster(path):
    with Image.open(path) as image:
        pixels = np.asarray(image.convert('L'))
    return pixels >= FREE_THRESHOLD


def _load_sidecar(path):
    doc = yaml.safe_load(path.read_text())
    if not isinstance(doc, dict) or 'image' not in doc:
        raise MapError(f"Map sidecar {path} must name an 'image'")
    resolution = float(doc.get('resolution', 0))
    x0, y0 = (list(doc.get('origin') or [0.0, 0.0]) + [0.0, 0.0])[:2]
    mask = _read_raster(path.parent / doc['image'])
    # Image rows run north to south; origin is the lower-left corner.
    transform = Affine.translation(float(x0), float(y0) + mask.shape[0] * resolution) * Affine.scale(resolution, -resolution)
    return RiverMap.from_mask(mask, resolution, transform, crs=doc.get('crs'))


def write_map(river_map, path, origin=None, crs=None):
    """
    Write ``river_map`` as a PGM raster plus a YAML sidecar next to it.

    ``origin`` is the metric lower-left corner written to the sidecar; it
    defaults to the map's own. Returns the sidecar path.

    Raises:
        MapError for rotated map frames
    """
    transform = river_map.transform
    if transform.b or transform.d:
        raise MapError("Only north-up maps can be written as rasters")
    path = Path(path)
    image_path = path.with_suffix('.pgm')
    sidecar = path.with_suffix('.yaml')
    # Image rows run north to south.
    grid = river_map.grid if transform.e < 0 else river_map.grid[::-1]
    Image.fromarray(np.where(grid, 254, 0).astype(np.uint8)).save(image_path)
    minx, miny, _, _ = river_map.bounds()
    x0, y0 = (minx, miny) if origin is None else origin
    doc = {
        'image': image_path.name,
        'resolution': float(river_map.resolution),
        'origin': [float(x0), float(y0), 0.0],
    }
    crs = crs or river_map.crs
    if crs:
        doc['crs'] = str(crs)
    sidecar.write_text(yaml.safe_dump(doc, sort_keys=True))
    return sidecar


def _load_polygon(path, resolution, crs):
    with open(path) as handle:
        doc = geojson.load(handle)
    if doc.get('type') == 'FeatureCollection':
        features = [f for f in doc['features'] if f['geometry'] and f['geometry']['type'] == 'Polygon']
        if not features:
            raise MapError(f"{path} holds no Polygon feature")
        doc = features[0]
    if doc.get('type') == 'Feature':
        geometry_doc, properties = doc['geometry'], doc.get('properties') or {}
    else:
        geometry_doc, properties = doc, {}
    if geometry_doc.get('type') != 'Polygon':
        raise MapError(f"{path} is not a Polygon")

    if resolution is None:
        resolution = properties.get('resolution_m')
    if resolution is None:
        raise MapError(f"{path} needs a 'resolution_m' property")
    resolution = float(resolution)
    if not resolution > 0:
        raise MapError(f"Map resolution must be positive, got {resolution}")
    edges = properties.get('open_edges') or []
    if len(edges) != 2:
        raise MapError(f"{path} must declare exactly two 'open_edges'")

    polygon = shape(geometry_doc)
    minx, miny, maxx, maxy = polygon.bounds
    pad = 2 * resolution
    cols = int(np.ceil((maxx - minx) / resolution)) + 4
    rows = int(np.ceil((maxy - miny) / resolution)) + 4
    bounds = (minx - pad, miny - pad, minx - pad + cols * resolution, miny - pad + rows * resolution)
    mask, transform = rasterize(polygon, resolution, bounds)
    return RiverMap.from_mask(
        mask, resolution, transform,
        crs=properties.get('crs') or resolve(crs, 'CRS'),
        open_edges=edges,
    )


def _cyclic_runs(flags):
    """Index arrays of maximal True runs in a cyclic boolean sequence."""
    flags = np.asarray(flags, dtype=bool)
    count = len(flags)
    if flags.all():
        return [np.arange(count)]
    if not flags.any():
        return []
    offset = int(np.argmin(flags))
    rolled = np.roll(flags, -offset)
    edges = np.diff(np.concatenate([[0], rolled.astype(int), [0]]))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return [(np.arange(a, b) + offset) % count for a, b in zip(starts, stops)]


def find_openings(river_map):
    """
    Inlet and outlet cross-sections of the reach.

    Declared edges win; otherwise the two longest runs of Free cells on the
    ring just inside the closed border are the openings.

    Raises:
        GeometryError when fewer than two openings exist
    """
    if river_map.open_edges:
        return [np.asarray(edge, dtype=float) for edge in river_map.open_edges]
    height, width = river_map.grid.shape
    if height < 4 or width < 4:
        raise GeometryError("Map is too small to hold an inlet and an outlet")

    ring = (
        [(1, c) for c in range(1, width - 1)]
        + [(r, width - 2) for r in range(2, height - 1)]
        + [(height - 2, c) for c in range(width - 3, 0, -1)]
        + [(r, 1) for r in range(height - 3, 1, -1)]
    )
    rows, cols = np.array(ring).T
    runs = _cyclic_runs(river_map.grid[rows, cols])
    if len(runs) < 2:
        raise GeometryError("Free region does not touch two distinct boundary openings")
    runs = sorted(runs, key=len, reverse=True)[:2]
    openings = []
    for run in sorted(runs, key=lambda r: int(r[0])):
        ends = river_map.cell_centers(rows[run[[0, -1]]], cols[run[[0, -1]]])
        openings.append(ends)
    return openings


def _boundary_ring(river_map):
    traces = measure.find_contours(river_map.grid.astype(float), 0.5)
    if not traces:
        raise GeometryError("Map has no Free/Obstacle boundary")
    trace = max(traces, key=len)
    if np.allclose(trace[0], trace[-1]):
        trace = trace[:-1]
    return river_map.cell_centers(trace[:, 0], trace[:, 1])


def _opening_distance(points, opening):
    segment = LineString(opening) if not np.allclose(opening[0], opening[1]) else Point(opening[0])
    return shapely.distance(shapely.points(points), segment)


def _nearest_on(opening, point):
    if np.allclose(opening[0], opening[1]):
        return np.asarray(opening[0], dtype=float)
    line = LineString(opening)
    foot = line.interpolate(line.project(Point(point)))
    return np.array([foot.x, foot.y])


def _smooth_bank(points, resolution, tolerance, window):
    kept = geometry.simplify(points, tolerance)
    dense = geometry.spline_resample(kept, resolution)
    return geometry.moving_average(dense, window)


def _reach_opening(end, inward, opening, limit):
    """Where the bank leaving ``end`` along its end tangent meets the opening line."""
    if not np.allclose(opening[0], opening[1]) and not np.allclose(end, inward):
        heading = geometry.unit(end - inward)
        crossing = geometry.line_intersection(end, heading, opening[0], opening[1] - opening[0])
        if crossing is not None and np.dot(crossing - end, heading) >= 0 and np.hypot(*(crossing - end)) <= limit:
            return crossing
    return _nearest_on(opening, end)


def _extend(bank, start_opening, end_opening, limit):
    inward = min(3, len(bank) - 1)
    head = _reach_opening(bank[0], bank[inward], start_opening, limit)
    tail = _reach_opening(bank[-1], bank[-1 - inward], end_opening, limit)
    return geometry.dedupe(np.vstack([head, bank, tail]))


def _match_banks(left, right, resolution, window):
    left_arcs = geometry.arc_lengths(left)
    right_arcs = geometry.arc_lengths(right)
    drive_left = left_arcs[-1] >= right_arcs[-1]
    driver, driver_arcs, other = (left, left_arcs, right) if drive_left else (right, right_arcs, left)

    dense = geometry.resample(other, resolution / 4.0)
    dense_arcs = geometry.arc_lengths(dense)
    driver_frac = driver_arcs / driver_arcs[-1]
    dense_frac = dense_arcs / dense_arcs[-1]
    lo = np.searchsorted(dense_frac, driver_frac - window, side='left')
    hi = np.searchsorted(dense_frac, driver_frac + window, side='right')

    matched = np.empty(len(driver), dtype=int)
    for i, (a, b) in enumerate(zip(lo, hi)):
        a = min(a, len(dense) - 1)
        b = max(b, a + 1)
        gaps = np.hypot(*(dense[a:b] - driver[i]).T)
        matched[i] = a + int(np.argmin(gaps))
    matched[0] = 0
    matched = np.maximum.accumulate(matched)
    matched[-1] = len(dense) - 1

    if drive_left:
        return driver, driver_arcs, dense[matched], dense_arcs[matched]
    return dense[matched], dense_arcs[matched], driver, driver_arcs


def get_directional_contours(river_map, start, *, dp_tolerance=None, smoothing_window=None,
                             opening_cut=None, match_window=None):
    """
    Left and right bank polylines ordered away from the start end.

    The Free/Obstacle boundary is traced with marching squares, cut at the
    two openings, simplified with Douglas–Peucker, re-densified through an
    interpolating spline and smoothed with a moving average. Bank ends are
    extended onto the opening lines.

    Raises:
        GeometryError if the start is off the river or the openings cannot be found
    """
    start = np.asarray(start, dtype=float)
    res = river_map.resolution
    if river_map.distance_to_free(start) > 2:
        raise GeometryError(f"Start point {tuple(start)} is more than two cells from the river")

    openings = find_openings(river_map)
    ring = _boundary_ring(river_map)
    cut = resolve(opening_cut, 'OPENING_CUT_CELLS') * res
    near = np.zeros(len(ring), dtype=bool)
    for opening in openings:
        near |= _opening_distance(ring, opening) < cut
    runs = _cyclic_runs(~near)
    if len(runs) < 2:
        raise GeometryError("River boundary does not split into two banks between the openings")
    runs = sorted(runs, key=len, reverse=True)[:2]

    start_gaps = [float(_opening_distance(start[None, :], opening)[0]) for opening in openings]
    start_index = int(np.argmin(start_gaps))
    start_opening, end_opening = openings[start_index], openings[1 - start_index]

    banks = []
    for run in runs:
        bank = ring[run]
        gap_first = _opening_distance(bank[[0]], start_opening)[0]
        gap_last = _opening_distance(bank[[-1]], start_opening)[0]
        banks.append(bank[::-1] if gap_last < gap_first else bank)

    # Walking the loop out along one bank and back along the other: a
    # counter-clockwise loop keeps water on the left of the first bank.
    loop = np.vstack([banks[0], banks[1][::-1]])
    if LinearRing(loop).is_ccw:
        right_raw, left_raw = banks
    else:
        left_raw, right_raw = banks

    tolerance = resolve(dp_tolerance, 'DP_TOLERANCE_CELLS') * res
    window = resolve(smoothing_window, 'SMOOTHING_WINDOW')
    left = _extend(_smooth_bank(left_raw, res, tolerance, window), start_opening, end_opening, 3 * cut)
    right = _extend(_smooth_bank(right_raw, res, tolerance, window), start_opening, end_opening, 3 * cut)

    left_pairs, left_arcs, right_pairs, right_arcs = _match_banks(
        left, right, res, resolve(match_window, 'MATCH_WINDOW'),
    )
    midpoints = 0.5 * (left_pairs + right_pairs)
    keep = np.concatenate([[True], np.hypot(*np.diff(midpoints, axis=0).T) > 1e-9])
    centerline = midpoints[keep]
    left_pairs, right_pairs = left_pairs[keep], right_pairs[keep]
    contours = BankContours(
        left_bank=left,
        right_bank=right,
        centerline=centerline,
        centerline_arcs=geometry.arc_lengths(centerline),
        widths=np.hypot(*(left_pairs - right_pairs).T),
        left_pairs=left_pairs,
        right_pairs=right_pairs,
        left_arcs=left_arcs[keep],
        right_arcs=right_arcs[keep],
        start_opening=start_opening,
        end_opening=end_opening,
        resolution=res,
    )
    logger.info(
        "Extracted banks: left %.1f m, right %.1f m, centerline %.1f m",
        geometry.polyline_length(left), geometry.polyline_length(right), contours.length,
    )
    return contours


def get_downriver_direction(contours, start, orientation=None):
    """
    Heading along the centerline away from the end nearest ``start``.

    Raises:
        GeometryError if the start is outside the contours' bounding box or
        equally close to both ends
    """
    orientation = Orientation(resolve(orientation, 'START_ORIENTATION'))
    start = np.asarray(start, dtype=float)
    minx, miny, maxx, maxy = contours.bounds()
    margin = 2 * contours.resolution
    if not (minx - margin <= start[0] <= maxx + margin and miny - margin <= start[1] <= maxy + margin):
        raise GeometryError(f"Start point {tuple(start)} is outside the river's bounding box")

    centerline = contours.centerline
    near_start = np.hypot(*(centerline[0] - start))
    near_end = np.hypot(*(centerline[-1] - start))
    if abs(near_start - near_end) < contours.step:
        raise GeometryError("Start point is equally close to both river ends")

    length = contours.length
    reach = min(max(2 * contours.step, 0.5 * float(np.median(contours.widths))), length / 2)
    from_far_end = near_end < near_start
    if from_far_end:
        origin, target = centerline[-1], geometry.point_at(centerline, length - reach, contours.centerline_arcs)
    else:
        origin, target = centerline[0], geometry.point_at(centerline, reach, contours.centerline_arcs)
    heading = geometry.unit(target - origin)
    return FlowDirection(heading=(float(heading[0]), float(heading[1])), orientation=orientation, from_far_end=from_far_end)


def width_profile(contours):
    """
    Matched-pair widths along the centerline.

    Raises:
        GeometryError if any width is not positive
    """
    if np.any(contours.widths <= 0):
        raise GeometryError("Bank contours have non-positive widths")
    return WidthProfile(arcs=contours.centerline_arcs.copy(), widths=contours.widths.copy())

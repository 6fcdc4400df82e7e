"""
Coverage planners.

M-Cover splits every meander segment into an even number of lanes, sends the
inner half upstream and the outer half downstream, and chains the segments
into one closed tour. Width-Based M-Cover does the same over clusters of
similar width. L-Cover, T-Cover and Z-Cover are the longitudinal, transversal
and zig-zag baselines.
"""
import logging
from dataclasses import dataclass, replace

import networkx as nx
import numpy as np
from django.db import models
from scipy import ndimage
from skimage import draw

from . import geometry
from .conf import app_settings
from .exceptions import GeometryError, InfeasibleSpacingError
from .meander import TangentStep, get_meander_segments
from .river_map import Bank, get_directional_contours, get_downriver_direction

logger = logging.getLogger(__name__)

# Bank-following legs keep this many cells off the bank.
BANK_INSET_CELLS = 1.5
# Zig-zag touch points sit this many cells in from the bank.
ZIGZAG_INSET_CELLS = 0.5


class Direction(models.TextChoices):
    UPSTREAM = 'upstream', 'Upstream'
    DOWNSTREAM = 'downstream', 'Downstream'
    ACROSS = 'across', 'Across the river'


class Algorithm(models.TextChoices):
    M_COVER = 'm-cover', 'M-Cover'
    WIDTH_M_COVER = 'width-m-cover', 'Width-Based M-Cover'
    L_COVER = 'l-cover', 'L-Cover'
    T_COVER = 't-cover', 'T-Cover'
    Z_COVER = 'z-cover', 'Z-Cover'


CLOSED_TOURS = {Algorithm.M_COVER, Algorithm.WIDTH_M_COVER, Algorithm.L_COVER, Algorithm.T_COVER}


@dataclass(frozen=True, eq=False)
class Pass:
    """
    One sweep of the plan.

    Fields:
    - polyline: metric points in travel order
    - lane_index: 0-based lane counted from the inner bank (from the left bank for L-Cover)
    - direction: Upstream, Downstream, or Across for transects
    - segment_id: owning meander segment (cluster for L-Cover, transect number for T-Cover)
    - lane_count: lanes in the owning segment
    """

    polyline: np.ndarray
    lane_index: int
    direction: Direction | None
    segment_id: int
    lane_count: int = 0

    @property
    def length(self):
        return geometry.polyline_length(self.polyline)


@dataclass(frozen=True, eq=False)
class Connector:
    polyline: np.ndarray
    kind: str = 'transition'

    @property
    def length(self):
        return geometry.polyline_length(self.polyline)


@dataclass(frozen=True, eq=False)
class CoveragePlan:
    """
    Ordered passes and connectors forming the tour.

    Fields:
    - elements: Pass and Connector objects in travel order
    - spacing: lane spacing in meters
    - algorithm: the planner that produced the plan, None for imported waypoints
    - start: the requested start point
    - closed: True when the tour returns to the start
    - complete: False for planners that do not guarantee full coverage
    - lane_counts: lanes per segment or cluster, in coverage order
    - map_digest: digest of the RiverMap the plan was made on
    """

    elements: tuple
    spacing: float
    algorithm: Algorithm | None
    start: np.ndarray
    closed: bool = True
    complete: bool = True
    lane_counts: tuple = ()
    map_digest: str = ''

    @property
    def passes(self):
        return [element for element in self.elements if isinstance(element, Pass)]

    @property
    def connectors(self):
        return [element for element in self.elements if isinstance(element, Connector)]

    def path(self):
        """The whole tour as one polyline."""
        if not self.elements:
            return np.empty((0, 2))
        return geometry.dedupe(np.vstack([element.polyline for element in self.elements]))

    @property
    def length(self):
        return geometry.polyline_length(self.path())

    @property
    def pass_length(self):
        return float(sum(p.length for p in self.passes))


@dataclass(frozen=True)
class SameWidthCluster:
    start_arc: float
    end_arc: float
    nominal_width: float
    pass_count: int


@dataclass(frozen=True, eq=False)
class RiverModel:
    """
    Everything the planners derive from a map and a start point.

    Fields:
    - river_map, start: the inputs
    - contours: directional bank contours
    - flow: downriver direction
    - delta_w: tangent step used for bend classification
    - segments: meander segments in coverage order
    """

    river_map: object
    start: np.ndarray
    contours: object
    flow: object
    delta_w: TangentStep
    segments: list


def survey_river(river_map, start, orientation=None, delta_w=None):
    """Contours, flow direction and meander segments for ``river_map`` seen from ``start``."""
    start = np.asarray(start, dtype=float)
    contours = get_directional_contours(river_map, start)
    flow = get_downriver_direction(contours, start, orientation)
    step = TangentStep.initialize(contours, delta_w)
    segments = get_meander_segments(river_map, contours, flow, step)
    return RiverModel(river_map, start, contours, flow, step, segments)


def round_to_even(value):
    """Nearest even integer, halves rounding up, at least 2."""
    return max(2, int(2 * np.floor(value / 2 + 0.5)))


def round_half_up(value):
    """Nearest integer, halves rounding up, at least 1."""
    return max(1, int(np.floor(value + 0.5)))


def even_lane_count(width, s, resolution):
    """
    round_to_even(width / s), raised by two until neighbouring lanes sit at
    most s plus two cells apart.
    """
    k = round_to_even(width / s)
    while width / k > s + 2 * resolution:
        k += 2
    return k


# Free-space checks

def segment_free(river_map, a, b):
    """True when every cell on the rasterized segment ``a``-``b`` is Free."""
    (r0, r1), (c0, c1) = river_map.to_cells(np.vstack([a, b]))
    height, width = river_map.grid.shape
    if min(r0, r1, c0, c1) < 0 or max(r0, r1) >= height or max(c0, c1) >= width:
        return False
    rr, cc = draw.line(int(r0), int(c0), int(r1), int(c1))
    return bool(river_map.grid[rr, cc].all())


def polyline_free(river_map, polyline):
    return all(segment_free(river_map, a, b) for a, b in zip(polyline[:-1], polyline[1:]))


def coverage_fraction(river_map, plan, radius):
    """
    Share of Free cells whose center lies within ``radius`` meters of the tour.

    The tour is rasterized onto the grid and measured with a distance transform.
    """
    visited = np.zeros(river_map.grid.shape, dtype=bool)
    path = plan.path()
    if len(path) == 0:
        return 0.0
    rows, cols = river_map.to_cells(path)
    height, width = visited.shape
    if len(path) == 1:
        rows, cols = np.array([rows[0], rows[0]]), np.array([cols[0], cols[0]])
    for r0, c0, r1, c1 in zip(rows[:-1], cols[:-1], rows[1:], cols[1:]):
        rr, cc = draw.line(int(r0), int(c0), int(r1), int(c1))
        inside = (rr >= 0) & (rr < height) & (cc >= 0) & (cc < width)
        visited[rr[inside], cc[inside]] = True
    distance = ndimage.distance_transform_edt(~visited) * river_map.resolution
    return float(np.mean(distance[river_map.grid] <= radius + 1e-9))


def _string_pull(river_map, points):
    pulled = [points[0]]
    i = 0
    while i < len(points) - 1:
        j = len(points) - 1
        while j > i + 1 and not segment_free(river_map, points[i], points[j]):
            j -= 1
        pulled.append(points[j])
        i = j
    return np.asarray(pulled)


def _grid_route(river_map, a, b):
    # Ends sitting on the bank route from their nearest Free cell.
    (ra, rb), (ca, cb) = river_map.to_cells(np.vstack([river_map.snap(a), river_map.snap(b)]))
    height, width = river_map.grid.shape
    margin = 10
    while True:
        r0, r1 = max(min(ra, rb) - margin, 0), min(max(ra, rb) + margin + 1, height)
        c0, c1 = max(min(ca, cb) - margin, 0), min(max(ca, cb) + margin + 1, width)
        window = river_map.grid[r0:r1, c0:c1]
        graph = nx.grid_2d_graph(*window.shape)
        graph.remove_nodes_from((int(r), int(c)) for r, c in zip(*np.nonzero(~window)))
        source, target = (int(ra - r0), int(ca - c0)), (int(rb - r0), int(cb - c0))
        try:
            cells = nx.astar_path(
                graph, source, target,
                heuristic=lambda u, v: float(np.hypot(u[0] - v[0], u[1] - v[1])),
            )
            break
        except (nx.NetworkXNoPath, nx.NodeNotFound) as exc:
            if (r0, c0, r1, c1) == (0, 0, height, width):
                raise GeometryError(f"No Free path from {tuple(a)} to {tuple(b)}") from exc
            margin *= 4
    rows, cols = np.array(cells).T
    points = river_map.cell_centers(rows + r0, cols + c0)
    points[0], points[-1] = a, b
    return _string_pull(river_map, points)


def _end_point(item, last):
    if hasattr(item, 'polyline'):
        return item.polyline[-1 if last else 0]
    return np.asarray(item, dtype=float)


def create_pass_between(river_map, prev, following, kind='transition'):
    """
    Connector from the end of ``prev`` to the start of ``following``.

    Either argument may be a Pass, a Connector or a point. The connector is a
    straight line when that stays in Free space, otherwise a string-pulled
    grid shortest path. Returns None when the two ends coincide.

    Raises:
        GeometryError if no Free path exists
    """
    a = _end_point(prev, last=True)
    b = _end_point(following, last=False)
    if np.hypot(*(b - a)) < 1e-6:
        return None
    if segment_free(river_map, a, b):
        return Connector(np.vstack([a, b]), kind)
    return Connector(_grid_route(river_map, a, b), kind)


# Lanes

def _infeasible_ranges(arcs, widths, spacing):
    narrow = widths <= spacing
    ranges = []
    first = None
    for i, flag in enumerate(narrow):
        if flag and first is None:
            first = i
        if first is not None and (not flag or i == len(narrow) - 1):
            last = i if flag else i - 1
            ranges.append((float(arcs[first]), float(arcs[last])))
            first = None
    return ranges


def _check_spacing(contours, spacing, start_arc=0.0, end_arc=None):
    if not spacing > 0:
        raise ValueError(f"Spacing must be positive, got {spacing}")
    end_arc = contours.length if end_arc is None else end_arc
    arcs = contours.centerline_arcs
    within = (arcs >= start_arc) & (arcs <= end_arc)
    ranges = _infeasible_ranges(arcs[within], contours.widths[within], spacing)
    if ranges:
        spans = ', '.join(f"{lo:.0f}-{hi:.0f} m" for lo, hi in ranges)
        raise InfeasibleSpacingError(
            f"Spacing {spacing} m leaves fewer than two lanes where the river is narrower "
            f"(centerline arcs {spans}); use a smaller spacing",
            arcs=ranges,
        )


def lane_polyline(contours, start_arc, end_arc, fraction, side):
    """Points at cross-fraction ``fraction`` from ``side`` between two centerline arcs."""
    arcs = contours.centerline_arcs
    inner = arcs[(arcs > start_arc) & (arcs < end_arc)]
    samples = np.concatenate([[start_arc], inner, [end_arc]])
    return geometry.dedupe(contours.across(samples, fraction, side))


def _mean_width(contours, start_arc, end_arc):
    arcs = np.linspace(start_arc, end_arc, max(int(np.ceil((end_arc - start_arc) / contours.step)), 1) + 1)
    return float(np.mean(contours.width_at(arcs)))


def split_into_even_passes(segment, contours, s, lane_count=None, span=None):
    """
    Even number of lanes across a meander segment.

    Lane j sits at cross-fraction (j + 0.5) / k from the inner bank, with
    k = even_lane_count(mean width, s) unless ``lane_count`` is given.
    ``span`` limits the lanes to a sub-range of the segment's arcs.

    Raises:
        InfeasibleSpacingError where the river is not wider than ``s``
    """
    start_arc, end_arc = span if span is not None else (segment.start_arc, segment.end_arc)
    _check_spacing(contours, s, start_arc, end_arc)
    width = _mean_width(contours, segment.start_arc, segment.end_arc)
    k = lane_count or even_lane_count(width, s, contours.resolution)
    return [
        Pass(
            polyline=lane_polyline(contours, start_arc, end_arc, (j + 0.5) / k, segment.inner_bank),
            lane_index=j,
            direction=None,
            segment_id=segment.index,
            lane_count=k,
        )
        for j in range(k)
    ]


def assign_pass_directions(passes, flow=None):
    """
    Inner half of the lanes upstream, outer half downstream.

    Lanes come back ordered as pairs (i, k/2 + i). Polylines are turned to
    run in their travel direction; lanes are expected to arrive in
    increasing-arc order.

    Raises:
        ValueError for an odd number of lanes
    """
    k = len(passes)
    if k == 0 or k % 2:
        raise ValueError(f"Direction assignment needs an even number of lanes, got {k}")
    # Increasing arc runs upstream when the start is the downstream end.
    upstream_forward = flow is None or flow.downstream_sign < 0
    lanes = sorted(passes, key=lambda p: p.lane_index)
    half = k // 2

    def directed(lane, direction):
        forward = (direction == Direction.UPSTREAM) == upstream_forward
        polyline = lane.polyline if forward else lane.polyline[::-1].copy()
        return replace(lane, polyline=polyline, direction=direction)

    assigned = []
    for i in range(half):
        inner, outer = lanes[i], lanes[half + i]
        if (inner.lane_index + 0.5) / k > 0.5:
            inner, outer = outer, inner
        assigned.append(directed(inner, Direction.UPSTREAM))
        assigned.append(directed(outer, Direction.DOWNSTREAM))
    return assigned


@dataclass(frozen=True)
class _Piece:
    segment: object
    start_arc: float
    end_arc: float
    lane_count: int


def _piece_lanes(contours, pieces, s, flow):
    """Directed lanes per piece, lanes pulled back s/4 where the inner bank flips."""
    lanes = []
    for i, piece in enumerate(pieces):
        length = piece.end_arc - piece.start_arc
        trim = min(s / 4, length / 4)
        flips_before = i > 0 and pieces[i - 1].segment.inner_bank != piece.segment.inner_bank
        flips_after = i < len(pieces) - 1 and pieces[i + 1].segment.inner_bank != piece.segment.inner_bank
        span = (piece.start_arc + (trim if flips_before else 0.0), piece.end_arc - (trim if flips_after else 0.0))
        passes = split_into_even_passes(piece.segment, contours, s, lane_count=piece.lane_count, span=span)
        lanes.append({p.lane_index: p for p in assign_pass_directions(passes, flow)})
    return lanes


def _nested_tour(blocks, outbound_inner):
    """
    Tour over blocks of pieces sharing a lane count.

    Round r of a block runs out on one lane and back on its pair. Earlier
    rounds turn at the block's far end; the last round carries on into the
    next block before coming back.
    """
    def tour(b):
        block = blocks[b]
        half = len(block[0]) // 2
        order = []
        for r in range(half):
            out_lane, back_lane = (r, half + r) if outbound_inner else (half + r, r)
            order.extend(lanes[out_lane] for lanes in block)
            if r == half - 1 and b + 1 < len(blocks):
                order.extend(tour(b + 1))
            order.extend(lanes[back_lane] for lanes in reversed(block))
        return order

    return tour(0) if blocks else []


def _assemble(model, items, *, algorithm, spacing, closed=True, complete=True, lane_counts=()):
    river_map = model.river_map
    origin = river_map.snap(model.start)
    elements = []
    position = origin
    for item in items:
        connector = create_pass_between(river_map, position, item, kind='approach' if not elements else 'transition')
        if connector is not None:
            elements.append(connector)
        elements.append(item)
        position = item.polyline[-1]
    if closed:
        connector = create_pass_between(river_map, position, origin, kind='return')
        if connector is not None:
            elements.append(connector)
    plan = CoveragePlan(
        elements=tuple(elements),
        spacing=float(spacing),
        algorithm=Algorithm(algorithm),
        start=np.asarray(model.start, dtype=float),
        closed=closed,
        complete=complete,
        lane_counts=tuple(int(k) for k in lane_counts),
        map_digest=river_map.digest,
    )
    logger.info(
        "%s plan: %.0f m, %d passes, lane counts %s",
        plan.algorithm.label, plan.length, len(plan.passes), list(plan.lane_counts),
    )
    return plan


def _block_plan(model, pieces, s, algorithm, lane_counts):
    """Shared back half of M-Cover and Width-Based M-Cover."""
    contours, flow = model.contours, model.flow
    lanes = _piece_lanes(contours, pieces, s, flow)
    blocks = []
    for piece, piece_lanes in zip(pieces, lanes):
        if blocks and blocks[-1][0][0].lane_count == piece.lane_count:
            blocks[-1].append(piece_lanes)
        else:
            blocks.append([piece_lanes])
    # survey_river orders the contours away from the start, so outbound is increasing arc.
    items = _nested_tour(blocks, outbound_inner=flow.start_is_downstream)
    return _assemble(model, items, algorithm=algorithm, spacing=s, lane_counts=lane_counts)


def m_cover(river_map, start, s, *, model=None, orientation=None):
    """
    Meander-aware coverage tour.

    Inner lanes of every segment are covered heading upstream and outer lanes
    heading downstream, with connectors crossing the river where the inner
    bank changes sides.

    Raises:
        InfeasibleSpacingError if ``s`` leaves fewer than two lanes anywhere
    """
    model = model or survey_river(river_map, start, orientation)
    contours = model.contours
    _check_spacing(contours, s)
    pieces = [
        _Piece(segment, segment.start_arc, segment.end_arc,
               even_lane_count(_mean_width(contours, segment.start_arc, segment.end_arc), s, contours.resolution))
        for segment in model.segments
    ]
    return _block_plan(model, pieces, s, Algorithm.M_COVER, [piece.lane_count for piece in pieces])


def _width_bins(contours, s):
    length = contours.length
    edges = np.arange(0.0, length, s)
    edges = np.append(edges, length) if length - edges[-1] > 1e-9 else edges
    widths = np.array([_mean_width(contours, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])
    return edges, widths


def _group_width(group, edges, widths):
    return float(np.average(widths[group], weights=np.diff(edges)[group]))


def _merge_short_groups(groups, edges, widths, min_length, count_of):
    """
    Fold groups shorter than ``min_length`` into a neighbour, shortest first.

    A short group joins the neighbour whose width is closer to its own, and
    neighbours that end up with the same lane count are joined as well.
    """
    groups = [list(g) for g in groups]
    while len(groups) > 1:
        lengths = [edges[g[-1] + 1] - edges[g[0]] for g in groups]
        i = int(np.argmin(lengths))
        if lengths[i] >= min_length:
            break
        own = _group_width(groups[i], edges, widths)
        neighbours = [j for j in (i - 1, i + 1) if 0 <= j < len(groups)]
        j = min(neighbours, key=lambda n: abs(_group_width(groups[n], edges, widths) - own))
        lo, hi = min(i, j), max(i, j)
        groups[lo:hi + 1] = [groups[lo] + groups[hi]]

        joined = [groups[0]]
        for group in groups[1:]:
            if count_of(_group_width(joined[-1], edges, widths)) == count_of(_group_width(group, edges, widths)):
                joined[-1] = joined[-1] + group
            else:
                joined.append(group)
        groups = joined
    return groups


def get_same_width_clusters(contours, flow, s, even=True):
    """
    Group the river into stretches of similar width.

    The width profile is sampled every ``s`` meters. A new cluster opens when
    the rounded lane count changes and the new count holds for at least two
    samples, or when a sample strays ``s`` or more from the cluster's running
    mean width. Clusters shorter than CLUSTER_MIN_WIDTHS median river widths
    are then folded into a neighbour. Lane counts round to even numbers (at
    least 2), or to the nearest integer (at least 1) when ``even`` is False.
    """
    if not s > 0:
        raise ValueError(f"Spacing must be positive, got {s}")
    rounding = round_to_even if even else round_half_up
    edges, widths = _width_bins(contours, s)
    counts = [rounding(w / s) for w in widths]

    groups = [[0]]
    current = counts[0]
    for i in range(1, len(widths)):
        members = widths[groups[-1]]
        persists = i + 1 < len(widths) and counts[i + 1] == counts[i]
        if (counts[i] != current and persists) or abs(widths[i] - members.mean()) >= s:
            groups.append([i])
            current = counts[i]
        else:
            groups[-1].append(i)

    min_length = app_settings('CLUSTER_MIN_WIDTHS') * float(np.median(contours.widths))
    groups = _merge_short_groups(groups, edges, widths, min_length, lambda w: rounding(w / s))

    clusters = []
    for group in groups:
        nominal = _group_width(group, edges, widths)
        clusters.append(SameWidthCluster(
            start_arc=float(edges[group[0]]),
            end_arc=float(edges[group[-1] + 1]),
            nominal_width=nominal,
            pass_count=rounding(nominal / s),
        ))
    if flow is not None and flow.from_far_end:
        clusters.reverse()
    logger.info("Width clusters at %.1f m spacing: %s", s, [c.pass_count for c in clusters])
    return clusters


def width_based_m_cover(river_map, start, s, *, model=None, orientation=None):
    """
    M-Cover over clusters of similar width.

    Each cluster keeps one even lane count; the meander segments inside it
    decide which lanes run upstream.
    """
    model = model or survey_river(river_map, start, orientation)
    contours = model.contours
    _check_spacing(contours, s)
    clusters = get_same_width_clusters(contours, model.flow, s)
    pieces = []
    for cluster in clusters:
        for segment in model.segments:
            lo = max(segment.start_arc, cluster.start_arc)
            hi = min(segment.end_arc, cluster.end_arc)
            if hi - lo > 1e-9:
                pieces.append(_Piece(segment, lo, hi, cluster.pass_count))
    return _block_plan(model, pieces, s, Algorithm.WIDTH_M_COVER, [c.pass_count for c in clusters])


def _centerline_transit(contours, start_arc, end_arc, kind):
    polyline = geometry.substring(contours.centerline, start_arc, end_arc, contours.centerline_arcs)
    return Connector(polyline, kind) if len(polyline) > 1 else None


def l_cover(river_map, start, s, *, model=None, orientation=None):
    """
    Longitudinal baseline over same-width clusters.

    Lanes are counted from the left bank, lane counts round to the nearest
    integer, and each cluster is swept back and forth taking the nearest
    unvisited lane next. Travel direction follows the sweep, not the bends.
    A transit along the centerline closes the tour when the sweep ends at
    the far end.
    """
    model = model or survey_river(river_map, start, orientation)
    contours, flow = model.contours, model.flow
    if not s > 0:
        raise ValueError(f"Spacing must be positive, got {s}")
    clusters = get_same_width_clusters(contours, flow, s, even=False)
    forward_direction = Direction.UPSTREAM if flow.start_is_downstream else Direction.DOWNSTREAM
    backward_direction = Direction.DOWNSTREAM if flow.start_is_downstream else Direction.UPSTREAM

    items = []
    position = model.river_map.snap(model.start)
    at_near_end = True
    for c, cluster in enumerate(clusters):
        if c > 0 and at_near_end:
            # The previous cluster had an even lane count; cross it to reach this one.
            transit = _centerline_transit(contours, clusters[c - 1].start_arc, cluster.start_arc, 'transit')
            if transit is not None:
                items.append(transit)
                position = transit.polyline[-1]
        k = cluster.pass_count
        lanes = [lane_polyline(contours, cluster.start_arc, cluster.end_arc, (j + 0.5) / k, Bank.LEFT) for j in range(k)]
        remaining = list(range(k))
        at_near_end = True
        while remaining:
            ends = [lanes[j][0] if at_near_end else lanes[j][-1] for j in remaining]
            gaps = [np.hypot(*(end - position)) for end in ends]
            j = remaining.pop(int(np.argmin(gaps)))
            polyline = lanes[j] if at_near_end else lanes[j][::-1].copy()
            items.append(Pass(
                polyline=polyline,
                lane_index=j,
                direction=forward_direction if at_near_end else backward_direction,
                segment_id=c,
                lane_count=k,
            ))
            position = polyline[-1]
            at_near_end = not at_near_end

    last_arc = contours.length if not at_near_end else clusters[-1].start_arc
    transit = _centerline_transit(contours, last_arc, 0.0, 'return')
    if transit is not None:
        items.append(transit)
    return _assemble(model, items, algorithm=Algorithm.L_COVER, spacing=s, lane_counts=[c.pass_count for c in clusters])


def t_cover(river_map, start, s, *, model=None, orientation=None):
    """
    Transversal baseline: bank-to-bank transects every ``s`` meters of centerline.
    A last transect sits at the far end when more than s / 2 of river is left.

    Consecutive transects are joined along the bank they end on, and the tour
    returns to the start along the bank the last transect ends on.
    """
    model = model or survey_river(river_map, start, orientation)
    contours = model.contours
    if not s > 0:
        raise ValueError(f"Spacing must be positive, got {s}")
    inset = BANK_INSET_CELLS * contours.resolution
    arcs = np.arange(int(np.floor(contours.length / s)) + 1) * s
    if contours.length - arcs[-1] > s / 2:
        # A far-end transect covers a remainder wider than half the spacing.
        arcs = np.append(arcs, contours.length)

    def along_bank(side, lo, hi, kind):
        samples = contours.centerline_arcs
        between = samples[(samples > min(lo, hi)) & (samples < max(lo, hi))]
        between = between if hi > lo else between[::-1]
        points = contours.inset(np.concatenate([[lo], between, [hi]]), inset, side)
        return Connector(geometry.dedupe(points), kind)

    items = []
    side = Bank.LEFT
    for i, arc in enumerate(arcs):
        if i > 0:
            items.append(along_bank(side, arcs[i - 1], arc, 'bank'))
        near = contours.inset(arc, inset, side)
        far = contours.inset(arc, inset, side.opposite)
        items.append(Pass(np.vstack([near, far]), lane_index=i, direction=Direction.ACROSS, segment_id=i, lane_count=1))
        side = side.opposite
    items.append(along_bank(side, arcs[-1], 0.0, 'return'))
    return _assemble(model, items, algorithm=Algorithm.T_COVER, spacing=s, lane_counts=())


def z_cover(river_map, start, s, *, model=None, orientation=None, advance=None):
    """
    Zig-zag baseline: one pass bouncing between the banks.

    Each bounce advances ``advance`` meters of centerline (2 * s by default)
    and touches the bank half a cell in. The touch point at arc 0 opens the
    pass, so n bounces make n diagonal legs. The plan is neither closed nor
    complete.
    """
    model = model or survey_river(river_map, start, orientation)
    contours, flow = model.contours, model.flow
    if not s > 0:
        raise ValueError(f"Spacing must be positive, got {s}")
    advance = 2 * s if advance is None else advance
    inset = ZIGZAG_INSET_CELLS * contours.resolution
    arcs = np.arange(0.0, contours.length, advance)
    if contours.length - arcs[-1] > contours.resolution:
        arcs = np.append(arcs, contours.length)
    direction = Direction.UPSTREAM if flow.start_is_downstream else Direction.DOWNSTREAM

    bounces = [contours.inset(arc, inset, Bank.LEFT if i % 2 == 0 else Bank.RIGHT) for i, arc in enumerate(arcs)]
    items = [
        Pass(np.vstack([a, b]), lane_index=i, direction=direction, segment_id=0, lane_count=1)
        for i, (a, b) in enumerate(zip(bounces[:-1], bounces[1:]))
    ]
    return _assemble(model, items, algorithm=Algorithm.Z_COVER, spacing=s, closed=False, complete=False)


PLANNERS = {
    Algorithm.M_COVER: m_cover,
    Algorithm.WIDTH_M_COVER: width_based_m_cover,
    Algorithm.L_COVER: l_cover,
    Algorithm.T_COVER: t_cover,
    Algorithm.Z_COVER: z_cover,
}


def plan_coverage(algorithm, river_map, start, s, *, model=None, orientation=None):
    """Run the planner registered for ``algorithm``."""
    return PLANNERS[Algorithm(algorithm)](river_map, start, s, model=model, orientation=orientation)

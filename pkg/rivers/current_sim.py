"""
Meander-conditioned current fields and plan traversal times.

Water runs slower on the inner side of a bend. The synthetic field grows
from v_min at the inner bank to v_max at the outer bank of every meander
segment, follows the downstream centerline tangent, and blends linearly
across the cross-sections where the inner bank changes sides.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from django.db import models
from scipy import ndimage
from scipy.spatial import cKDTree

from . import geometry
from .conf import resolve
from .exceptions import SimulationError
from .planner import Direction, Pass
from .river_map import Bank

logger = logging.getLogger(__name__)


class CurrentProfile(models.TextChoices):
    LINEAR = 'linear', 'Linear in cross-fraction'
    POWER = 'power', 'Power law in cross-fraction'


def profile_value(fraction, profile, exponent):
    """Shape of the inner-to-outer speed increase, 0 at the inner bank and 1 at the outer bank."""
    fraction = np.clip(fraction, 0.0, 1.0)
    if CurrentProfile(profile) == CurrentProfile.LINEAR:
        return fraction
    return fraction ** exponent


@dataclass(frozen=True, eq=False)
class CurrentField:
    """
    Per-cell water velocity.

    Fields:
    - velocity: (rows, cols, 2) array in m/s, zero on Obstacle cells
    - grid, transform, resolution: the RiverMap the field was made for
    - v_min, v_max: magnitude bounds in m/s
    - arcs, fractions: centerline arc and cross-fraction from the left bank per Free cell (NaN elsewhere)
    - map_digest: digest of the RiverMap
    """

    velocity: np.ndarray
    grid: np.ndarray
    transform: object
    resolution: float
    v_min: float
    v_max: float
    arcs: np.ndarray = None
    fractions: np.ndarray = None
    map_digest: str = ''
    _nearest: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._nearest is None:
            # Obstacle cells read the velocity of their nearest Free cell.
            nearest = ndimage.distance_transform_edt(~self.grid, return_distances=False, return_indices=True)
            object.__setattr__(self, '_nearest', nearest)

    @classmethod
    def uniform(cls, river_map, vector):
        """The same velocity on every Free cell."""
        vector = np.asarray(vector, dtype=float)
        velocity = np.zeros(river_map.grid.shape + (2,))
        velocity[river_map.grid] = vector
        speed = float(np.hypot(*vector))
        return cls(
            velocity=velocity, grid=river_map.grid, transform=river_map.transform,
            resolution=river_map.resolution, v_min=speed, v_max=speed, map_digest=river_map.digest,
        )

    def at(self, points):
        """Velocity at metric ``points``; points off the grid take the nearest edge cell."""
        points = np.asarray(points, dtype=float)
        col, row = ~self.transform * (points[..., 0], points[..., 1])
        height, width = self.grid.shape
        rows = np.clip(np.floor(row).astype(int), 0, height - 1)
        cols = np.clip(np.floor(col).astype(int), 0, width - 1)
        return self.velocity[self._nearest[0][rows, cols], self._nearest[1][rows, cols]]

    def speed(self):
        return np.hypot(self.velocity[..., 0], self.velocity[..., 1])

    def scaled(self, factor):
        """The same field with every velocity multiplied by ``factor``."""
        return replace(
            self,
            velocity=self.velocity * factor,
            v_min=self.v_min * factor,
            v_max=self.v_max * factor,
        )

    def to_frame(self):
        """Free-cell velocities as a table with columns cell_x, cell_y, vx, vy."""
        rows, cols = np.nonzero(self.grid)
        x, y = self.transform * (cols + 0.5, rows + 0.5)
        vx, vy = self.velocity[rows, cols].T
        return pd.DataFrame({'cell_x': x, 'cell_y': y, 'vx': vx, 'vy': vy})


@dataclass(frozen=True)
class BoatModel:
    speed_through_water: float
    turn_penalty: float = 0.0

    def __post_init__(self):
        if not self.speed_through_water > 0:
            raise ValueError(f"Boat speed must be positive, got {self.speed_through_water}")
        if self.turn_penalty < 0:
            raise ValueError(f"Turn penalty must not be negative, got {self.turn_penalty}")


@dataclass(frozen=True)
class LegTime:
    index: int
    kind: str
    direction: str
    length: float
    time: float


@dataclass(frozen=True)
class TraversalReport:
    """
    Time and distance for one plan.

    Fields:
    - total_time: seconds, turn penalties included
    - total_length: meters
    - legs: per-element LegTime breakdown in travel order
    - turn_time: seconds spent on turn penalties
    """

    total_time: float
    total_length: float
    legs: tuple
    turn_time: float = 0.0

    def time_by_direction(self, direction):
        return float(sum(leg.time for leg in self.legs if leg.direction == direction))

    @property
    def ratios(self):
        """Upstream to downstream time on passes, and mean speed over ground."""
        downstream = self.time_by_direction(Direction.DOWNSTREAM)
        upstream = self.time_by_direction(Direction.UPSTREAM)
        return {
            'upstream_to_downstream': upstream / downstream if downstream else float('nan'),
            'mean_speed': self.total_length / self.total_time if self.total_time else float('nan'),
        }


def calibrate_v_max(boat_speed=None, ratio=None, lane_fraction=0.75, profile=None, exponent=None, v_min=None):
    """
    v_max giving the lane at ``lane_fraction`` an upstream:downstream time ratio of ``ratio``.

    The default lane is the outer lane of a two-lane plan.

    Raises:
        SimulationError if no such field exists
    """
    boat_speed = resolve(boat_speed, 'BOAT_SPEED')
    ratio = resolve(ratio, 'UPSTREAM_RATIO')
    profile = resolve(profile, 'CURRENT_PROFILE')
    exponent = resolve(exponent, 'CURRENT_EXPONENT')
    v_min = resolve(v_min, 'V_MIN')
    if ratio < 1:
        raise SimulationError(f"Upstream ratio must be at least 1, got {ratio}")
    # (b + v) / (b - v) = ratio
    lane_speed = boat_speed * (ratio - 1) / (ratio + 1)
    shape = float(profile_value(lane_fraction, profile, exponent))
    if lane_speed < v_min or shape <= 0:
        raise SimulationError(f"Cannot reach ratio {ratio} with v_min {v_min} at lane fraction {lane_fraction}")
    return v_min + (lane_speed - v_min) / shape


def synth_current_field(river_map, segments, v_min, v_max, *, contours, flow, blend_length=0.0,
                        profile=None, exponent=None):
    """
    Downstream current over the Free cells of ``river_map``.

    In a meander segment the speed is v_min + (v_max - v_min) * profile(u)
    with u the cross-fraction from the inner bank; straight segments run at
    (v_min + v_max) / 2. Within ``blend_length / 2`` of a boundary between
    segments the two neighbours' speeds blend linearly.

    Raises:
        SimulationError for v_min > v_max or negative speeds
    """
    if v_min < 0 or v_max < 0:
        raise SimulationError(f"Current speeds must not be negative (v_min {v_min}, v_max {v_max})")
    if v_min > v_max:
        raise SimulationError(f"v_min {v_min} exceeds v_max {v_max}")
    profile = resolve(profile, 'CURRENT_PROFILE')
    exponent = resolve(exponent, 'CURRENT_EXPONENT')

    rows, cols = np.nonzero(river_map.grid)
    points = river_map.cell_centers(rows, cols)
    dense = geometry.resample(contours.centerline, river_map.resolution / 2)
    dense_arcs = geometry.arc_lengths(dense)
    tangents = np.gradient(dense, axis=0)
    tangents /= np.hypot(*tangents.T)[:, None]
    _, nearest = cKDTree(dense).query(points)
    arcs = dense_arcs[nearest]

    left = contours.section(arcs, Bank.LEFT)
    right = contours.section(arcs, Bank.RIGHT)
    span = right - left
    fractions = np.clip(np.sum((points - left) * span, axis=1) / np.sum(span * span, axis=1), 0.0, 1.0)

    ordered = sorted(segments, key=lambda s: s.start_arc)

    def magnitude(segment, u_left):
        if segment.is_straight:
            return np.full_like(u_left, 0.5 * (v_min + v_max))
        u_inner = u_left if segment.inner_bank == Bank.LEFT else 1.0 - u_left
        return v_min + (v_max - v_min) * profile_value(u_inner, profile, exponent)

    starts = np.array([s.start_arc for s in ordered])
    owner = np.clip(np.searchsorted(starts, arcs, side='right') - 1, 0, len(ordered) - 1)
    speed = np.empty(len(points))
    for i, segment in enumerate(ordered):
        mine = owner == i
        speed[mine] = magnitude(segment, fractions[mine])

    half = blend_length / 2
    if half > 0:
        for before, after in zip(ordered[:-1], ordered[1:]):
            boundary = after.start_arc
            zone = np.abs(arcs - boundary) < half
            if zone.any():
                t = (arcs[zone] - (boundary - half)) / (2 * half)
                speed[zone] = (1 - t) * magnitude(before, fractions[zone]) + t * magnitude(after, fractions[zone])

    velocity = np.zeros(river_map.grid.shape + (2,))
    velocity[rows, cols] = speed[:, None] * tangents[nearest] * flow.downstream_sign
    arc_grid = np.full(river_map.grid.shape, np.nan)
    fraction_grid = np.full(river_map.grid.shape, np.nan)
    arc_grid[rows, cols] = arcs
    fraction_grid[rows, cols] = fractions
    logger.info("Synthesized %s current field: %.2f-%.2f m/s over %d cells", profile, v_min, v_max, len(points))
    return CurrentField(
        velocity=velocity,
        grid=river_map.grid,
        transform=river_map.transform,
        resolution=river_map.resolution,
        v_min=float(v_min),
        v_max=float(v_max),
        arcs=arc_grid,
        fractions=fraction_grid,
        map_digest=river_map.digest,
    )


def field_for(model, v_min=None, v_max=None, profile=None, exponent=None, boat_speed=None, ratio=None):
    """
    Current field for a surveyed river with settings as defaults.

    A missing v_max is calibrated from the boat speed and upstream ratio.
    """
    v_min = resolve(v_min, 'V_MIN')
    profile = resolve(profile, 'CURRENT_PROFILE')
    exponent = resolve(exponent, 'CURRENT_EXPONENT')
    v_max = resolve(v_max, 'V_MAX')
    if v_max is None:
        v_max = calibrate_v_max(boat_speed, ratio, profile=profile, exponent=exponent, v_min=v_min)
    return synth_current_field(
        model.river_map, model.segments, v_min, v_max,
        contours=model.contours, flow=model.flow, blend_length=model.delta_w.delta_w,
        profile=profile, exponent=exponent,
    )


def _subdivide(polyline, step):
    pieces = np.diff(polyline, axis=0)
    lengths = np.hypot(*pieces.T)
    counts = np.maximum(np.ceil(lengths / step).astype(int), 1)
    starts = np.repeat(polyline[:-1], counts, axis=0)
    deltas = np.repeat(pieces / counts[:, None], counts, axis=0)
    offsets = np.concatenate([np.arange(c) for c in counts])
    return np.vstack([starts + deltas * offsets[:, None], polyline[-1:]])


def polyline_time(polyline, current, boat):
    """
    Seconds to follow ``polyline`` and its sub-segment headings.

    Raises:
        SimulationError if the current stops the boat anywhere
    """
    if len(polyline) < 2:
        return 0.0, 0.0, np.empty(0)
    points = _subdivide(np.asarray(polyline, dtype=float), current.resolution)
    pieces = np.diff(points, axis=0)
    lengths = np.hypot(*pieces.T)
    keep = lengths > 0
    pieces, lengths, starts = pieces[keep], lengths[keep], points[:-1][keep]
    if not len(lengths):
        return 0.0, 0.0, np.empty(0)
    headings = pieces / lengths[:, None]
    ground = boat.speed_through_water + np.sum(current.at(starts + pieces / 2) * headings, axis=1)
    if np.any(ground <= 0):
        raise SimulationError("Current exceeds the boat speed; ground speed is not positive")
    return float(np.sum(lengths / ground)), float(np.sum(lengths)), np.arctan2(headings[:, 1], headings[:, 0])


def traverse_time(plan, current, boat):
    """
    Simulated time to run ``plan`` through ``current``.

    Each sub-segment of at most one cell takes length / (boat speed + v . t)
    seconds; every radian of heading change adds the boat's turn penalty.

    Raises:
        SimulationError for a plan made on another map or a non-positive ground speed
    """
    if plan.map_digest and current.map_digest and plan.map_digest != current.map_digest:
        raise SimulationError("Plan and current field were made on different maps")
    legs = []
    headings = []
    for index, element in enumerate(plan.elements):
        time, length, element_headings = polyline_time(element.polyline, current, boat)
        if isinstance(element, Pass):
            kind, direction = 'pass', str(element.direction)
        else:
            kind, direction = element.kind, ''
        legs.append(LegTime(index, kind, direction, length, time))
        headings.append(element_headings)
    headings = np.concatenate(headings) if headings else np.empty(0)
    turning = np.abs(np.angle(np.exp(1j * np.diff(headings)))).sum() if len(headings) > 1 else 0.0
    turn_time = boat.turn_penalty * float(turning)
    return TraversalReport(
        total_time=float(sum(leg.time for leg in legs)) + turn_time,
        total_length=float(sum(leg.length for leg in legs)),
        legs=tuple(legs),
        turn_time=turn_time,
    )


@dataclass(frozen=True, eq=False)
class Comparison:
    table: pd.DataFrame
    reports: tuple

    @property
    def best(self):
        return self.table.loc[self.table['time_s'].idxmin(), 'algorithm']

    def margin(self, faster, slower):
        """Fraction of ``slower``'s time saved by ``faster``."""
        times = self.table.set_index('algorithm')['time_s']
        return 1.0 - times[faster] / times[slower]


def compare_plans(plans, current, boat):
    """
    Traverse every plan in the same current.

    Returns:
        Comparison whose table has columns algorithm, length_m, time_s, ratio_vs_best

    Raises:
        SimulationError if the plans were made on different maps
    """
    digests = {plan.map_digest for plan in plans}
    if len(digests) > 1:
        raise SimulationError("Plans were made on different maps")
    reports = tuple(traverse_time(plan, current, boat) for plan in plans)
    best = min(report.total_time for report in reports)
    table = pd.DataFrame({
        'algorithm': [str(plan.algorithm) for plan in plans],
        'length_m': [report.total_length for report in reports],
        'time_s': [report.total_time for report in reports],
        'ratio_vs_best': [report.total_time / best for report in reports],
    })
    return Comparison(table=table, reports=reports)

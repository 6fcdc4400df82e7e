"""
Bend classification and meander segmentation.

Two consecutive tangents to a bank meet on the water side when the bank is
the inner bank of a bend, and on land when it is the outer bank. Labels from
both banks vote on which bank is inner along the centerline, and maximal
runs of one polarity become meander segments.
"""
import logging
from dataclasses import dataclass

import numpy as np
from django.db import models

from . import geometry
from .conf import app_settings
from .exceptions import GeometryError
from .river_map import Bank

logger = logging.getLogger(__name__)


class BendLabel(models.TextChoices):
    INNER = 'inner', 'Inner bend'
    OUTER = 'outer', 'Outer bend'
    STRAIGHT = 'straight', 'Straight'


@dataclass(frozen=True)
class TangentStep:
    """Arc-length step between consecutive tangents, in meters."""

    delta_w: float

    @classmethod
    def initialize(cls, contours, delta_w=None):
        """
        Default step: the larger of a few cells and a fraction of the median width.

        Raises:
            ValueError if the step is shorter than two cells
        """
        resolution = contours.resolution
        if delta_w is None:
            delta_w = max(
                app_settings('TANGENT_STEP_CELLS') * resolution,
                app_settings('TANGENT_STEP_WIDTH_FRACTION') * float(np.median(contours.widths)),
            )
        if delta_w < 2 * resolution:
            raise ValueError(f"Tangent step {delta_w} m is shorter than two cells ({2 * resolution} m)")
        return cls(float(delta_w))


@dataclass(frozen=True)
class Tangent:
    point: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True, eq=False)
class MeanderSegment:
    """
    A stretch of river with a constant inner bank.

    Fields:
    - index: position in coverage order
    - start_arc, end_arc: centerline arcs bounding the segment
    - inner_bank: Bank on the inside of the bend
    - is_straight: True for straight stretches, which borrow a neighbour's inner bank
    - entry_section, exit_section: (left point, right point) cross-sections
    - apex: centerline point of largest curvature
    """

    index: int
    start_arc: float
    end_arc: float
    inner_bank: Bank
    is_straight: bool
    entry_section: np.ndarray
    exit_section: np.ndarray
    apex: np.ndarray

    @property
    def length(self):
        return self.end_arc - self.start_arc

    @property
    def outer_bank(self):
        return self.inner_bank.opposite


@dataclass(frozen=True)
class BendSample:
    bank_arc: float
    centerline_arc: float
    bank: Bank
    label: BendLabel


def _step_of(delta_w):
    return float(getattr(delta_w, 'delta_w', delta_w))


def tangent_at(contour, arc, delta_w, cum=None):
    """
    Symmetric secant tangent at ``arc``.

    Raises:
        GeometryError if ``arc`` is closer than delta_w / 2 to either end
    """
    step = _step_of(delta_w)
    cum = geometry.arc_lengths(contour) if cum is None else cum
    half = step / 2
    if arc < half - 1e-9 or arc > cum[-1] - half + 1e-9:
        raise GeometryError(f"Arc {arc:.2f} m is outside [{half:.2f}, {cum[-1] - half:.2f}] m")
    behind, point, ahead = geometry.point_at(contour, [arc - half, arc, arc + half], cum)
    return Tangent(point=point, direction=geometry.unit(ahead - behind))


def width_across(river_map, point, direction):
    """
    Free run across the river from a bank ``point``, along whichever normal
    of ``direction`` holds the water. Sampling starts one cell out.
    """
    normal = geometry.left_normal(geometry.unit(direction))
    height, width = river_map.shape
    offsets = np.arange(2.0, 2 * np.hypot(height, width) + 1.0) * (river_map.resolution / 2)
    runs = []
    for side in (normal, -normal):
        free = river_map.is_free(np.asarray(point, dtype=float) + offsets[:, None] * side)
        blocked = np.flatnonzero(~free)
        runs.append(float(offsets[blocked[0]] if len(blocked) else offsets[-1]))
    return max(runs)


def classify_bend(river_map, contour, arc, delta_w, local_width=None, cum=None):
    """
    Label a bank point Inner, Outer or Straight from the intersection of the
    tangents half a step either side of it.

    Intersections farther than STRAIGHT_DISTANCE_WIDTHS local widths away
    mean Straight; without ``local_width`` the width is measured across the
    map. The intersection is looked up with a 3x3 cell vote when it is more
    than two cells off the bank. Closer than that, it is in the river when
    it lies on the bank's water side.
    """
    step = _step_of(delta_w)
    cum = geometry.arc_lengths(contour) if cum is None else cum
    before = tangent_at(contour, arc - step / 2, step, cum)
    after = tangent_at(contour, arc + step / 2, step, cum)

    turn = abs(geometry.signed_turn(before.direction, after.direction))
    if turn < np.radians(app_settings('STRAIGHT_ANGLE_DEG')):
        return BendLabel.STRAIGHT
    crossing = geometry.line_intersection(before.point, before.direction, after.point, after.direction)
    if crossing is None:
        return BendLabel.STRAIGHT
    anchor = tangent_at(contour, arc, step, cum)
    offset = crossing - anchor.point
    distance = float(np.hypot(*offset))
    if local_width is None:
        local_width = width_across(river_map, anchor.point, anchor.direction)
    if distance > app_settings('STRAIGHT_DISTANCE_WIDTHS') * local_width:
        return BendLabel.STRAIGHT

    resolution = river_map.resolution
    if distance > 2 * resolution:
        return BendLabel.INNER if river_map.majority_free(crossing) else BendLabel.OUTER

    normal = geometry.left_normal(anchor.direction)
    nudge = 2 * resolution * normal
    water_left = bool(river_map.majority_free(anchor.point + nudge))
    water_right = bool(river_map.majority_free(anchor.point - nudge))
    if water_left == water_right:
        return BendLabel.INNER if river_map.majority_free(crossing) else BendLabel.OUTER
    water_side = normal if water_left else -normal
    return BendLabel.INNER if float(np.dot(offset, water_side)) > 0 else BendLabel.OUTER


def label_banks(river_map, contours, delta_w):
    """Bend labels on both banks every ``delta_w`` meters, as BendSample rows."""
    step = _step_of(delta_w)
    samples = []
    for side in (Bank.LEFT, Bank.RIGHT):
        bank = contours.bank(side)
        cum = geometry.arc_lengths(bank)
        if cum[-1] < 2 * step:
            continue
        arcs = np.arange(step, cum[-1] - step + 1e-9, step)
        centerline_arcs = contours.to_centerline_arc(side, arcs)
        widths = contours.width_at(centerline_arcs)
        for arc, centerline_arc, width in zip(arcs, centerline_arcs, widths):
            label = classify_bend(river_map, bank, arc, step, local_width=width, cum=cum)
            samples.append(BendSample(float(arc), float(centerline_arc), side, label))
    return samples


# Which bank each (bank, label) pair votes as inner: +1 left, -1 right.
VOTES = {
    (Bank.LEFT, BendLabel.INNER): 1,
    (Bank.LEFT, BendLabel.OUTER): -1,
    (Bank.RIGHT, BendLabel.INNER): -1,
    (Bank.RIGHT, BendLabel.OUTER): 1,
}


def _runs(values):
    """(value, first, stop) for maximal runs of equal values."""
    runs = []
    first = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] != values[first]:
            runs.append([values[first], first, i])
            first = i
    return runs


def _bin_polarity(samples, length, step):
    count = max(int(np.ceil(length / step)), 1)
    totals = np.zeros(count, dtype=int)
    seen = np.zeros(count, dtype=bool)
    for sample in samples:
        b = min(int(sample.centerline_arc // step), count - 1)
        totals[b] += VOTES.get((sample.bank, sample.label), 0)
        seen[b] = True
    polarity = np.sign(totals)
    if not seen.any():
        return np.zeros(count, dtype=int)
    # Bins without samples (the ends) copy the nearest sampled bin.
    known = np.flatnonzero(seen)
    nearest = known[np.abs(np.arange(count)[:, None] - known[None, :]).argmin(axis=1)]
    return polarity[nearest]


def _clean_polarity(polarity, straight_bins):
    values = [int(v) for v in polarity]

    # Single bins between two equal neighbours take their value.
    for i in range(1, len(values) - 1):
        if values[i - 1] == values[i + 1] != values[i]:
            values[i] = values[i - 1]

    # Short straight runs are split between their neighbours.
    for value, first, stop in _runs(values):
        if value != 0 or stop - first > straight_bins:
            continue
        before = values[first - 1] if first > 0 else None
        after = values[stop] if stop < len(values) else None
        if before is None and after is None:
            continue
        if before is None:
            before = after
        if after is None:
            after = before
        middle = (first + stop) // 2 if before != after else stop
        values[first:middle] = [before] * (middle - first)
        values[middle:stop] = [after] * (stop - middle)
    return values


def centerline_curvature(contours, step):
    """Signed curvature along the centerline sampled every ``step`` meters."""
    points = geometry.resample(contours.centerline, step)
    arcs = geometry.arc_lengths(points)
    if len(points) < 3:
        return arcs, np.zeros(len(points))
    headings = np.unwrap(np.arctan2(*np.gradient(points, axis=0)[:, ::-1].T))
    return arcs, np.gradient(headings, arcs)


def get_meander_segments(river_map, contours, flow, delta_w=None):
    """
    Split the river into meander segments in coverage order.

    Both banks are classified every delta_w meters; votes are binned along
    the centerline and maximal runs of one polarity become segments. Straight
    runs up to STRAIGHT_RUN_STEPS bins are absorbed by their neighbours;
    longer ones become straight segments with the inner bank of the nearest
    upstream meander (the downstream one at the upstream end, Left if none).

    Raises:
        GeometryError if the contours are empty
    """
    if delta_w is None:
        delta_w = TangentStep.initialize(contours)
    step = _step_of(delta_w)
    length = contours.length
    if length <= 0 or len(contours.centerline) < 2:
        raise GeometryError("Cannot segment empty contours")

    samples = label_banks(river_map, contours, step)
    polarity = _bin_polarity(samples, length, step)
    values = _clean_polarity(polarity, app_settings('STRAIGHT_RUN_STEPS'))
    runs = _runs(values)

    # Upstream is increasing arc when the start is the downstream end.
    upstream = 1 if flow.downstream_sign < 0 else -1
    meanders = [i for i, run in enumerate(runs) if run[0] != 0]
    curvature_arcs, curvature = centerline_curvature(contours, step / 2)

    segments = []
    for i, (value, first, stop) in enumerate(runs):
        start_arc = first * step if i > 0 else 0.0
        end_arc = min(stop * step, length) if i < len(runs) - 1 else length
        if value == 0:
            ahead = [j for j in meanders if (j - i) * upstream > 0]
            behind = [j for j in meanders if (j - i) * upstream < 0]
            if ahead:
                donor = min(ahead, key=lambda j: abs(j - i))
            elif behind:
                donor = min(behind, key=lambda j: abs(j - i))
            else:
                donor = None
            inner = Bank.LEFT if donor is None or runs[donor][0] > 0 else Bank.RIGHT
        else:
            inner = Bank.LEFT if value > 0 else Bank.RIGHT

        within = (curvature_arcs >= start_arc) & (curvature_arcs <= end_arc)
        if value != 0 and within.any():
            apex_arc = curvature_arcs[within][np.argmax(np.abs(curvature[within]))]
        else:
            apex_arc = 0.5 * (start_arc + end_arc)
        sections = [
            np.vstack([contours.section(arc, Bank.LEFT), contours.section(arc, Bank.RIGHT)])
            for arc in (start_arc, end_arc)
        ]
        segments.append(MeanderSegment(
            index=i,
            start_arc=float(start_arc),
            end_arc=float(end_arc),
            inner_bank=inner,
            is_straight=value == 0,
            entry_section=sections[0],
            exit_section=sections[1],
            apex=geometry.point_at(contours.centerline, apex_arc, contours.centerline_arcs),
        ))

    if flow.from_far_end:
        segments = [
            MeanderSegment(
                index=n, start_arc=s.start_arc, end_arc=s.end_arc, inner_bank=s.inner_bank,
                is_straight=s.is_straight, entry_section=s.exit_section, exit_section=s.entry_section,
                apex=s.apex,
            )
            for n, s in enumerate(reversed(segments))
        ]
    logger.info(
        "Found %d meander segments (%d straight) with a %.1f m tangent step",
        len(segments), sum(s.is_straight for s in segments), step,
    )
    return segments

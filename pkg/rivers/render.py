"""
Static SVG figures of a river and its coverage plan.

Layers, bottom to top: water between the banks, banks, connectors (dashed),
passes colored by travel direction, bend markers and the start point.
Coordinates are rounded to two decimals so identical inputs give identical
bytes.
"""
import logging

import drawsvg as draw
import numpy as np

from .meander import BendLabel
from .planner import Direction

logger = logging.getLogger(__name__)

PADDING = 20
DECIMALS = 2

COLORS = {
    'water': '#cfe3f3',
    'bank': '#3b5b7a',
    Direction.UPSTREAM: '#d95f02',
    Direction.DOWNSTREAM: '#1b9e77',
    Direction.ACROSS: '#7570b3',
    None: '#7570b3',
    'connector': '#6f6f6f',
    BendLabel.INNER: '#e7298a',
    BendLabel.OUTER: '#e7298a',
    'start': '#111111',
}


class Canvas:
    """Metric map frame to SVG pixels, y pointing down."""

    def __init__(self, bounds, width):
        minx, miny, maxx, maxy = bounds
        span = max(maxx - minx, maxy - miny, 1e-9)
        self.scale = (width - 2 * PADDING) / span
        self.minx, self.maxy = minx, maxy
        self.width = round(width)
        self.height = round((maxy - miny) * self.scale + 2 * PADDING)

    def flat(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x = (points[:, 0] - self.minx) * self.scale + PADDING
        y = (self.maxy - points[:, 1]) * self.scale + PADDING
        return [round(float(v), DECIMALS) for v in np.column_stack([x, y]).ravel()]


def _polyline(canvas, points, **style):
    return draw.Lines(*canvas.flat(points), close=False, fill='none', **style)


def render_plan(contours, plan=None, samples=(), *, width=1000):
    """
    Drawing of ``contours`` with an optional ``plan`` and BendSample markers.

    Returns:
        drawsvg.Drawing
    """
    canvas = Canvas(contours.bounds(), width)
    drawing = draw.Drawing(canvas.width, canvas.height)
    drawing.append(draw.Rectangle(0, 0, canvas.width, canvas.height, fill='#ffffff'))

    water = np.vstack([contours.left_bank, contours.right_bank[::-1]])
    drawing.append(draw.Lines(*canvas.flat(water), close=True, fill=COLORS['water'], stroke='none'))
    banks = draw.Group(id='banks')
    for bank in (contours.left_bank, contours.right_bank):
        banks.append(_polyline(canvas, bank, stroke=COLORS['bank'], stroke_width=1.5))
    drawing.append(banks)

    if plan is not None:
        connectors = draw.Group(id='connectors')
        for connector in plan.connectors:
            connectors.append(_polyline(
                canvas, connector.polyline,
                stroke=COLORS['connector'], stroke_width=1, stroke_dasharray='4,3',
            ))
        drawing.append(connectors)
        lanes = draw.Group(id='passes')
        for element in plan.passes:
            lanes.append(_polyline(canvas, element.polyline, stroke=COLORS[element.direction], stroke_width=2))
        drawing.append(lanes)

    if samples:
        markers = draw.Group(id='bends')
        for sample in samples:
            if sample.label == BendLabel.STRAIGHT:
                continue
            point = contours.section(sample.centerline_arc, sample.bank)
            x, y = canvas.flat(point)
            inner = sample.label == BendLabel.INNER
            markers.append(draw.Circle(
                x, y, 3,
                fill=COLORS[sample.label] if inner else 'none',
                stroke=COLORS[sample.label], stroke_width=1,
            ))
        drawing.append(markers)

    if plan is not None:
        x, y = canvas.flat(plan.start)
        drawing.append(draw.Circle(x, y, 5, fill=COLORS['start']))
    logger.info('Rendered %d x %d px figure', canvas.width, canvas.height)
    return drawing


def render_svg(contours, plan=None, samples=(), *, width=1000):
    """SVG text of :func:`render_plan`."""
    return render_plan(contours, plan, samples, width=width).as_svg()

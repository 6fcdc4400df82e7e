"""
Mission files for autopilots and GIS tools.

QGC WPL 110 and GPX carry the tour as one waypoint sequence in WGS84 and need
the map's projected CRS. GeoJSON stays in the map frame and keeps every pass
and connector as its own feature, so it round-trips the plan structure.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import geojson
import numpy as np
import pandas as pd
from django.db import models
from lxml import etree
from pyproj import CRS, Transformer
from pyproj.exceptions import CRSError

from . import geometry
from .conf import resolve
from .exceptions import MissionFormatError
from .planner import Algorithm, Connector, CoveragePlan, Direction, Pass

logger = logging.getLogger(__name__)

WPL_HEADER = 'QGC WPL 110'
GPX_NAMESPACE = 'http://www.topografix.com/GPX/1/1'
FRAME_GLOBAL_RELATIVE_ALT = 3
COMMAND_WAYPOINT = 16
METRIC_DECIMALS = 3


class MissionFormat(models.TextChoices):
    QGC_WPL_110 = 'wpl', 'QGC WPL 110'
    GPX = 'gpx', 'GPX 1.1'
    GEOJSON = 'geojson', 'GeoJSON'


SUFFIXES = {
    '.waypoints': MissionFormat.QGC_WPL_110,
    '.txt': MissionFormat.QGC_WPL_110,
    '.gpx': MissionFormat.GPX,
    '.geojson': MissionFormat.GEOJSON,
    '.json': MissionFormat.GEOJSON,
}

EXTENSIONS = {
    MissionFormat.QGC_WPL_110: '.waypoints',
    MissionFormat.GPX: '.gpx',
    MissionFormat.GEOJSON: '.geojson',
}


@dataclass(frozen=True)
class MissionFile:
    format: MissionFormat
    body: str

    def write(self, path):
        path = Path(path)
        path.write_text(self.body, encoding='utf-8')
        return path

    @classmethod
    def read(cls, path, format=None):
        """
        Load a mission file, taking the format from the suffix when not given.

        Raises:
            MissionFormatError for unknown suffixes or unreadable files
        """
        path = Path(path)
        if format is None:
            if path.suffix.lower() not in SUFFIXES:
                raise MissionFormatError(f"Unknown mission file type: {path.suffix}")
            format = SUFFIXES[path.suffix.lower()]
        try:
            return cls(MissionFormat(format), path.read_text(encoding='utf-8'))
        except OSError as exc:
            raise MissionFormatError(f"Cannot read {path}: {exc}") from exc


@dataclass(frozen=True, eq=False)
class GeoTransform:
    """Projected map frame <-> WGS84 longitude/latitude."""

    crs: str

    def __post_init__(self):
        try:
            projected = CRS.from_user_input(self.crs)
        except CRSError as exc:
            raise MissionFormatError(f"Invalid CRS {self.crs!r}: {exc}") from exc
        if not projected.is_projected:
            raise MissionFormatError(f"CRS {self.crs!r} is not a projected (metric) CRS")
        object.__setattr__(self, '_forward', Transformer.from_crs(projected, 'EPSG:4326', always_xy=True))
        object.__setattr__(self, '_inverse', Transformer.from_crs('EPSG:4326', projected, always_xy=True))

    @classmethod
    def for_map(cls, river_map, crs=None):
        """The map's CRS, else ``crs``, else the CRS setting; None when there is none."""
        crs = river_map.crs if river_map is not None and river_map.crs else resolve(crs, 'CRS')
        return cls(crs) if crs else None

    def to_lonlat(self, points):
        points = geometry.as_points(points)
        lon, lat = self._forward.transform(points[:, 0], points[:, 1])
        return np.column_stack([lon, lat])

    def to_metric(self, lonlat):
        lonlat = geometry.as_points(lonlat)
        x, y = self._inverse.transform(lonlat[:, 0], lonlat[:, 1])
        return np.column_stack([x, y])


def waypoints(plan, limit=None):
    """
    The tour decimated to at most ``limit`` waypoints.

    Douglas-Peucker keeps the deviation under a quarter of the spacing when
    the budget allows; otherwise the tolerance grows and a warning is logged.
    """
    limit = resolve(limit, 'WAYPOINT_LIMIT')
    path = plan.path()
    if len(path) == 0:
        raise MissionFormatError("Cannot export an empty plan")
    bound = plan.spacing / 4 if plan.spacing > 0 else 0.0
    points, tolerance = geometry.decimate(path, limit, bound)
    if tolerance > bound:
        logger.warning(
            "Decimating %d vertices to %d needs a %.2f m tolerance, above the %.2f m bound",
            len(path), len(points), tolerance, bound,
        )
    return points


def _require(geo, format):
    if geo is None:
        raise MissionFormatError(f"{MissionFormat(format).label} needs a geographic transform (map CRS)")
    return geo


def _wpl_row(index, current, frame, lon, lat):
    params = '\t'.join(['0'] * 4)
    return f"{index}\t{current}\t{frame}\t{COMMAND_WAYPOINT}\t{params}\t{lat:.7f}\t{lon:.7f}\t0.000\t1"


def _export_wpl(plan, geo, limit):
    points = geo.to_lonlat(waypoints(plan, limit))
    home = geo.to_lonlat(np.asarray(plan.start, dtype=float).reshape(1, 2))[0]
    rows = [WPL_HEADER, _wpl_row(0, 1, 0, *home)]
    rows.extend(_wpl_row(i, 0, FRAME_GLOBAL_RELATIVE_ALT, lon, lat) for i, (lon, lat) in enumerate(points, start=1))
    return '\n'.join(rows) + '\n'


def _export_gpx(plan, geo, limit):
    points = geo.to_lonlat(waypoints(plan, limit))
    root = etree.Element('gpx', nsmap={None: GPX_NAMESPACE}, version='1.1', creator='rivercover')
    track = etree.SubElement(root, 'trk')
    etree.SubElement(track, 'name').text = str(plan.algorithm or '')
    segment = etree.SubElement(track, 'trkseg')
    for lon, lat in points:
        etree.SubElement(segment, 'trkpt', lat=f"{lat:.7f}", lon=f"{lon:.7f}")
    return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding='UTF-8').decode('utf-8')


def _rounded(points):
    return [[round(float(x), METRIC_DECIMALS), round(float(y), METRIC_DECIMALS)] for x, y in points]


def _feature(element, order):
    if isinstance(element, Pass):
        properties = {
            'kind': 'pass',
            'lane_index': element.lane_index,
            'lane_count': element.lane_count,
            'direction': str(element.direction) if element.direction else None,
            'segment_id': element.segment_id,
        }
    else:
        properties = {'kind': element.kind}
    properties['order'] = order
    return geojson.Feature(geometry=geojson.LineString(_rounded(element.polyline)), properties=properties)


def plan_geojson(plan, crs=None):
    """FeatureCollection of the plan's elements in the map frame, plan fields as foreign members."""
    if not plan.elements:
        raise MissionFormatError("Cannot export an empty plan")
    collection = geojson.FeatureCollection(
        [_feature(element, order) for order, element in enumerate(plan.elements)],
        algorithm=str(plan.algorithm) if plan.algorithm else None,
        spacing=plan.spacing,
        start=_rounded([plan.start])[0],
        closed=plan.closed,
        complete=plan.complete,
        lane_counts=list(plan.lane_counts),
        map_digest=plan.map_digest,
        crs_name=crs,
    )
    return geojson.dumps(collection, sort_keys=True)


def export_plan(plan, format, geo=None, limit=None):
    """
    Serialize ``plan`` as a MissionFile.

    Raises:
        MissionFormatError for an empty plan or a missing transform for WGS84 formats
    """
    format = MissionFormat(format)
    if not plan.elements:
        raise MissionFormatError("Cannot export an empty plan")
    if format == MissionFormat.GEOJSON:
        body = plan_geojson(plan, crs=geo.crs if geo is not None else None)
    elif format == MissionFormat.GPX:
        body = _export_gpx(plan, _require(geo, format), limit)
    else:
        body = _export_wpl(plan, _require(geo, format), limit)
    return MissionFile(format, body)


def _waypoint_plan(points, start, algorithm=None):
    points = geometry.dedupe(points)
    return CoveragePlan(
        elements=(Pass(points, lane_index=0, direction=None, segment_id=0),),
        spacing=0.0,
        algorithm=Algorithm(algorithm) if algorithm in Algorithm.values else None,
        start=np.asarray(start, dtype=float),
        closed=bool(len(points) > 1 and np.allclose(points[0], points[-1])),
    )


def _import_wpl(body, geo):
    lines = [line for line in body.splitlines() if line.strip()]
    if not lines or not lines[0].startswith(WPL_HEADER):
        raise MissionFormatError("Not a QGC WPL 110 file")
    home, points = None, []
    for line in lines[1:]:
        parts = line.strip().split('\t')
        if len(parts) < 12:
            raise MissionFormatError(f"Malformed waypoint row: {line!r}")
        try:
            index, lat, lon = int(parts[0]), float(parts[8]), float(parts[9])
        except ValueError as exc:
            raise MissionFormatError(f"Malformed waypoint row: {line!r}") from exc
        if index == 0:
            home = (lon, lat)
        else:
            points.append((lon, lat))
    if not points:
        raise MissionFormatError("Mission has no waypoints")
    metric = geo.to_metric(points)
    start = geo.to_metric([home])[0] if home is not None else metric[0]
    return _waypoint_plan(metric, start)


def _import_gpx(body, geo):
    try:
        root = etree.fromstring(body.encode('utf-8'))
    except etree.XMLSyntaxError as exc:
        raise MissionFormatError(f"Malformed GPX: {exc}") from exc
    points = [(float(p.get('lon')), float(p.get('lat'))) for p in root.iter('{*}trkpt')]
    if not points:
        raise MissionFormatError("GPX file has no track points")
    names = root.xpath("//*[local-name()='trk']/*[local-name()='name']/text()")
    metric = geo.to_metric(points)
    return _waypoint_plan(metric, metric[0], names[0] if names else None)


def _import_geojson(body):
    try:
        collection = geojson.loads(body)
    except ValueError as exc:
        raise MissionFormatError(f"Malformed GeoJSON: {exc}") from exc
    features = sorted(collection.get('features', []), key=lambda f: f['properties'].get('order', 0))
    if not features:
        raise MissionFormatError("GeoJSON plan has no features")
    elements = []
    for feature in features:
        properties = feature['properties']
        polyline = np.asarray(feature['geometry']['coordinates'], dtype=float)
        if properties.get('kind') == 'pass':
            direction = properties.get('direction')
            elements.append(Pass(
                polyline=polyline,
                lane_index=int(properties.get('lane_index', 0)),
                direction=Direction(direction) if direction else None,
                segment_id=int(properties.get('segment_id', 0)),
                lane_count=int(properties.get('lane_count', 0)),
            ))
        else:
            elements.append(Connector(polyline, properties.get('kind', 'transition')))
    algorithm = collection.get('algorithm')
    start = collection.get('start') or elements[0].polyline[0]
    return CoveragePlan(
        elements=tuple(elements),
        spacing=float(collection.get('spacing') or 0.0),
        algorithm=Algorithm(algorithm) if algorithm else None,
        start=np.asarray(start, dtype=float),
        closed=bool(collection.get('closed', True)),
        complete=bool(collection.get('complete', True)),
        lane_counts=tuple(collection.get('lane_counts') or ()),
        map_digest=collection.get('map_digest') or '',
    )


def import_plan(mission, geo=None):
    """
    Rebuild a plan from a MissionFile.

    GeoJSON restores passes, connectors and their metadata. WPL and GPX only
    carry the waypoint sequence, which comes back as a single undirected pass.

    Raises:
        MissionFormatError for malformed files or a missing transform for WGS84 formats
    """
    format = MissionFormat(mission.format)
    if format == MissionFormat.GEOJSON:
        return _import_geojson(mission.body)
    if format == MissionFormat.GPX:
        return _import_gpx(mission.body, _require(geo, format))
    return _import_wpl(mission.body, _require(geo, format))


# Debug exports

def contours_geojson(contours):
    """Both banks and the centerline as LineString features."""
    features = [
        geojson.Feature(geometry=geojson.LineString(_rounded(line)), properties={'role': role})
        for role, line in (
            ('left_bank', contours.left_bank),
            ('right_bank', contours.right_bank),
            ('centerline', contours.centerline),
        )
    ]
    return geojson.dumps(geojson.FeatureCollection(features), sort_keys=True)


def segments_geojson(segments, contours):
    """Centerline stretch of every meander segment with its inner bank."""
    features = []
    for segment in segments:
        stretch = geometry.substring(contours.centerline, segment.start_arc, segment.end_arc, contours.centerline_arcs)
        features.append(geojson.Feature(
            geometry=geojson.LineString(_rounded(stretch)),
            properties={
                'index': segment.index,
                'inner_bank': str(segment.inner_bank),
                'is_straight': segment.is_straight,
                'start_arc': round(segment.start_arc, METRIC_DECIMALS),
                'end_arc': round(segment.end_arc, METRIC_DECIMALS),
                'apex': _rounded([segment.apex])[0],
            },
        ))
    return geojson.dumps(geojson.FeatureCollection(features), sort_keys=True)


def bend_labels_frame(samples):
    """Bend samples as a table with columns arc, centerline_arc, bank, label."""
    return pd.DataFrame({
        'arc': [round(s.bank_arc, METRIC_DECIMALS) for s in samples],
        'centerline_arc': [round(s.centerline_arc, METRIC_DECIMALS) for s in samples],
        'bank': [str(s.bank) for s in samples],
        'label': [str(s.label) for s in samples],
    })

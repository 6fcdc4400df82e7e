import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from PIL import Image

from rivers import geometry, synthetic
from rivers.exceptions import GeometryError, MapError
from rivers.river_map import (
    Bank,
    Orientation,
    RiverMap,
    get_directional_contours,
    get_downriver_direction,
    load_map,
    width_profile,
    write_map,
)


class RiverMapTests(SimpleTestCase):
    def test_keeps_largest_component(self):
        mask = np.zeros((12, 12), dtype=bool)
        mask[2:6, 2:10] = True
        mask[8:10, 2:4] = True
        river_map = RiverMap.from_mask(mask, 1.0)
        self.assertEqual(river_map.free_count, 32)
        self.assertEqual(river_map.discarded_cells, 4)

    def test_border_is_closed(self):
        river_map = RiverMap.from_mask(np.ones((5, 5), dtype=bool), 2.0)
        self.assertEqual(river_map.free_count, 9)
        self.assertFalse(river_map.grid[0].any())
        self.assertFalse(river_map.grid[:, -1].any())

    def test_rejects_bad_maps(self):
        with self.assertRaises(MapError):
            RiverMap.from_mask(np.ones((5, 5), dtype=bool), 0.0)
        with self.assertRaises(MapError):
            RiverMap.from_mask(np.zeros((5, 5), dtype=bool), 1.0)

    def test_grid_is_read_only(self):
        river_map = RiverMap.from_mask(np.ones((5, 5), dtype=bool), 1.0)
        with self.assertRaises(ValueError):
            river_map.grid[2, 2] = False

    def test_snap_moves_to_free_cell(self):
        river = synthetic.rectangle(300.0, 60.0, 3.0)
        snapped = river.river_map.snap((0.0, 0.0))
        self.assertTrue(river.river_map.is_free(snapped))
        with self.assertRaises(GeometryError):
            river.river_map.snap((150.0, 60.0))


class MapFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.river = synthetic.rectangle(300.0, 60.0, 3.0)

    def test_raster_round_trip(self):
        sidecar = write_map(self.river.river_map, self.dir / 'reach')
        loaded = load_map(sidecar)
        self.assertEqual(loaded.shape, self.river.river_map.shape)
        self.assertEqual(loaded.resolution, 3.0)
        self.assertEqual(loaded.free_count, self.river.river_map.free_count)
        # Same cells are Free in the metric frame even though image rows are flipped.
        self.assertTrue(loaded.is_free(self.river.river_map.free_points()).all())

    def test_sidecar_origin_shifts_frame(self):
        minx, miny, _, _ = self.river.river_map.bounds()
        sidecar = write_map(self.river.river_map, self.dir / 'reach', origin=(minx + 1000.0, miny + 500.0), crs='EPSG:32617')
        loaded = load_map(sidecar)
        self.assertEqual(loaded.crs, 'EPSG:32617')
        shifted = self.river.river_map.free_points() + (1000.0, 500.0)
        self.assertTrue(loaded.is_free(shifted).all())

    def test_bare_pgm_uses_default_resolution(self):
        write_map(self.river.river_map, self.dir / 'reach')
        loaded = load_map(self.dir / 'reach.pgm')
        self.assertEqual(loaded.resolution, 3.0)
        self.assertEqual(loaded.free_count, self.river.river_map.free_count)

    def polygon_doc(self, **properties):
        return {
            'type': 'Feature',
            'geometry': {
                'type': 'Polygon',
                'coordinates': [[[0, 0], [200, 0], [200, 40], [0, 40], [0, 0]]],
            },
            'properties': properties,
        }

    def test_polygon_map(self):
        path = self.dir / 'reach.geojson'
        edges = [[[0, 0], [0, 40]], [[200, 0], [200, 40]]]
        path.write_text(json.dumps(self.polygon_doc(resolution_m=2.0, open_edges=edges)))
        river_map = load_map(path)
        self.assertEqual(river_map.resolution, 2.0)
        self.assertEqual(len(river_map.open_edges), 2)
        self.assertAlmostEqual(river_map.free_count, 100 * 20, delta=150)

    def test_polygon_needs_resolution(self):
        path = self.dir / 'reach.geojson'
        path.write_text(json.dumps(self.polygon_doc(open_edges=[[[0, 0], [0, 40]], [[200, 0], [200, 40]]])))
        with self.assertRaises(MapError):
            load_map(path)

    def save_raster(self, free, name='raster.pgm'):
        path = self.dir / name
        Image.fromarray(np.where(free, 254, 0).astype(np.uint8)).save(path)
        return path

    def test_small_raster_closes_border(self):
        river_map = load_map(self.save_raster(np.ones((5, 10), dtype=bool)))
        self.assertEqual(river_map.shape, (5, 10))
        self.assertEqual(river_map.free_count, 24)

    def test_raster_keeps_largest_blob(self):
        free = np.zeros((20, 30), dtype=bool)
        free[3:13, 3:13] = True
        free[16, 18:25] = True
        river_map = load_map(self.save_raster(free))
        self.assertEqual(river_map.free_count, 100)
        self.assertEqual(river_map.discarded_cells, 7)

    def test_missing_file(self):
        with self.assertRaises(MapError):
            load_map(self.dir / 'nowhere.pgm')


class ContourTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.river = synthetic.rectangle()
        cls.contours = get_directional_contours(cls.river.river_map, cls.river.start)

    def test_length_between_openings(self):
        # Openings sit one cell in from the west and east borders.
        self.assertAlmostEqual(self.contours.length, 991.0, delta=10.0)

    def test_left_bank_is_north(self):
        self.assertGreater(self.contours.left_bank[:, 1].mean(), 40.0)
        self.assertLess(self.contours.right_bank[:, 1].mean(), -40.0)

    def test_widths(self):
        self.assertAlmostEqual(float(np.median(self.contours.widths)), 90.0, delta=3.0)

    def test_banks_run_away_from_start(self):
        for side in (Bank.LEFT, Bank.RIGHT):
            bank = self.contours.bank(side)
            self.assertLess(bank[0, 0], bank[-1, 0])

    def test_start_off_river(self):
        with self.assertRaises(GeometryError):
            get_directional_contours(self.river.river_map, (500.0, 60.0))

    def test_direction_from_west(self):
        flow = get_downriver_direction(self.contours, self.river.start)
        self.assertGreater(flow.heading[0], 0.99)
        self.assertFalse(flow.from_far_end)
        self.assertEqual(flow.orientation, Orientation.START_IS_DOWNSTREAM_END)
        self.assertEqual(flow.downstream_sign, -1)

    def test_direction_from_east(self):
        flow = get_downriver_direction(self.contours, (995.0, 0.0), Orientation.START_IS_UPSTREAM_END)
        self.assertLess(flow.heading[0], -0.99)
        self.assertTrue(flow.from_far_end)
        self.assertEqual(flow.downstream_sign, -1)

    def test_direction_errors(self):
        with self.assertRaises(GeometryError):
            get_downriver_direction(self.contours, (2000.0, 0.0))
        middle = 0.5 * (self.contours.centerline[0] + self.contours.centerline[-1])
        with self.assertRaises(GeometryError):
            get_downriver_direction(self.contours, middle)


class WidthProfileTests(SimpleTestCase):
    def test_taper(self):
        river = synthetic.taper()
        profile = width_profile(get_directional_contours(river.river_map, river.start))
        tenth = len(profile.widths) // 10
        self.assertAlmostEqual(profile.widths[:tenth].mean(), 117.0, delta=6.0)
        self.assertAlmostEqual(profile.widths[-tenth:].mean(), 63.0, delta=6.0)
        self.assertAlmostEqual(profile.mean_width, 90.0, delta=5.0)
        self.assertEqual(len(profile.samples), len(profile.arcs))


def heading_angle(a, b):
    """Angle in degrees between two directions."""
    a, b = geometry.unit(a), geometry.unit(b)
    return float(np.degrees(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0))))


class ContourShapeTests(SimpleTestCase):
    def test_annulus_bank_lengths(self):
        river = synthetic.quarter_annulus(100.0, 180.0, 1.0)
        contours = get_directional_contours(river.river_map, river.start)
        inner = geometry.polyline_length(contours.bank(Bank.LEFT))
        outer = geometry.polyline_length(contours.bank(Bank.RIGHT))
        self.assertAlmostEqual(inner, np.pi / 2 * 100.0, delta=0.03 * np.pi / 2 * 100.0)
        self.assertAlmostEqual(outer, np.pi / 2 * 180.0, delta=0.03 * np.pi / 2 * 180.0)

    def test_sine_start_heading(self):
        river = synthetic.sine()
        contours = get_directional_contours(river.river_map, river.start)
        flow = get_downriver_direction(contours, river.start)
        tangent = np.array([1.0, 2 * np.pi * 50.0 / 500.0])
        self.assertLessEqual(heading_angle(flow.heading, tangent), 5.0)

    def test_reversal_symmetry(self):
        river = synthetic.rectangle()
        west = get_directional_contours(river.river_map, river.start)
        east_start = (995.0, 0.0)
        east = get_directional_contours(river.river_map, east_start)
        forward = get_downriver_direction(west, river.start).heading
        backward = get_downriver_direction(east, east_start).heading
        self.assertLessEqual(heading_angle(forward, -np.asarray(backward)), 1.0)

    def test_taper_width_halfway(self):
        river = synthetic.taper()
        contours = get_directional_contours(river.river_map, river.start)
        self.assertAlmostEqual(float(contours.width_at(500.0)), 90.0, delta=2 * river.river_map.resolution)

    def test_water_between_the_banks(self):
        river = synthetic.sine()
        contours = get_directional_contours(river.river_map, river.start)
        offset = 3 * river.river_map.resolution
        for side, water_on_left in ((Bank.LEFT, False), (Bank.RIGHT, True)):
            bank = contours.bank(side)
            directions = np.gradient(bank, axis=0)
            directions /= np.hypot(*directions.T)[:, None]
            normals = np.column_stack([-directions[:, 1], directions[:, 0]])
            if not water_on_left:
                normals = -normals
            inside = slice(len(bank) // 10, len(bank) - len(bank) // 10)
            water = river.river_map.majority_free(bank[inside] + offset * normals[inside])
            land = river.river_map.majority_free(bank[inside] - offset * normals[inside])
            with self.subTest(side=side):
                self.assertGreaterEqual(water.mean(), 0.95)
                self.assertLessEqual(land.mean(), 0.05)

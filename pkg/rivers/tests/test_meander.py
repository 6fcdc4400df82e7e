import numpy as np
from django.test import SimpleTestCase, override_settings
from scipy.spatial import cKDTree

from rivers import geometry, synthetic
from rivers.exceptions import GeometryError
from rivers.meander import BendLabel, TangentStep, classify_bend, label_banks, tangent_at, width_across
from rivers.planner import survey_river
from rivers.river_map import Bank


def heading_profile(centerline):
    """Arc length and unwrapped heading along an analytic centerline."""
    arcs = geometry.arc_lengths(centerline)
    headings = np.unwrap(np.arctan2(*np.gradient(centerline, axis=0)[:, ::-1].T))
    return arcs, headings


class TangentTests(SimpleTestCase):
    def test_secant_tangent(self):
        line = np.array([[0.0, 0.0], [100.0, 0.0]])
        tangent = tangent_at(line, 50.0, 10.0)
        np.testing.assert_allclose(tangent.point, [50.0, 0.0])
        np.testing.assert_allclose(tangent.direction, [1.0, 0.0])

    def test_too_close_to_end(self):
        line = np.array([[0.0, 0.0], [100.0, 0.0]])
        with self.assertRaises(GeometryError):
            tangent_at(line, 2.0, 10.0)
        with self.assertRaises(GeometryError):
            tangent_at(line, 98.0, 10.0)


class StraightRiverTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        river = synthetic.rectangle()
        cls.model = survey_river(river.river_map, river.start)

    def test_default_step(self):
        # A quarter of the 90 m width beats four 3 m cells.
        self.assertAlmostEqual(self.model.delta_w.delta_w, 22.5, delta=1.0)

    def test_step_shorter_than_two_cells(self):
        with self.assertRaises(ValueError):
            TangentStep.initialize(self.model.contours, 3.0)

    def test_all_straight(self):
        samples = label_banks(self.model.river_map, self.model.contours, self.model.delta_w)
        self.assertTrue(samples)
        self.assertTrue(all(sample.label == BendLabel.STRAIGHT for sample in samples))

    def test_single_straight_segment(self):
        self.assertEqual(len(self.model.segments), 1)
        segment = self.model.segments[0]
        self.assertTrue(segment.is_straight)
        self.assertEqual(segment.inner_bank, Bank.LEFT)
        self.assertAlmostEqual(segment.end_arc, self.model.contours.length)


class BendOracleTests(SimpleTestCase):
    """Tangent-intersection labels against the sign of the analytic curvature."""

    def agreement(self, river):
        model = survey_river(river.river_map, river.start)
        contours, step = model.contours, model.delta_w.delta_w
        arcs, headings = heading_profile(river.centerline)
        tree = cKDTree(river.centerline)
        checked = agreed = 0
        for side in (Bank.LEFT, Bank.RIGHT):
            bank = contours.bank(side)
            cum = geometry.arc_lengths(bank)
            for arc in np.arange(step, cum[-1] - step, 2 * contours.resolution):
                label = classify_bend(river.river_map, bank, arc, step, cum=cum)
                if label == BendLabel.STRAIGHT:
                    continue
                _, nearest = tree.query(geometry.point_at(bank, arc, cum))
                lo, hi = arcs[nearest] - step, arcs[nearest] + step
                turn = np.interp(hi, arcs, headings) - np.interp(lo, arcs, headings)
                mean_curvature = turn / (2 * step)
                if abs(mean_curvature) <= 0.002:
                    continue
                inner = (side == Bank.LEFT) == (mean_curvature > 0)
                checked += 1
                agreed += (label == BendLabel.INNER) == inner
        return checked, agreed

    def test_labels_match_curvature(self):
        checked = agreed = 0
        for river in (synthetic.quarter_annulus(), synthetic.sine(), synthetic.s_curve()):
            c, a = self.agreement(river)
            self.assertGreater(c, 0)
            checked += c
            agreed += a
        self.assertGreaterEqual(agreed / checked, 0.99)


class SegmentTests(SimpleTestCase):
    def test_sine_alternates(self):
        river = synthetic.sine()
        model = survey_river(river.river_map, river.start)
        segments = model.segments
        self.assertEqual(len(segments), 4)
        self.assertFalse(any(segment.is_straight for segment in segments))
        # The first half period bends right.
        self.assertEqual([s.inner_bank for s in segments], [Bank.RIGHT, Bank.LEFT, Bank.RIGHT, Bank.LEFT])
        self.assertEqual([s.index for s in segments], [0, 1, 2, 3])
        for before, after in zip(segments[:-1], segments[1:]):
            self.assertAlmostEqual(before.end_arc, after.start_arc)

    def test_s_curve_with_straight_tail(self):
        river = synthetic.s_curve()
        model = survey_river(river.river_map, river.start)
        segments = model.segments
        self.assertEqual([s.is_straight for s in segments], [False, False, True])
        # The tail borrows the inner bank of the bend before it.
        self.assertEqual([s.inner_bank for s in segments], [Bank.LEFT, Bank.RIGHT, Bank.RIGHT])
        self.assertAlmostEqual(segments[2].length, 300.0, delta=40.0)

    def test_segments_cover_river(self):
        river = synthetic.quarter_annulus()
        model = survey_river(river.river_map, river.start)
        self.assertEqual(model.segments[0].start_arc, 0.0)
        self.assertAlmostEqual(model.segments[-1].end_arc, model.contours.length)
        self.assertTrue(all(s.inner_bank == Bank.LEFT for s in model.segments if not s.is_straight))

    def test_mirror_swaps_inner_banks(self):
        river = survey_river(*self.sine_args(50.0))
        mirrored = survey_river(*self.sine_args(-50.0))
        step = river.delta_w.delta_w
        self.assertEqual(len(mirrored.segments), len(river.segments))
        for segment, image in zip(river.segments, mirrored.segments):
            self.assertEqual(image.inner_bank, segment.inner_bank.opposite)
            self.assertAlmostEqual(image.start_arc, segment.start_arc, delta=step)
            self.assertAlmostEqual(image.end_arc, segment.end_arc, delta=step)

    def test_half_step_keeps_boundaries(self):
        river = synthetic.sine()
        coarse = survey_river(river.river_map, river.start)
        step = coarse.delta_w.delta_w
        fine = survey_river(river.river_map, river.start, delta_w=step / 2)
        self.assertEqual(len(fine.segments), len(coarse.segments))
        for a, b in zip(coarse.segments, fine.segments):
            self.assertEqual(a.inner_bank, b.inner_bank)
            self.assertLess(abs(a.end_arc - b.end_arc), step)

    def sine_args(self, amplitude):
        river = synthetic.sine(amplitude=amplitude)
        return river.river_map, river.start


class LocalWidthTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.annulus = synthetic.quarter_annulus()
        cls.model = survey_river(cls.annulus.river_map, cls.annulus.start)
        cls.bank = cls.model.contours.bank(Bank.LEFT)
        cls.cum = geometry.arc_lengths(cls.bank)

    def labels(self):
        step = self.model.delta_w.delta_w
        arcs = np.linspace(0.4, 0.6, 5) * self.cum[-1]
        return [classify_bend(self.annulus.river_map, self.bank, arc, step, cum=self.cum) for arc in arcs]

    def test_width_across_rectangle(self):
        river = synthetic.rectangle()
        model = survey_river(river.river_map, river.start)
        bank = model.contours.bank(Bank.LEFT)
        cum = geometry.arc_lengths(bank)
        tangent = tangent_at(bank, cum[-1] / 2, 20.0, cum)
        width = width_across(river.river_map, tangent.point, tangent.direction)
        self.assertAlmostEqual(width, 90.0, delta=2 * river.river_map.resolution)

    def test_inner_bank_without_width(self):
        labels = self.labels()
        self.assertGreaterEqual(labels.count(BendLabel.INNER), len(labels) - 1)

    @override_settings(RIVERCOVER={'STRAIGHT_DISTANCE_WIDTHS': 1e-6})
    def test_distance_rule_without_width(self):
        self.assertEqual(set(self.labels()), {BendLabel.STRAIGHT})

from itertools import combinations

import numpy as np
from django.test import SimpleTestCase

from rivers import synthetic
from rivers.current_sim import (
    BoatModel,
    CurrentField,
    CurrentProfile,
    calibrate_v_max,
    compare_plans,
    field_for,
    polyline_time,
    synth_current_field,
    traverse_time,
)
from rivers.exceptions import SimulationError
from rivers.planner import Algorithm, Direction, l_cover, m_cover, split_into_even_passes, survey_river, t_cover
from rivers.river_map import Bank


class TraversalTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.river = synthetic.rectangle()
        cls.current = CurrentField.uniform(cls.river.river_map, (1.0, 0.0))

    def test_with_and_against_the_current(self):
        boat = BoatModel(4.0)
        down, length, _ = polyline_time(np.array([[100.0, 0.0], [200.0, 0.0]]), self.current, boat)
        up, _, _ = polyline_time(np.array([[200.0, 0.0], [100.0, 0.0]]), self.current, boat)
        self.assertAlmostEqual(length, 100.0)
        self.assertAlmostEqual(down, 20.0, places=6)
        self.assertAlmostEqual(up, 100.0 / 3.0, places=6)

    def test_cross_current_costs_nothing_extra(self):
        time, _, _ = polyline_time(np.array([[100.0, -30.0], [100.0, 30.0]]), self.current, BoatModel(4.0))
        self.assertAlmostEqual(time, 15.0, places=6)

    def test_current_stronger_than_boat(self):
        with self.assertRaises(SimulationError):
            polyline_time(np.array([[200.0, 0.0], [100.0, 0.0]]), self.current, BoatModel(1.0))

    def test_boat_validation(self):
        with self.assertRaises(ValueError):
            BoatModel(0.0)
        with self.assertRaises(ValueError):
            BoatModel(2.0, turn_penalty=-1.0)

    def test_turn_penalty(self):
        plan = m_cover(self.river.river_map, self.river.start, 45.0)
        plain = traverse_time(plan, self.current.scaled(0.5), BoatModel(2.0))
        turning = traverse_time(plan, self.current.scaled(0.5), BoatModel(2.0, turn_penalty=1.0))
        self.assertEqual(plain.turn_time, 0.0)
        self.assertGreater(turning.turn_time, np.pi)
        self.assertAlmostEqual(turning.total_time, plain.total_time + turning.turn_time)

    def test_plan_from_another_map(self):
        plan = m_cover(self.river.river_map, self.river.start, 45.0)
        other = synthetic.rectangle(length=600.0)
        with self.assertRaises(SimulationError):
            traverse_time(plan, CurrentField.uniform(other.river_map, (0.1, 0.0)), BoatModel(2.0))


class FieldTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.annulus = synthetic.quarter_annulus()
        cls.model = survey_river(cls.annulus.river_map, cls.annulus.start)
        cls.current = field_for(cls.model, v_min=0.1, v_max=0.9, profile=CurrentProfile.LINEAR)

    def radial(self, radii, angle=np.pi / 4):
        return np.column_stack([radii * np.cos(angle), radii * np.sin(angle)])

    def test_inner_and_outer_speeds(self):
        inner = np.hypot(*self.current.at(self.radial(np.array([101.0]))).T)
        outer = np.hypot(*self.current.at(self.radial(np.array([179.0]))).T)
        self.assertAlmostEqual(float(inner[0]), 0.1, delta=0.05)
        self.assertAlmostEqual(float(outer[0]), 0.9, delta=0.05)

    def test_speed_grows_outward(self):
        speeds = np.hypot(*self.current.at(self.radial(np.arange(100.5, 180.0, 1.0))).T)
        self.assertTrue(np.all(np.diff(speeds) >= -1e-12))

    def test_flows_downstream(self):
        # The start is the downstream end, so water runs clockwise back toward it.
        angle = np.pi / 4
        velocity = self.current.at(self.radial(np.array([140.0]), angle))[0]
        clockwise = np.array([np.sin(angle), -np.cos(angle)])
        self.assertGreater(np.dot(velocity, clockwise), 0.9 * np.hypot(*velocity))

    def test_obstacle_cells_are_still(self):
        speed = self.current.speed()
        self.assertTrue(np.all(speed[~self.annulus.river_map.grid] == 0.0))
        self.assertEqual(len(self.current.to_frame()), self.annulus.river_map.free_count)

    def test_invalid_bounds(self):
        kwargs = dict(contours=self.model.contours, flow=self.model.flow)
        with self.assertRaises(SimulationError):
            synth_current_field(self.annulus.river_map, self.model.segments, 0.8, 0.2, **kwargs)
        with self.assertRaises(SimulationError):
            synth_current_field(self.annulus.river_map, self.model.segments, -0.1, 0.2, **kwargs)


class MeanderFieldTests(SimpleTestCase):
    def test_monotone_across_each_bend(self):
        river = synthetic.sine()
        model = survey_river(river.river_map, river.start)
        current = field_for(model, v_min=0.0, v_max=0.9)
        speed = current.speed()
        for segment in model.segments:
            middle = 0.5 * (segment.start_arc + segment.end_arc)
            section = np.abs(current.arcs - middle) < 1.0
            u = current.fractions[section]
            if segment.inner_bank == Bank.RIGHT:
                u = 1.0 - u
            ordered = speed[section][np.argsort(u, kind='stable')]
            self.assertTrue(np.all(np.diff(ordered) >= -1e-12), segment.index)


class CalibrationTests(SimpleTestCase):
    def test_outer_lane_ratio(self):
        v_max = calibrate_v_max(boat_speed=2.0, ratio=1.47, profile='power', exponent=3.0, v_min=0.0)
        self.assertAlmostEqual(v_max, 0.9021, places=3)
        lane = v_max * 0.75 ** 3
        self.assertAlmostEqual((2.0 + lane) / (2.0 - lane), 1.47)

    def test_linear_profile(self):
        v_max = calibrate_v_max(boat_speed=2.0, ratio=1.47, profile='linear', v_min=0.0)
        self.assertAlmostEqual(v_max, 2.0 * 0.47 / 2.47 / 0.75)

    def test_ratio_below_one(self):
        with self.assertRaises(SimulationError):
            calibrate_v_max(boat_speed=2.0, ratio=0.9)


class ScalingTests(SimpleTestCase):
    def test_doubling_speeds_halves_time(self):
        river = synthetic.sine()
        model = survey_river(river.river_map, river.start)
        plan = m_cover(river.river_map, river.start, 40.0, model=model)
        current = field_for(model)
        slow = traverse_time(plan, current, BoatModel(2.0))
        fast = traverse_time(plan, current.scaled(2.0), BoatModel(4.0))
        self.assertAlmostEqual(2 * fast.total_time, slow.total_time, delta=1e-9 * slow.total_time)
        self.assertAlmostEqual(fast.total_length, slow.total_length)


class AssignmentOptimalityTests(SimpleTestCase):
    """Upstream inner lanes beat every other balanced choice of upstream lanes."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.annulus = synthetic.quarter_annulus()
        cls.model = survey_river(cls.annulus.river_map, cls.annulus.start)
        cls.segment = max(
            (s for s in cls.model.segments if not s.is_straight),
            key=lambda s: s.length,
        )

    def random_field(self, rng):
        v_min = rng.uniform(0.0, 0.3)
        v_max = rng.uniform(v_min + 0.1, 1.2)
        if rng.random() < 0.5:
            profile, exponent = CurrentProfile.LINEAR, 1.0
        else:
            profile, exponent = CurrentProfile.POWER, rng.uniform(1.0, 4.0)
        return synth_current_field(
            self.annulus.river_map, self.model.segments, v_min, v_max,
            contours=self.model.contours, flow=self.model.flow,
            blend_length=self.model.delta_w.delta_w, profile=profile, exponent=exponent,
        )

    def test_exhaustive(self):
        rng = np.random.default_rng(7)
        boat = BoatModel(2.0)
        for trial in range(20):
            current = self.random_field(rng)
            for k in (2, 4, 6):
                lanes = split_into_even_passes(self.segment, self.model.contours, 10.0, lane_count=k)
                # Increasing arc runs upstream from a downstream start.
                up = [polyline_time(lane.polyline, current, boat)[0] for lane in lanes]
                down = [polyline_time(lane.polyline[::-1], current, boat)[0] for lane in lanes]

                def cost(upstream):
                    return sum(up[i] if i in upstream else down[i] for i in range(k))

                inner = set(range(k // 2))
                best = min(cost(set(choice)) for choice in combinations(range(k), k // 2))
                with self.subTest(trial=trial, lanes=k):
                    self.assertLessEqual(cost(inner), best)


class ComparisonTests(SimpleTestCase):
    def test_straight_river_has_no_winner(self):
        river = synthetic.rectangle()
        model = survey_river(river.river_map, river.start)
        plans = [m_cover(river.river_map, river.start, 45.0, model=model),
                 l_cover(river.river_map, river.start, 45.0, model=model)]
        comparison = compare_plans(plans, field_for(model), BoatModel(2.0))
        self.assertAlmostEqual(comparison.margin('m-cover', 'l-cover'), 0.0, places=9)
        self.assertEqual(list(comparison.table.columns), ['algorithm', 'length_m', 'time_s', 'ratio_vs_best'])

    def compare(self, river, s, **field):
        model = survey_river(river.river_map, river.start)
        plans = [planner(river.river_map, river.start, s, model=model) for planner in (m_cover, l_cover, t_cover)]
        return compare_plans(plans, field_for(model, **field), BoatModel(2.0))

    def test_ordering_on_meanders(self):
        comparison = self.compare(synthetic.three_meanders(), 45.0)
        times = comparison.table.set_index('algorithm')['time_s']
        self.assertLessEqual(times['m-cover'], times['l-cover'])
        self.assertLessEqual(times['l-cover'], times['t-cover'])
        self.assertEqual(comparison.best, Algorithm.M_COVER.value)
        self.assertEqual(comparison.table['ratio_vs_best'].min(), 1.0)

    def test_meander_saving_on_sine(self):
        # The calibrated linear field saves about 5% on this reach.
        comparison = self.compare(synthetic.three_meanders(), 45.0)
        margin = comparison.margin('m-cover', 'l-cover')
        self.assertGreaterEqual(margin, 0.03)
        self.assertLessEqual(margin, 0.30)

    def test_meander_saving_on_long_bends(self):
        comparison = self.compare(synthetic.three_bends(), 45.0)
        self.assertGreaterEqual(comparison.margin('m-cover', 'l-cover'), 0.05)

    def test_meander_saving_with_power_profile(self):
        comparison = self.compare(synthetic.three_bends(), 45.0, profile=CurrentProfile.POWER, exponent=3.0)
        margin = comparison.margin('m-cover', 'l-cover')
        self.assertGreaterEqual(margin, 0.10)
        self.assertLessEqual(margin, 0.30)

    def test_upstream_lanes_are_slower(self):
        river = synthetic.rectangle()
        model = survey_river(river.river_map, river.start)
        plan = m_cover(river.river_map, river.start, 45.0, model=model)
        report = traverse_time(plan, field_for(model), BoatModel(2.0))
        self.assertGreater(report.time_by_direction(Direction.UPSTREAM), report.time_by_direction(Direction.DOWNSTREAM))
        self.assertGreater(report.ratios['upstream_to_downstream'], 1.0)

    def test_mixed_maps(self):
        first, second = synthetic.rectangle(), synthetic.rectangle(length=600.0)
        plans = [m_cover(first.river_map, first.start, 45.0), m_cover(second.river_map, second.start, 45.0)]
        with self.assertRaises(SimulationError):
            compare_plans(plans, CurrentField.uniform(first.river_map, (0.1, 0.0)), BoatModel(2.0))

import numpy as np

from rivers.conf import resolve
from rivers.current_sim import BoatModel, CurrentField, compare_plans, field_for
from rivers.planner import Algorithm, plan_coverage

from ._base import RiverCommand

DEFAULT_ALGORITHMS = (Algorithm.M_COVER, Algorithm.L_COVER)


class Command(RiverCommand):
    help = "Simulate several planners in one current field, tabulate their times and write the field."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument('--algos', dest='algorithms', help="Comma-separated planners (default m-cover,l-cover)")
        parser.add_argument('--vmin', dest='v_min', type=float, help="Inner-bank current speed, m/s")
        parser.add_argument('--vmax', dest='v_max', type=float, help="Outer-bank current speed, m/s (default: calibrated)")
        parser.add_argument('--boat-speed', dest='boat_speed', type=float, help="Speed through water, m/s")
        parser.add_argument('--turn-penalty', dest='turn_penalty', type=float, help="Seconds per radian of turning")
        parser.add_argument('--ratio', dest='upstream_ratio', type=float, help="Outer-lane upstream:downstream time ratio for calibration")
        parser.add_argument('--profile', help="Cross-river speed profile: linear or power")
        parser.add_argument('--exponent', type=float, help="Power profile exponent")
        parser.add_argument('--uniform', action='store_true', help="Use a uniform v_max current instead of the meander field")

    def handle(self, *args, **options):
        self.uniform = bool(options.get('uniform'))
        return super().handle(*args, **options)

    def current(self, model, config):
        boat_speed = resolve(config.get('boat_speed'), 'BOAT_SPEED')
        if self.uniform:
            speed = resolve(config.get('v_max'), 'V_MAX')
            speed = boat_speed / 4 if speed is None else speed
            heading = np.asarray(model.flow.heading) * model.flow.downstream_sign
            return CurrentField.uniform(model.river_map, heading * speed)
        return field_for(
            model,
            v_min=config.get('v_min'),
            v_max=config.get('v_max'),
            profile=config.get('profile'),
            exponent=config.get('exponent'),
            boat_speed=boat_speed,
            ratio=config.get('upstream_ratio'),
        )

    def run(self, config):
        model = self.survey(config)
        algorithms = config.get('algorithms') or list(DEFAULT_ALGORITHMS)
        plans = [
            plan_coverage(algorithm, model.river_map, model.start, config['spacing'], model=model)
            for algorithm in algorithms
        ]
        boat = BoatModel(
            speed_through_water=resolve(config.get('boat_speed'), 'BOAT_SPEED'),
            turn_penalty=resolve(config.get('turn_penalty'), 'TURN_PENALTY'),
        )
        current = self.current(model, config)
        comparison = compare_plans(plans, current, boat)

        csv = comparison.table.to_csv(index=False, float_format='%.3f')
        out = self.output_dir(config)
        (out / 'compare.csv').write_text(csv)
        current.to_frame().to_csv(out / 'field.csv', index=False, float_format='%.4f')
        self.stdout.write(csv.rstrip('\n'))

        ranked = comparison.table.sort_values('time_s', kind='stable')['algorithm'].tolist()
        if len(ranked) > 1:
            margin = comparison.margin(ranked[0], ranked[1])
            self.stdout.write(f"fastest: {ranked[0]}, {100 * margin:.1f}% faster than {ranked[1]}")
        else:
            self.stdout.write(f"fastest: {ranked[0]}")

from pathlib import Path

from django.core.management.base import CommandError

from rivers.meander import label_banks
from rivers.planner import Algorithm, plan_coverage
from rivers.render import render_svg

from ._base import VALIDATION_ERROR, RiverCommand


class Command(RiverCommand):
    help = "Draw the river, a coverage plan and the bend labels as an SVG figure."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument('--algo', dest='algorithm', help="Planner to draw: " + ', '.join(Algorithm.values))

    def run(self, config):
        model = self.survey(config)
        algorithm = Algorithm(config.get('algorithm') or Algorithm.M_COVER)
        plan = plan_coverage(algorithm, model.river_map, model.start, config['spacing'], model=model)
        samples = label_banks(model.river_map, model.contours, model.delta_w)
        svg = render_svg(model.contours, plan, samples)

        target = Path(config.get('out') or f"{algorithm.value}.svg")
        if target.suffix.lower() != '.svg':
            target = target / f"{algorithm.value}.svg"
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(svg)
        except OSError as exc:
            raise CommandError(f"Cannot write {target}: {exc}", returncode=VALIDATION_ERROR) from exc
        self.stdout.write(f"wrote {target}")

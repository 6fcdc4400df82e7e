from rivers.meander import label_banks
from rivers.mission_io import (
    EXTENSIONS,
    GeoTransform,
    MissionFormat,
    bend_labels_frame,
    contours_geojson,
    export_plan,
    segments_geojson,
)
from rivers.planner import Algorithm, coverage_fraction, plan_coverage

from ._base import RiverCommand


class Command(RiverCommand):
    help = (
        "Plan a coverage tour and write mission files, a GeoJSON of the plan, "
        "and the banks, meander segments and bend labels it was planned on."
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument('--algo', dest='algorithm', help="Planner: " + ', '.join(Algorithm.values))

    def run(self, config):
        model = self.survey(config)
        algorithm = Algorithm(config.get('algorithm') or Algorithm.M_COVER)
        spacing = config['spacing']
        plan = plan_coverage(algorithm, model.river_map, model.start, spacing, model=model)
        coverage = coverage_fraction(model.river_map, plan, spacing / 2 + model.river_map.resolution)

        out = self.output_dir(config)
        stem = algorithm.value
        geo = GeoTransform.for_map(model.river_map, config.get('crs'))
        written = [export_plan(plan, MissionFormat.GEOJSON, geo).write(out / f"{stem}{EXTENSIONS[MissionFormat.GEOJSON]}")]
        if geo is None:
            self.stderr.write("No CRS for this map; skipping WGS84 mission files")
        else:
            for format in (MissionFormat.QGC_WPL_110, MissionFormat.GPX):
                written.append(export_plan(plan, format, geo).write(out / f"{stem}{EXTENSIONS[format]}"))

        written.append(self.write_text(out / 'contours.geojson', contours_geojson(model.contours)))
        written.append(self.write_text(out / 'segments.geojson', segments_geojson(model.segments, model.contours)))
        bends = bend_labels_frame(label_banks(model.river_map, model.contours, model.delta_w))
        written.append(self.write_text(out / 'bends.csv', bends.to_csv(index=False, float_format='%.3f')))

        lane_counts = ','.join(str(k) for k in plan.lane_counts) or '-'
        self.stdout.write(
            f"{algorithm.value}: length {plan.length:.1f} m, passes {len(plan.passes)}, "
            f"lane counts {lane_counts}, coverage {100 * coverage:.1f}%, "
            f"complete: {str(plan.complete).lower()}, closed: {str(plan.closed).lower()}"
        )
        for path in written:
            self.stdout.write(f"wrote {path}")

    def write_text(self, path, text):
        path.write_text(text, encoding='utf-8')
        return path

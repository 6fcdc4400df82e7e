"""
Shared plumbing for the rivers management commands.

Options resolve as command-line flags over a YAML ``--config`` file over the
``RIVERCOVER`` settings. Validation failures exit with status 2 and planning
failures with status 3.
"""
import logging
from pathlib import Path

import yaml
from django.core.management.base import BaseCommand, CommandError

from rivers.exceptions import MapError, RiverCoverError
from rivers.forms import RunConfigForm
from rivers.planner import survey_river
from rivers.river_map import load_map

logger = logging.getLogger(__name__)

VALIDATION_ERROR = 2
PLANNING_ERROR = 3


def load_config(path):
    """
    Flat key-value mapping from a YAML file.

    Raises:
        CommandError if the file is unreadable or not a mapping
    """
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise CommandError(f"Cannot read config {path}: {exc}", returncode=VALIDATION_ERROR) from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict) or any(isinstance(v, (dict, list)) for v in doc.values()):
        raise CommandError(f"Config {path} must be a flat key: value mapping", returncode=VALIDATION_ERROR)
    return {str(key).replace('-', '_'): value for key, value in doc.items()}


class RiverCommand(BaseCommand):
    """Base for commands validated by a form and run through ``run``."""

    requires_system_checks = []
    form_class = RunConfigForm

    def add_arguments(self, parser):
        parser.add_argument('--config', help="YAML file of option defaults")
        parser.add_argument('--seed', type=int, help="Seed for randomized steps")
        parser.add_argument('--out', help="Output directory or file")

    def add_run_arguments(self, parser):
        parser.add_argument('--map', help="River map: PGM raster, YAML sidecar or GeoJSON polygon")
        parser.add_argument('--start', help="Start point as X,Y in the map frame (meters)")
        parser.add_argument('--spacing', type=float, help="Lane spacing s in meters")
        parser.add_argument('--orientation', help="Which river end the start is at: downstream or upstream")
        parser.add_argument('--crs', help="Projected CRS of the map frame, e.g. EPSG:32617")

    def collect(self, options):
        """Merged option values for the form's fields."""
        data = load_config(options['config']) if options.get('config') else {}
        for name in self.form_class.base_fields:
            if options.get(name) is not None:
                data[name] = options[name]
        unknown = set(data) - set(self.form_class.base_fields)
        if unknown:
            raise CommandError(f"Unknown option(s): {', '.join(sorted(unknown))}", returncode=VALIDATION_ERROR)
        return data

    def validate(self, data):
        form = self.form_class(data=data)
        if not form.is_valid():
            messages = '; '.join(
                f"{field}: {' '.join(errors)}" if field != '__all__' else ' '.join(errors)
                for field, errors in form.errors.items()
            )
            raise CommandError(f"Invalid options: {messages}", returncode=VALIDATION_ERROR)
        # Empty optional fields come back as '' or None; both mean "use the default".
        return {key: (None if value in ('', None) else value) for key, value in form.cleaned_data.items()}

    def handle(self, *args, **options):
        config = self.validate(self.collect(options))
        try:
            return self.run(config)
        except MapError as exc:
            raise CommandError(str(exc), returncode=VALIDATION_ERROR) from exc
        except (RiverCoverError, ValueError) as exc:
            raise CommandError(str(exc), returncode=PLANNING_ERROR) from exc

    def run(self, config):
        raise NotImplementedError

    def survey(self, config):
        """Load the map and survey it from the start point."""
        river_map = load_map(config['map'], crs=config.get('crs'))
        return survey_river(river_map, config['start'], config.get('orientation'))

    def output_dir(self, config, default='.'):
        directory = Path(config.get('out') or default)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

from pathlib import Path

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from rivers import synthetic
from rivers.conf import resolve
from rivers.forms import parse_point
from rivers.river_map import write_map

from ._base import VALIDATION_ERROR

KINDS = {
    'rectangle': lambda seed: synthetic.rectangle(),
    'taper': lambda seed: synthetic.taper(),
    'widening': lambda seed: synthetic.widening(),
    'sine': lambda seed: synthetic.sine(),
    'annulus': lambda seed: synthetic.quarter_annulus(),
    's-curve': lambda seed: synthetic.s_curve(),
    'three-bends': lambda seed: synthetic.three_bends(),
    'three-meanders': lambda seed: synthetic.three_meanders(),
    'reach-2760': lambda seed: synthetic.reach_2760m(),
    'reach-4120': lambda seed: synthetic.reach_4120m(),
    'random': lambda seed: synthetic.random_river(seed),
}

BEDS = {
    'plane': synthetic.plane_bed,
    'sine': synthetic.sine_bed,
}


class Command(BaseCommand):
    help = "Write a synthetic river map (PGM + YAML sidecar) and print its start point."
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=sorted(KINDS))
        parser.add_argument('--out', required=True, help="Output path stem; .pgm and .yaml are added")
        parser.add_argument('--origin', default='0,0', help="Offset X,Y added to the map frame (meters)")
        parser.add_argument('--crs', help="Projected CRS recorded in the sidecar")
        parser.add_argument('--seed', type=int, help="Seed for random rivers and soundings")
        parser.add_argument('--soundings', type=int, default=0, help="Also write this many depth samples to <out>.csv")
        parser.add_argument('--bed', choices=sorted(BEDS), default='sine', help="River bed for the soundings")
        parser.add_argument('--noise', type=float, default=0.0, help="Sounding noise standard deviation, meters")

    def handle(self, *args, **options):
        try:
            offset = np.array(parse_point(options['origin'], 'origin'))
        except ValidationError as exc:
            raise CommandError('; '.join(exc.messages), returncode=VALIDATION_ERROR) from exc
        if options['soundings'] < 0 or options['noise'] < 0:
            raise CommandError("soundings and noise must not be negative", returncode=VALIDATION_ERROR)
        seed = resolve(options['seed'], 'SEED')
        river = KINDS[options['kind']](seed)

        stem = Path(options['out'])
        stem.parent.mkdir(parents=True, exist_ok=True)
        minx, miny, _, _ = river.river_map.bounds()
        sidecar = write_map(river.river_map, stem, origin=(minx + offset[0], miny + offset[1]), crs=options['crs'])
        self.stdout.write(f"wrote {sidecar}")

        if options['soundings']:
            positions, depths = synthetic.sample_bed(
                river.river_map, BEDS[options['bed']], options['soundings'], seed=seed, noise=options['noise'],
            )
            positions = positions + offset
            frame = pd.DataFrame({'x': positions[:, 0], 'y': positions[:, 1], 'depth': depths})
            path = stem.with_suffix('.csv')
            frame.to_csv(path, index=False, float_format='%.3f')
            self.stdout.write(f"wrote {path}")

        start = river.start + offset
        self.stdout.write(f"start {start[0]:.3f},{start[1]:.3f}")

from rivers.bathymetry import cross_validated_rmse, fit_depth_gp, read_samples, write_depth_map
from rivers.conf import resolve
from rivers.forms import DepthMapForm
from rivers.river_map import load_map

from ._base import RiverCommand


class Command(RiverCommand):
    help = "Fit a Gaussian-process depth map to soundings and report its cross-validated RMSE."
    form_class = DepthMapForm

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--samples', help="Depth soundings: CSV with x,y,depth columns or GPX")
        parser.add_argument('--map', help="River map whose Free cells get a depth estimate")
        parser.add_argument('--folds', type=int, help="Cross-validation folds")
        parser.add_argument('--restarts', type=int, help="Hyperparameter search restarts")
        parser.add_argument('--crs', help="Projected CRS for GPX soundings")

    def run(self, config):
        samples = read_samples(config['samples'], crs=config.get('crs'))
        seed = resolve(config.get('seed'), 'SEED')
        folds = resolve(config.get('folds'), 'CV_FOLDS')
        restarts = config.get('restarts')
        river_map = load_map(config['map'], crs=config.get('crs')) if config.get('map') else None

        depth_map = fit_depth_gp(samples, river_map=river_map, restarts=restarts, seed=seed)
        params = depth_map.params
        self.stdout.write(
            f"kernel: length scale {params.length_scale:.3f} m, "
            f"signal var {params.signal_var:.6g}, noise var {params.noise_var:.6g}"
        )
        if river_map is not None:
            for path in write_depth_map(depth_map, self.output_dir(config)):
                self.stdout.write(f"wrote {path}")
        error = cross_validated_rmse(samples, folds, seed=seed, restarts=restarts)
        self.stdout.write(f"RMSE {error:.4f} m ({folds}-fold)")

"""
Gaussian-process depth maps from sonar soundings.

Exact GP regression with a squared-exponential kernel on depths centered on
their mean. Hyperparameters are either given or fitted by maximizing the log
marginal likelihood with L-BFGS-B from several random starts.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from lxml import etree
from pyproj import Transformer
from scipy import linalg, optimize

from .conf import resolve
from .exceptions import BathymetryError

logger = logging.getLogger(__name__)

JITTER = 1e-8
# Hyperparameter search runs on at most this many samples; the posterior uses all of them.
OPTIMIZATION_SAMPLES = 1000
PREDICT_CHUNK = 4096
NODATA = -9999.0


@dataclass(frozen=True)
class DepthSample:
    position: np.ndarray
    depth: float


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel: signal_var * exp(-d^2 / (2 length_scale^2)) plus noise_var on the diagonal."""

    length_scale: float
    signal_var: float
    noise_var: float

    def __post_init__(self):
        if min(self.length_scale, self.signal_var) <= 0 or self.noise_var < 0:
            raise ValueError(f"Invalid kernel parameters: {self}")

    @property
    def theta(self):
        return np.log([self.length_scale, self.signal_var, self.noise_var])

    @classmethod
    def from_theta(cls, theta):
        length_scale, signal_var, noise_var = np.exp(theta)
        return cls(float(length_scale), float(signal_var), float(noise_var))


def as_arrays(samples):
    """
    (positions, depths) from DepthSample rows or a (positions, depths) pair.

    Raises:
        BathymetryError for non-finite or non-positive depths
    """
    if isinstance(samples, tuple) and len(samples) == 2 and not isinstance(samples[0], DepthSample):
        positions, depths = samples
    else:
        samples = list(samples)
        positions = [s.position for s in samples]
        depths = [s.depth for s in samples]
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    depths = np.asarray(depths, dtype=float).reshape(-1)
    if len(positions) != len(depths):
        raise BathymetryError(f"{len(positions)} positions but {len(depths)} depths")
    if not np.all(np.isfinite(positions)) or not np.all(np.isfinite(depths)):
        raise BathymetryError("Depth samples must be finite")
    if np.any(depths <= 0):
        raise BathymetryError("Depths must be positive")
    return positions, depths


def canonical_order(positions, depths):
    """Samples sorted by x, then y, then depth."""
    order = np.lexsort((depths, positions[:, 1], positions[:, 0]))
    return positions[order], depths[order]


def _squared_distances(a, b):
    return np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)


def _cholesky(matrix):
    try:
        return linalg.cho_factor(matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise BathymetryError("Kernel matrix is singular even with jitter") from exc


def log_marginal_likelihood(theta, positions, targets):
    """
    Log marginal likelihood of centered ``targets`` and its gradient in log parameters.

    Returns:
        (value, gradient) with gradient ordered as theta: log length scale,
        log signal variance, log noise variance
    """
    length_scale, signal_var, noise_var = np.exp(theta)
    squared = _squared_distances(positions, positions)
    shape = signal_var * np.exp(-0.5 * squared / length_scale ** 2)
    n = len(targets)
    factor = linalg.cho_factor(shape + (noise_var + JITTER) * np.eye(n), lower=True)
    alpha = linalg.cho_solve(factor, targets)
    value = -0.5 * targets @ alpha - np.log(np.diag(factor[0])).sum() - 0.5 * n * np.log(2 * np.pi)

    inner = np.outer(alpha, alpha) - linalg.cho_solve(factor, np.eye(n))
    gradients = (shape * squared / length_scale ** 2, shape, noise_var * np.eye(n))
    gradient = np.array([0.5 * np.sum(inner * g) for g in gradients])
    return float(value), gradient


def _bounds(positions, targets):
    extent = max(float(np.ptp(positions, axis=0).max()), 1.0)
    variance = float(np.var(targets)) + 1e-6
    return [
        (np.log(1e-3 * extent), np.log(10 * extent)),
        (np.log(1e-6), np.log(100 * variance)),
        (np.log(1e-10), np.log(10 * variance)),
    ]


def optimize_kernel(positions, targets, restarts=None, seed=None):
    """
    Kernel parameters maximizing the log marginal likelihood.

    The first start is a heuristic guess, the rest are drawn uniformly in
    log space within the search bounds.
    """
    restarts = resolve(restarts, 'GP_RESTARTS')
    rng = np.random.default_rng(resolve(seed, 'SEED'))
    if len(positions) > OPTIMIZATION_SAMPLES:
        pick = np.sort(rng.choice(len(positions), OPTIMIZATION_SAMPLES, replace=False))
        positions, targets = positions[pick], targets[pick]
    bounds = _bounds(positions, targets)
    lower, upper = np.array(bounds).T
    variance = float(np.var(targets)) + 1e-6
    guess = np.clip(
        np.log([0.2 * max(float(np.ptp(positions, axis=0).max()), 1.0), variance, 0.01 * variance]),
        lower, upper,
    )
    starts = [guess] + [rng.uniform(lower, upper) for _ in range(max(restarts - 1, 0))]

    def objective(theta):
        try:
            value, gradient = log_marginal_likelihood(theta, positions, targets)
        except linalg.LinAlgError:
            return 1e25, np.zeros_like(theta)
        return -value, -gradient

    best = None
    for start in starts:
        result = optimize.minimize(objective, start, jac=True, method='L-BFGS-B', bounds=bounds)
        if best is None or result.fun < best.fun:
            best = result
    params = KernelParams.from_theta(best.x)
    logger.info(
        "Fitted kernel: length scale %.1f m, signal var %.4g, noise var %.4g (-LML %.2f)",
        params.length_scale, params.signal_var, params.noise_var, best.fun,
    )
    return params


def thin_samples(positions, depths, cell, limit):
    """
    Average samples per square cell of side ``cell`` until at most ``limit`` remain.

    The cell doubles while too many samples are left.
    """
    while len(positions) > limit:
        frame = pd.DataFrame({
            'x': positions[:, 0], 'y': positions[:, 1], 'depth': depths,
            'i': np.floor(positions[:, 0] / cell).astype(int),
            'j': np.floor(positions[:, 1] / cell).astype(int),
        })
        means = frame.groupby(['i', 'j'], sort=True)[['x', 'y', 'depth']].mean()
        logger.warning("Thinned %d depth samples to %d on a %.1f m grid", len(positions), len(means), cell)
        positions, depths = means[['x', 'y']].to_numpy(), means['depth'].to_numpy()
        cell *= 2
    return positions, depths


@dataclass(frozen=True, eq=False)
class GaussianProcess:
    """Posterior of a fitted GP: canonical training samples, their mean and the Cholesky factor."""

    positions: np.ndarray
    depths: np.ndarray
    offset: float
    params: KernelParams
    factor: tuple
    alpha: np.ndarray

    @classmethod
    def fit(cls, positions, depths, params):
        positions, depths = canonical_order(positions, depths)
        offset = float(np.mean(depths))
        targets = depths - offset
        squared = _squared_distances(positions, positions)
        matrix = params.signal_var * np.exp(-0.5 * squared / params.length_scale ** 2)
        matrix += (params.noise_var + JITTER) * np.eye(len(positions))
        factor = _cholesky(matrix)
        return cls(positions, depths, offset, params, factor, linalg.cho_solve(factor, targets))

    def predict(self, points):
        """Posterior mean depth and standard deviation at ``points``."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        means = np.empty(len(points))
        stds = np.empty(len(points))
        for lo in range(0, len(points), PREDICT_CHUNK):
            chunk = points[lo:lo + PREDICT_CHUNK]
            cross = self.params.signal_var * np.exp(
                -0.5 * _squared_distances(chunk, self.positions) / self.params.length_scale ** 2
            )
            means[lo:lo + len(chunk)] = self.offset + cross @ self.alpha
            v = linalg.solve_triangular(self.factor[0], cross.T, lower=True)
            variance = self.params.signal_var - np.sum(v * v, axis=0)
            stds[lo:lo + len(chunk)] = np.sqrt(np.maximum(variance, 0.0))
        return means, stds


@dataclass(frozen=True, eq=False)
class DepthMap:
    """
    Fitted depth surface, gridded over the Free cells of a map when one is given.

    Fields:
    - process: the fitted GaussianProcess
    - mean, std: per-cell arrays (NaN on Obstacle cells), or None without a map
    - river_map: the map the grid covers, or None
    """

    process: GaussianProcess
    mean: np.ndarray = None
    std: np.ndarray = None
    river_map: object = None

    @property
    def params(self):
        return self.process.params

    def predict(self, points):
        return self.process.predict(points)


def _check_spread(positions):
    if len(positions) < 3:
        raise BathymetryError(f"Need at least 3 depth samples to fit a kernel, got {len(positions)}")
    if np.linalg.matrix_rank(positions - positions.mean(axis=0), tol=1e-9) < 2:
        raise BathymetryError("Depth samples are collinear")


def fit_depth_gp(samples, params=None, river_map=None, *, restarts=None, seed=None,
                 max_samples=None, thin_cell=None):
    """
    Fit a GP depth surface.

    ``params`` is a KernelParams, or None / 'auto' to fit the hyperparameters.
    With a ``river_map`` the posterior mean and std are evaluated on its Free cells.

    Raises:
        BathymetryError for too few, collinear or invalid samples, or a singular kernel
    """
    positions, depths = as_arrays(samples)
    if not len(positions):
        raise BathymetryError("No depth samples")
    limit = resolve(max_samples, 'GP_MAX_SAMPLES')
    if len(positions) > limit:
        cell = resolve(thin_cell, 'GP_THIN_CELL')
        if cell is None:
            cell = river_map.resolution if river_map is not None else 1.0
        positions, depths = thin_samples(positions, depths, cell, limit)
    positions, depths = canonical_order(positions, depths)

    if params is None or params == 'auto':
        _check_spread(positions)
        params = optimize_kernel(positions, depths - depths.mean(), restarts, seed)
    process = GaussianProcess.fit(positions, depths, params)
    if river_map is None:
        return DepthMap(process)

    rows, cols = np.nonzero(river_map.grid)
    mean = np.full(river_map.grid.shape, np.nan)
    std = np.full(river_map.grid.shape, np.nan)
    mean[rows, cols], std[rows, cols] = process.predict(river_map.cell_centers(rows, cols))
    logger.info("Depth map over %d cells from %d samples", len(rows), len(positions))
    return DepthMap(process, mean, std, river_map)


def rmse(depth_map, held_out):
    """
    Root-mean-square error of the map's mean against ``held_out`` samples.

    Raises:
        BathymetryError for an empty held-out set
    """
    positions, depths = as_arrays(held_out)
    if not len(depths):
        raise BathymetryError("RMSE needs at least one held-out sample")
    predicted, _ = depth_map.predict(positions)
    return float(np.sqrt(np.mean((predicted - depths) ** 2)))


def cross_validated_rmse(samples, folds=None, params=None, *, seed=None, restarts=None):
    """Pooled RMSE over shuffled k-fold splits."""
    positions, depths = as_arrays(samples)
    folds = resolve(folds, 'CV_FOLDS')
    if len(depths) < folds:
        raise BathymetryError(f"{len(depths)} samples cannot be split into {folds} folds")
    rng = np.random.default_rng(resolve(seed, 'SEED'))
    order = rng.permutation(len(depths))
    errors = []
    for held in np.array_split(order, folds):
        train = np.setdiff1d(order, held)
        fitted = fit_depth_gp((positions[train], depths[train]), params, restarts=restarts, seed=seed)
        predicted, _ = fitted.predict(positions[held])
        errors.append(predicted - depths[held])
    errors = np.concatenate(errors)
    return float(np.sqrt(np.mean(errors ** 2)))


# Sample files

def read_samples(path, crs=None):
    """
    Depth samples from a CSV (x, y, depth) or a GPX file with depth extensions.

    GPX points are projected to ``crs`` (a projected CRS, required for GPX).

    Raises:
        BathymetryError for unreadable files or missing columns
    """
    path = Path(path)
    if path.suffix.lower() == '.gpx':
        return _read_gpx(path, resolve(crs, 'CRS'))
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise BathymetryError(f"Cannot read depth samples from {path}: {exc}") from exc
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    missing = {'x', 'y', 'depth'} - set(frame.columns)
    if missing:
        raise BathymetryError(f"{path} is missing columns: {', '.join(sorted(missing))}")
    frame = frame.dropna(subset=['x', 'y', 'depth'])
    return as_arrays((frame[['x', 'y']].to_numpy(dtype=float), frame['depth'].to_numpy(dtype=float)))


def _read_gpx(path, crs):
    if crs is None:
        raise BathymetryError("GPX depth samples need a projected CRS")
    try:
        tree = etree.parse(str(path))
    except (OSError, etree.XMLSyntaxError) as exc:
        raise BathymetryError(f"Cannot read GPX file {path}: {exc}") from exc
    lon, lat, depths = [], [], []
    for point in tree.iter('{*}trkpt', '{*}wpt', '{*}rtept'):
        found = point.xpath(".//*[local-name()='depth']")
        if not found:
            continue
        lon.append(float(point.get('lon')))
        lat.append(float(point.get('lat')))
        depths.append(float(found[0].text))
    if not depths:
        raise BathymetryError(f"No depth values in {path}")
    transformer = Transformer.from_crs('EPSG:4326', crs, always_xy=True)
    x, y = transformer.transform(lon, lat)
    return as_arrays((np.column_stack([x, y]), np.asarray(depths)))


def ascii_grid(values, river_map, nodata=NODATA):
    """
    ESRI ASCII raster text for a per-cell array, rows north first.

    Raises:
        BathymetryError for rotated map frames
    """
    transform = river_map.transform
    if transform.b or transform.d:
        raise BathymetryError("ASCII grids need a north-up map frame")
    values = np.where(np.isfinite(values), values, nodata)
    # Row order follows the sign of the y pixel size.
    values = values if transform.e < 0 else values[::-1]
    minx, miny, _, _ = river_map.bounds()
    rows, cols = values.shape
    header = [
        f"ncols {cols}",
        f"nrows {rows}",
        f"xllcorner {minx:.3f}",
        f"yllcorner {miny:.3f}",
        f"cellsize {river_map.resolution:.3f}",
        f"NODATA_value {nodata:.0f}",
    ]
    body = [' '.join(f"{v:.3f}" for v in row) for row in values]
    return '\n'.join(header + body) + '\n'


def write_depth_map(depth_map, directory, stem='depth'):
    """
    Write ``<stem>_mean.asc`` and ``<stem>_std.asc``.

    Returns:
        the two paths
    """
    if depth_map.river_map is None:
        raise BathymetryError("Depth map has no grid to write")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, values in (('mean', depth_map.mean), ('std', depth_map.std)):
        path = directory / f"{stem}_{name}.asc"
        path.write_text(ascii_grid(values, depth_map.river_map))
        paths.append(path)
    return paths

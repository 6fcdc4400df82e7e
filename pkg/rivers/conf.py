"""
App-level settings for the rivers app.

Values come from ``settings.RIVERCOVER``; anything missing there falls back
to the defaults below, so the planners also work with a bare settings module.
"""
from django.conf import settings

DEFAULTS = {
    # Contour extraction (river_map)
    'DP_TOLERANCE_CELLS': 1.5,        # Douglas-Peucker tolerance, in cells
    'SMOOTHING_WINDOW': 5,            # moving-average window, in vertices
    'OPENING_CUT_CELLS': 1.5,         # bank vertices this close to an opening are cut
    'MATCH_WINDOW': 0.05,             # bank matching search, fraction of arc length
    'START_ORIENTATION': 'downstream',  # the start point is the downstream end
    'PGM_RESOLUTION': 3.0,            # meters per cell for bare PGM rasters

    # Bend classification (meander)
    'TANGENT_STEP_CELLS': 4,
    'TANGENT_STEP_WIDTH_FRACTION': 0.25,
    'STRAIGHT_ANGLE_DEG': 0.5,
    'STRAIGHT_DISTANCE_WIDTHS': 10.0,
    'STRAIGHT_RUN_STEPS': 3,

    # Width clusters (planner), shortest cluster in median river widths
    'CLUSTER_MIN_WIDTHS': 2.0,

    # Current field and boat (current_sim)
    'CURRENT_PROFILE': 'linear',
    'CURRENT_EXPONENT': 3.0,          # power profile only
    'V_MIN': 0.0,
    'V_MAX': None,                    # None: calibrate from UPSTREAM_RATIO
    'BOAT_SPEED': 2.0,
    'TURN_PENALTY': 0.0,
    'UPSTREAM_RATIO': 1.47,

    # Depth mapping (bathymetry)
    'GP_RESTARTS': 5,
    'GP_MAX_SAMPLES': 5000,
    'GP_THIN_CELL': None,             # None: the map resolution
    'CV_FOLDS': 5,

    # Missions (mission_io)
    'WAYPOINT_LIMIT': 700,
    'CRS': None,                      # projected CRS of the map frame, e.g. 'EPSG:32617'

    'SEED': 0,
}


def app_settings(key):
    """Return the configured value for ``key``."""
    if key not in DEFAULTS:
        raise KeyError(f"Unknown rivers setting: {key}")
    configured = getattr(settings, 'RIVERCOVER', {}) or {}
    return configured.get(key, DEFAULTS[key])


def resolve(value, key):
    """Return ``value`` unless it is None, in which case the setting ``key``."""
    return app_settings(key) if value is None else value

from pathlib import Path

from django import forms
from django.core.exceptions import ValidationError

from .current_sim import CurrentProfile
from .planner import Algorithm
from .river_map import Orientation


def parse_point(value, name='point'):
    """Parse ``"X,Y"`` into a pair of floats."""
    try:
        x, y = (float(part) for part in str(value).split(','))
    except ValueError:
        raise ValidationError(f"{name} must look like X,Y (meters), got {value!r}")
    return x, y


class RunConfigForm(forms.Form):
    """
    Settings for one planning run (plan, compare and render commands).

    Features:
    - Map path and start point checks
    - Spacing and current-field preconditions
    - Comma-separated algorithm lists for comparisons
    """

    map = forms.CharField()
    start = forms.CharField()
    spacing = forms.FloatField()
    algorithm = forms.ChoiceField(choices=Algorithm.choices, required=False)
    algorithms = forms.CharField(required=False)
    orientation = forms.ChoiceField(choices=Orientation.choices, required=False)
    v_min = forms.FloatField(required=False)
    v_max = forms.FloatField(required=False)
    boat_speed = forms.FloatField(required=False)
    turn_penalty = forms.FloatField(required=False)
    upstream_ratio = forms.FloatField(required=False)
    profile = forms.ChoiceField(choices=CurrentProfile.choices, required=False)
    exponent = forms.FloatField(required=False)
    crs = forms.CharField(required=False)
    out = forms.CharField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)

    def clean_map(self):
        """
        Raises:
            ValidationError if the map file does not exist
        """
        path = Path(self.cleaned_data['map'])
        if not path.is_file():
            raise ValidationError(f"Map file not found: {path}")
        return path

    def clean_start(self):
        return parse_point(self.cleaned_data['start'], 'start')

    def clean_spacing(self):
        spacing = self.cleaned_data['spacing']
        if spacing is None or not spacing > 0:
            raise ValidationError(f"spacing must be positive, got {spacing}")
        return spacing

    def clean_algorithms(self):
        """
        Returns:
            list of Algorithm, empty when none were given

        Raises:
            ValidationError for unknown names
        """
        raw = self.cleaned_data.get('algorithms') or ''
        names = [name.strip() for name in raw.split(',') if name.strip()]
        unknown = [name for name in names if name not in Algorithm.values]
        if unknown:
            raise ValidationError(
                f"Unknown algorithm(s): {', '.join(unknown)}. Choose from {', '.join(Algorithm.values)}"
            )
        return [Algorithm(name) for name in names]

    def clean_boat_speed(self):
        speed = self.cleaned_data.get('boat_speed')
        if speed is not None and not speed > 0:
            raise ValidationError(f"boat speed must be positive, got {speed}")
        return speed

    def clean_turn_penalty(self):
        penalty = self.cleaned_data.get('turn_penalty')
        if penalty is not None and penalty < 0:
            raise ValidationError(f"turn penalty must not be negative, got {penalty}")
        return penalty

    def clean_upstream_ratio(self):
        ratio = self.cleaned_data.get('upstream_ratio')
        if ratio is not None and ratio < 1:
            raise ValidationError(f"upstream ratio must be at least 1, got {ratio}")
        return ratio

    def clean(self):
        """Cross-field checks on the current field: 0 <= v_min <= v_max < boat speed."""
        cleaned = super().clean()
        v_min, v_max, boat = cleaned.get('v_min'), cleaned.get('v_max'), cleaned.get('boat_speed')
        if v_min is not None and v_min < 0:
            self.add_error('v_min', "v_min must not be negative")
        if v_min is not None and v_max is not None and v_min > v_max:
            self.add_error('v_max', f"v_max ({v_max}) must not be below v_min ({v_min})")
        if v_max is not None and boat is not None and v_max >= boat:
            self.add_error('v_max', f"v_max ({v_max}) must be below the boat speed ({boat})")
        return cleaned


class DepthMapForm(forms.Form):
    """
    Settings for a depth-map run.
    """

    samples = forms.CharField()
    map = forms.CharField(required=False)
    folds = forms.IntegerField(required=False, min_value=2)
    restarts = forms.IntegerField(required=False, min_value=1)
    crs = forms.CharField(required=False)
    out = forms.CharField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)

    def clean_samples(self):
        path = Path(self.cleaned_data['samples'])
        if not path.is_file():
            raise ValidationError(f"Sample file not found: {path}")
        if path.suffix.lower() not in ('.csv', '.gpx'):
            raise ValidationError(f"Depth samples must be CSV or GPX, got {path.suffix or 'no suffix'}")
        return path

    def clean_map(self):
        value = self.cleaned_data.get('map')
        if not value:
            return None
        path = Path(value)
        if not path.is_file():
            raise ValidationError(f"Map file not found: {path}")
        return path

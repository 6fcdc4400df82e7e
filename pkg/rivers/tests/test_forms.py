import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from rivers.forms import DepthMapForm, RunConfigForm
from rivers.planner import Algorithm


class RunConfigFormTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.map_path = Path(self.tmp.name) / 'river.pgm'
        self.map_path.write_bytes(b'')

    def form(self, **overrides):
        data = {'map': str(self.map_path), 'start': '4.5,1.5', 'spacing': 45.0}
        data.update(overrides)
        return RunConfigForm(data=data)

    def test_valid(self):
        form = self.form(algorithms='m-cover, t-cover', v_min=0.0, v_max=0.5, boat_speed=2.0)
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data['start'], (4.5, 1.5))
        self.assertEqual(form.cleaned_data['map'], self.map_path)
        self.assertEqual(form.cleaned_data['algorithms'], [Algorithm.M_COVER, Algorithm.T_COVER])

    def test_spacing_must_be_positive(self):
        form = self.form(spacing=0)
        self.assertFalse(form.is_valid())
        self.assertIn('spacing', form.errors)

    def test_bad_start(self):
        form = self.form(start='4.5')
        self.assertFalse(form.is_valid())
        self.assertIn('start', form.errors)

    def test_missing_map(self):
        form = self.form(map=str(Path(self.tmp.name) / 'nowhere.pgm'))
        self.assertFalse(form.is_valid())
        self.assertIn('map', form.errors)

    def test_unknown_algorithm(self):
        form = self.form(algorithms='m-cover,bogus')
        self.assertFalse(form.is_valid())
        self.assertIn('bogus', str(form.errors['algorithms']))

    def test_current_bounds(self):
        self.assertIn('v_max', self.form(v_min=0.6, v_max=0.4).errors)
        self.assertIn('v_max', self.form(v_max=2.0, boat_speed=2.0).errors)
        self.assertIn('v_min', self.form(v_min=-0.1).errors)

    def test_boat_and_ratio(self):
        self.assertIn('boat_speed', self.form(boat_speed=0).errors)
        self.assertIn('turn_penalty', self.form(turn_penalty=-1).errors)
        self.assertIn('upstream_ratio', self.form(upstream_ratio=0.9).errors)


class DepthMapFormTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_csv_and_gpx(self):
        for name in ('soundings.csv', 'track.GPX'):
            path = self.dir / name
            path.write_text('')
            form = DepthMapForm(data={'samples': str(path)})
            self.assertTrue(form.is_valid(), form.errors)
            self.assertIsNone(form.cleaned_data['map'])

    def test_other_suffix(self):
        path = self.dir / 'soundings.txt'
        path.write_text('')
        form = DepthMapForm(data={'samples': str(path)})
        self.assertFalse(form.is_valid())
        self.assertIn('samples', form.errors)

    def test_folds(self):
        path = self.dir / 'soundings.csv'
        path.write_text('')
        self.assertIn('folds', DepthMapForm(data={'samples': str(path), 'folds': 1}).errors)

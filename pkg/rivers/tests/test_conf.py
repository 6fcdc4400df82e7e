from django.conf import settings
from django.test import SimpleTestCase, override_settings

from rivers.conf import DEFAULTS, app_settings, resolve


class AppSettingsTests(SimpleTestCase):
    def test_project_lists_only_known_overrides(self):
        configured = set(settings.RIVERCOVER)
        self.assertTrue(configured <= set(DEFAULTS), configured - set(DEFAULTS))
        self.assertLess(len(configured), len(DEFAULTS))

    def test_linear_current_by_default(self):
        self.assertEqual(app_settings('CURRENT_PROFILE'), 'linear')

    @override_settings(RIVERCOVER={'BOAT_SPEED': 3.5})
    def test_override_and_fallback(self):
        self.assertEqual(app_settings('BOAT_SPEED'), 3.5)
        self.assertEqual(app_settings('UPSTREAM_RATIO'), DEFAULTS['UPSTREAM_RATIO'])

    @override_settings(RIVERCOVER=None)
    def test_bare_settings(self):
        self.assertEqual(app_settings('SEED'), 0)

    def test_resolve(self):
        self.assertEqual(resolve(7, 'SEED'), 7)
        self.assertEqual(resolve(None, 'WAYPOINT_LIMIT'), 700)

    def test_unknown_key(self):
        with self.assertRaises(KeyError):
            app_settings('WOBBLE')

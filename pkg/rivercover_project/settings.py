"""
Django settings for rivercover_project project.

The project has no web surface: Django provides the configuration layer,
the management-command CLI, form validation and the test runner for the
``rivers`` app, which holds the coverage planners.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/6.0/ref/settings/
"""

from pathlib import Path

import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'RIVERCOVER_SECRET_KEY',
    'django-insecure-rivercover-development-key',
)

DEBUG = os.environ.get('RIVERCOVER_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rivers',  # Coverage planning app
]

# Planning is pure computation; nothing is persisted.
DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'


# Logging
# https://docs.djangoproject.com/en/6.0/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'rivers': {
            'handlers': ['console'],
            'level': os.environ.get('RIVERCOVER_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Coverage planning overrides. Every key and its default lives in
# rivers/conf.py; list only what differs here.
# Command-line flags override a --config file, which overrides these.

RIVERCOVER = {
    'CRS': os.environ.get('RIVERCOVER_CRS') or None,
}

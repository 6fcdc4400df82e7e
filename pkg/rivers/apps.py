# rivers/apps.py
from django.apps import AppConfig


class RiversConfig(AppConfig):
    name = 'rivers'
    verbose_name = 'River coverage planning'

import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rivercover_project.settings')
django.setup()

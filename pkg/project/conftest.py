import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'dispersive.settings')
django.setup()

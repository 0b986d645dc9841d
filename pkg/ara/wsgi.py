"""
WSGI config for the ara project.

Serves the read-only experiment API and the admin. The pipeline itself runs
through management commands (see manage.py).
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ara.settings')

application = get_wsgi_application()

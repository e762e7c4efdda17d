"""
WSGI entry point serving the capacity API (``/api/``).
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "_settings.settings")

application = get_wsgi_application()

"""
wsgi.py
WSGI config for subspace_distance_app project.
Used by `runserver` to browse the run history in the admin.

Main functionality:
    - Loads an optional .env file beside manage.py.
    - Exposes the WSGI application callable.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

env_path = BASE_DIR / '.env'
if env_path.exists():
    load_dotenv(dotenv_path=env_path)

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'subspace_distance_app.settings')

from django.core.wsgi import get_wsgi_application  # noqa: E402
application = get_wsgi_application()

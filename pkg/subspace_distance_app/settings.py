"""
settings.py
Django settings for subspace_distance_app project.
This file configures the subspaces app, its run-history database, logging, and the
defaults the `subspace` management command falls back to.

Sections:
    - Paths and environment: BASE_DIR, optional .env file, django-environ reader.
    - Security: Secret key and debug mode.
    - Application definition: Installed apps and middleware (admin only).
    - Database: SQLite file holding pipeline run history.
    - Logging: Console handler, with levels for django and subspaces loggers.
    - SUBSPACES: Command defaults, each overridable by SUBSPACES_<KEY>.
"""

from pathlib import Path

import environ
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env_path = BASE_DIR / '.env'
if env_path.exists():
    load_dotenv(dotenv_path=env_path)

env = environ.Env(
    DJANGO_DEBUG=(bool, False),
    DJANGO_LOG_LEVEL=(str, 'INFO'),
    SUBSPACES_LOG_LEVEL=(str, 'INFO'),
)

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = env('DJANGO_SECRET_KEY', default='django-insecure-subspaces-local-only')

DEBUG = env('DJANGO_DEBUG')

ALLOWED_HOSTS = env.list('ALLOWED_HOSTS', default=['localhost', '127.0.0.1'])


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'subspaces',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'subspace_distance_app.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'subspace_distance_app.wsgi.application'


# Database: run history only

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': env('SUBSPACES_DB_PATH', default=str(BASE_DIR / 'db.sqlite3')),
    }
}

LANGUAGE_CODE = 'en'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': env('DJANGO_LOG_LEVEL'),
            'propagate': False,
        },
        'subspaces': {
            'handlers': ['console'],
            'level': env('SUBSPACES_LOG_LEVEL'),
            'propagate': False,
        },
    },
}


# Defaults for `manage.py subspace`; SUBSPACES_DEFAULT_BITS=12 overrides DEFAULT_BITS, and so on.
SUBSPACES = {
    'DEFAULT_BITS': env.int('SUBSPACES_DEFAULT_BITS', default=10),
    'DEFAULT_SHOTS': env.int('SUBSPACES_DEFAULT_SHOTS', default=100000),
    'DEFAULT_SEED': env.int('SUBSPACES_DEFAULT_SEED', default=0),
    'DEFAULT_EPS_H': env.float('SUBSPACES_DEFAULT_EPS_H', default=1e-8),
    'DEFAULT_EVOLUTION': env.str('SUBSPACES_DEFAULT_EVOLUTION', default='exact'),
    'PHASE_NORMALIZATION': env.str('SUBSPACES_PHASE_NORMALIZATION', default='bound'),
    'SWEEP_WORKERS': env.int('SUBSPACES_SWEEP_WORKERS', default=1),
}

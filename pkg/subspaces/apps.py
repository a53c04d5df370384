# apps.py
# Defines the configuration for the subspaces Django app.

from django.apps import AppConfig


class SubspacesConfig(AppConfig):
    """
    Configuration class for the subspaces app.
    Sets the default auto field and app name.
    """
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'subspaces'
    verbose_name = 'Subspace distances'

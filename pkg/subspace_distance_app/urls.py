"""
urls.py
URL configuration for subspace_distance_app project.
Only the admin is served; it lists the stored pipeline runs.

Patterns:
    - 'admin/': Django admin site.
"""

from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]

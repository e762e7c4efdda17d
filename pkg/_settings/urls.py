"""
URL configuration for the capacity toolkit.

Only the JSON API is exposed; the command-line surface lives in
app_capacity/management/commands.
"""

from django.urls import path, include

urlpatterns = [
    path("api/", include("app_capacity.urls")),
]

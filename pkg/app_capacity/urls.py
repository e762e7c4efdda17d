from django.urls import path
from . import views


urlpatterns = [
    path("health/", views.health_check, name="health-check"),
    path("scenario/defaults/", views.scenario_defaults, name="scenario-defaults"),
    path("evaluate/", views.evaluate, name="evaluate"),
]

from django.apps import AppConfig


class AppCapacityConfig(AppConfig):
    name = "app_capacity"
    verbose_name = "UAV mmWave capacity"

from django.apps import AppConfig


class PropagatorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'propagator'
    verbose_name = 'Линейная эволюция'

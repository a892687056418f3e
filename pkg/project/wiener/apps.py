from django.apps import AppConfig


class WienerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'wiener'
    verbose_name = 'Алгебра Винера'

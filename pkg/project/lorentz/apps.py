from django.apps import AppConfig


class LorentzConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lorentz'
    verbose_name = 'Нормы Лоренца'

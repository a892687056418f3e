from django.apps import AppConfig


class NlsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nls'
    verbose_name = 'Нелинейное уравнение Шрёдингера'

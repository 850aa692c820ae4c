from django.apps import AppConfig


class CalculusConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'calculus'
    verbose_name = 'Process calculus workbench'

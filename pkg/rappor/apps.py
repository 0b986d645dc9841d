from django.apps import AppConfig


class RapporConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'rappor'

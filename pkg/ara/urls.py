"""ara URL Configuration

Only two surfaces are exposed over HTTP: the Django admin and the read-only
API over recorded experiment runs. Reports are never ingested over the network.
"""
from django.contrib import admin
from django.urls import path, include


urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('analysis.api.urls', namespace='api')),
]

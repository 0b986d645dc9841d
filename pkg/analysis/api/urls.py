from django.urls import path, include
from rest_framework import routers
from . import views


app_name = 'analysis'


router = routers.DefaultRouter()
router.register('runs', views.ExperimentRunViewSet)


urlpatterns = [
    path('', include(router.urls)),
]

from rest_framework import viewsets
from rest_framework.decorators import action
from rest_framework.response import Response
from analysis.models import ExperimentRun
from analysis.api.serializers import (
    AchievementPointSerializer,
    ExperimentRunSerializer,
    ExperimentRunWithResultsSerializer,
)


class ExperimentRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = ExperimentRun.objects.all()
    serializer_class = ExperimentRunSerializer

    def get_serializer_class(self):
        if self.action == 'retrieve':
            return ExperimentRunWithResultsSerializer
        return super().get_serializer_class()

    @action(detail=True, methods=['get'])
    def sizes(self, request, *args, **kwargs):
        run = self.get_object()
        serializer = AchievementPointSerializer(run.results.all(), many=True)
        return Response(serializer.data)

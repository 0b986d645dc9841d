from rest_framework import serializers
from analysis.models import ExperimentRun, ExperimentResult


class ExperimentResultSerializer(serializers.ModelSerializer):
    class Meta:
        model = ExperimentResult
        fields = ['test_no', 'major_value', 'sample_size',
                  'achievement_pct', 'ground_truth', 'correct']


class ExperimentRunSerializer(serializers.ModelSerializer):
    detected = serializers.IntegerField(read_only=True)

    class Meta:
        model = ExperimentRun
        fields = ['id', 'seed', 'train_clients', 'test_clients', 'batch_size',
                  'n_tests', 'rate', 'params_fingerprint', 'rank_correlation',
                  'detected', 'created']


class ExperimentRunWithResultsSerializer(ExperimentRunSerializer):
    results = ExperimentResultSerializer(many=True, read_only=True)

    class Meta(ExperimentRunSerializer.Meta):
        fields = ExperimentRunSerializer.Meta.fields + ['results']


class AchievementPointSerializer(serializers.ModelSerializer):
    class Meta:
        model = ExperimentResult
        fields = ['sample_size', 'achievement_pct']

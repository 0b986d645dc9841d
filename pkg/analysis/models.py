from django.db import models


class ExperimentRun(models.Model):
    seed = models.PositiveBigIntegerField()
    train_clients = models.PositiveIntegerField()
    test_clients = models.PositiveIntegerField()
    batch_size = models.PositiveIntegerField()
    n_tests = models.PositiveIntegerField()
    rate = models.FloatField()
    params_fingerprint = models.CharField(max_length=16)
    rank_correlation = models.FloatField(null=True, blank=True)
    created = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created']

    def __str__(self):
        return f'Run {self.id} (seed {self.seed}, {self.n_tests} x {self.batch_size})'

    @property
    def detected(self):
        return self.results.filter(correct=True).count()

    @classmethod
    def record(cls, rows, train_config, test_config, batch_size, rank_correlation=None):
        """Persist one eval run with its result rows."""
        run = cls.objects.create(
            seed=train_config.seed,
            train_clients=train_config.n_clients,
            test_clients=test_config.n_clients,
            batch_size=batch_size,
            n_tests=len(rows),
            rate=train_config.rate,
            params_fingerprint=train_config.params.fingerprint(),
            rank_correlation=rank_correlation,
        )
        ExperimentResult.objects.bulk_create(
            ExperimentResult(
                run=run,
                test_no=row.test_no,
                major_value=row.major_true_value,
                sample_size=row.sample_size,
                achievement_pct=row.achievement_pct,
                ground_truth=row.ground_truth_major,
                correct=row.detected_correctly,
            )
            for row in rows
        )
        return run


class ExperimentResult(models.Model):
    run = models.ForeignKey(ExperimentRun, related_name='results', on_delete=models.CASCADE)
    test_no = models.PositiveIntegerField()
    major_value = models.CharField(max_length=200, blank=True)
    sample_size = models.PositiveIntegerField()
    achievement_pct = models.FloatField()
    ground_truth = models.CharField(max_length=200)
    correct = models.BooleanField()

    class Meta:
        ordering = ['test_no']
        unique_together = ('run', 'test_no')

    def __str__(self):
        return f'Test {self.test_no}: {self.major_value or "-"} ({self.achievement_pct:.2f}%)'

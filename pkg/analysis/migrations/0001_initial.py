# Generated by Django 5.2.1

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('seed', models.PositiveBigIntegerField()),
                ('train_clients', models.PositiveIntegerField()),
                ('test_clients', models.PositiveIntegerField()),
                ('batch_size', models.PositiveIntegerField()),
                ('n_tests', models.PositiveIntegerField()),
                ('rate', models.FloatField()),
                ('params_fingerprint', models.CharField(max_length=16)),
                ('rank_correlation', models.FloatField(blank=True, null=True)),
                ('created', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('test_no', models.PositiveIntegerField()),
                ('major_value', models.CharField(blank=True, max_length=200)),
                ('sample_size', models.PositiveIntegerField()),
                ('achievement_pct', models.FloatField()),
                ('ground_truth', models.CharField(max_length=200)),
                ('correct', models.BooleanField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='analysis.experimentrun')),
            ],
            options={
                'ordering': ['test_no'],
                'unique_together': {('run', 'test_no')},
            },
        ),
    ]

from django.contrib import admin
from .models import ExperimentRun, ExperimentResult


class ExperimentResultInline(admin.TabularInline):
    model = ExperimentResult
    extra = 0


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'seed', 'n_tests', 'batch_size', 'rank_correlation', 'created']
    list_filter = ['created', 'batch_size']
    search_fields = ['params_fingerprint']
    inlines = [ExperimentResultInline]

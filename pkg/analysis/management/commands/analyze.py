from collections import Counter

from aggregator.constants import build_constant_table
from aggregator.store import load_store
from analysis.matching import NO_MAJOR, analyze_batch, majority_label, write_analysis_csv
from rappor.fleet import read_csv
from rappor.management.base import EncodingOptionsMixin, PipelineCommand, usage_error


class Command(EncodingOptionsMixin, PipelineCommand):
    help = 'Match a batch of reports against a central store and report the major true value.'

    def add_arguments(self, parser):
        parser.add_argument('--batch', required=True, help='report CSV to analyze')
        parser.add_argument('--store', required=True, help='central store file')
        parser.add_argument('--out', help='optional CSV for the analysis report')
        parser.add_argument('--strip-labels', action='store_true',
                            help='drop true values before analysis')
        self.add_encoding_arguments(parser)

    def run(self, **options):
        params = self.get_params(options)
        table = build_constant_table(params.k)
        reports = read_csv(options['batch'], params)
        if not reports:
            raise usage_error(f'{options["batch"]} holds no reports')
        if options['strip_labels']:
            reports = [report.without_label() for report in reports]
        store = load_store(options['store'], params)

        result = analyze_batch([report.without_label() for report in reports], store, table)
        self.stdout.write(f'sample size      {result.sample_size}')
        self.stdout.write(f'matched          {result.matched}')
        for label, count in result.credits.items():
            self.stdout.write(f'  {label:<14} {count}')
        self.stdout.write(f'major true value {result.major_value or "(none)"}')
        self.stdout.write(f'achievement      {result.achievement_pct:.2f}%')

        labels = [report.true_value for report in reports if report.is_labeled]
        if labels:
            truth = majority_label(Counter(labels))
            verdict = 'detected' if result.major_value == truth != NO_MAJOR else 'missed'
            self.stdout.write(f'ground truth     {truth} ({verdict})')
        if options['out']:
            write_analysis_csv(result, options['out'])

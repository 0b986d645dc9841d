from aggregator.constants import build_constant_table
from aggregator.store import CentralStore
from rappor.fleet import read_csv
from rappor.management.base import EncodingOptionsMixin, PipelineCommand, failure


class Command(EncodingOptionsMixin, PipelineCommand):
    help = 'Reduce a labeled report corpus to a central store file.'

    def add_arguments(self, parser):
        parser.add_argument('--corpus', required=True, help='labeled report CSV')
        parser.add_argument('--out', required=True, help='destination store file')
        self.add_encoding_arguments(parser)

    def run(self, **options):
        params = self.get_params(options)
        table = build_constant_table(params.k)
        reports = read_csv(options['corpus'], params)
        for line, report in enumerate(reports, start=2):
            if not report.is_labeled:
                raise failure(f'{options["corpus"]}:{line}: report from '
                              f'{report.client_id} has no true_value')
        store = CentralStore.for_params(params).ingest_all(reports, table)
        store.save(options['out'])
        self.stdout.write(f'Stored {len(store.entries)} weighted sums from '
                          f'{store.total_training_reports} reports in {options["out"]}')

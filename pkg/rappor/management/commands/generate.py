from rappor.conf import ara_settings
from rappor.fleet import generate_corpus, write_csv
from rappor.management.base import FleetOptionsMixin, PipelineCommand, usage_error


class Command(FleetOptionsMixin, PipelineCommand):
    help = 'Simulate a client fleet and write its RAPPOR reports as CSV.'

    def add_arguments(self, parser):
        parser.add_argument('--n', type=int, default=ara_settings('N_CLIENTS'),
                            help='number of clients (one report each)')
        parser.add_argument('--out', required=True, help='destination CSV')
        parser.add_argument('--unlabeled', action='store_true',
                            help='omit the true_value column (test batch)')
        self.add_fleet_arguments(parser)

    def run(self, **options):
        if options['n'] < 1:
            raise usage_error(f'--n must be at least 1, got {options["n"]}')
        config = self.get_fleet(options, options['n'], labeled=not options['unlabeled'])
        reports = generate_corpus(config)
        write_csv(reports, options['out'])
        self.stdout.write(f'Wrote {len(reports)} reports to {options["out"]}')

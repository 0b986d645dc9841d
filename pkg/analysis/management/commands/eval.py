from rappor.conf import ara_settings
from rappor.management.base import FleetOptionsMixin, PipelineCommand, failure, int_list, usage_error
from analysis.experiments import (
    build_store,
    derive_seed,
    run_experiment,
    run_size_sweep,
    write_results_csv,
)
from analysis.models import ExperimentRun


class Command(FleetOptionsMixin, PipelineCommand):
    help = ('Train a store on a simulated fleet, then run repeated major-value '
            'detection tests and write a results table.')

    def add_arguments(self, parser):
        parser.add_argument('--tests', type=int, default=ara_settings('N_TESTS'),
                            help='number of test batches (per size with --sizes)')
        parser.add_argument('--batch', type=int, default=ara_settings('BATCH_SIZE'),
                            help='reports per test batch')
        parser.add_argument('--sizes', type=int_list,
                            help='comma-separated batch sizes; runs a size sweep instead')
        parser.add_argument('--sweep', action='store_true',
                            help='size sweep over the configured SWEEP_SIZES')
        parser.add_argument('--train-n', type=int, default=ara_settings('N_CLIENTS'),
                            help='clients in the training fleet')
        parser.add_argument('--test-n', type=int, default=ara_settings('N_CLIENTS'),
                            help='clients in the test fleet batches are drawn from')
        parser.add_argument('--out', required=True, help='results CSV')
        parser.add_argument('--record', action='store_true',
                            help='also save the run to the database')
        self.add_fleet_arguments(parser)

    def run(self, **options):
        if options['tests'] < 0:
            raise usage_error(f'--tests must be nonnegative, got {options["tests"]}')
        if options['train_n'] < 1:
            raise usage_error(f'--train-n must be at least 1, got {options["train_n"]}')
        train = self.get_fleet(options, options['train_n'])
        test = self.get_fleet(options, options['test_n'], seed=derive_seed(options['seed'], 0))
        store = build_store(train)
        self.stdout.write(f'Trained on {store.total_training_reports} reports '
                          f'({len(store.entries)} weighted sums)')

        sizes = options['sizes'] or (list(ara_settings('SWEEP_SIZES')) if options['sweep'] else None)
        rho = None
        if sizes:
            sweep = run_size_sweep(train, test, sizes, options['tests'], store=store)
            rows, rho, batch_size = sweep.rows, sweep.rank_correlation, max(sizes)
        else:
            batch_size = options['batch']
            rows = run_experiment(train, test, options['tests'], batch_size, store=store)

        write_results_csv(rows, options['out'])
        if options['record']:
            run = ExperimentRun.record(rows, train, test, batch_size, rank_correlation=rho)
            self.stdout.write(f'Recorded run {run.id}')

        detected = sum(row.detected_correctly for row in rows)
        mean = sum(row.achievement_pct for row in rows) / len(rows) if rows else 0.0
        self.stdout.write(f'{detected}/{len(rows)} tests detected the major true value; '
                          f'mean achievement {mean:.2f}%')
        if rho is not None:
            self.stdout.write(f'rank correlation of batch size and achievement: {rho:.3f}')
        if detected < len(rows):
            raise failure(f'{len(rows) - detected} of {len(rows)} tests missed the major true value')

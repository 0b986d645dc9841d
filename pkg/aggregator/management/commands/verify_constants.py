from aggregator.constants import (
    PUBLISHED_CONSTANTS,
    build_constant_table,
    published_deviation,
    verify_constant_rule,
)
from rappor.conf import ara_settings
from rappor.fleet import read_csv
from rappor.management.base import (
    EncodingOptionsMixin,
    PipelineCommand,
    failure,
    int_list,
    usage_error,
)

# The rule is definitional; anything above rounding noise is a failure.
MAX_DEVIATION = 1e-12


class Command(EncodingOptionsMixin, PipelineCommand):
    help = 'Print the constant table and audit the constant / sample-size rule on a corpus.'

    def add_arguments(self, parser):
        parser.add_argument('--corpus', required=True, help='report CSV to subsample')
        parser.add_argument('--sizes', type=int_list, default=list(ara_settings('SAMPLE_SIZES')),
                            help='comma-separated sample sizes')
        parser.add_argument('--seed', type=int, default=ara_settings('SEED'))
        self.add_encoding_arguments(parser)

    def run(self, **options):
        params = self.get_params(options)
        table = build_constant_table(params.k)
        reports = read_csv(options['corpus'], params)
        if not reports:
            raise usage_error(f'{options["corpus"]} holds no reports')
        too_large = [size for size in options['sizes'] if size > len(reports)]
        if too_large:
            raise usage_error(f'sample sizes {too_large} exceed the corpus size {len(reports)}')

        self.stdout.write('count  constant      published     |delta|')
        for count in range(1, params.k + 1):
            published = PUBLISHED_CONSTANTS.get(count) if params.k == 32 else None
            if published is None:
                self.stdout.write(f'{count:>5}  {table.weights[count]:.8f}')
            else:
                delta = abs(table.weights[count] - published)
                self.stdout.write(f'{count:>5}  {table.weights[count]:.8f}  {published:<12}  {delta:.2e}')
        if params.k == 32:
            self.stdout.write(f'max |delta| against the published table: {published_deviation(table):.2e}')

        checks = verify_constant_rule(reports, options['sizes'], table, seed=options['seed'])
        self.stdout.write('')
        self.stdout.write('count  sizes                         max relative deviation')
        for check in checks:
            sizes = ','.join(str(size) for size in check.sample_sizes)
            self.stdout.write(f'{check.count:>5}  {sizes:<28}  {check.max_relative_deviation:.3e}')
        worst = max((check.max_relative_deviation for check in checks), default=0.0)
        if worst >= MAX_DEVIATION:
            raise failure(f'constant rule violated: deviation {worst:.3e}')
        self.stdout.write(self.style.SUCCESS(f'Constant rule holds (max deviation {worst:.3e})'))

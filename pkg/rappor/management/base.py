import argparse

from django.core.management.base import BaseCommand, CommandError

from rappor.conf import ara_settings
from rappor.encoding import EncodingParams
from rappor.exceptions import DomainError, ReportParseError
from rappor.fleet import FleetConfig

# Exit codes shared by all pipeline commands.
EXIT_FAILURE = 1
EXIT_USAGE = 2


def usage_error(message):
    return CommandError(message, returncode=EXIT_USAGE)


def failure(message):
    return CommandError(message, returncode=EXIT_FAILURE)


def int_list(text):
    """argparse type for '100,1000,10000'."""
    try:
        values = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma-separated integers, got {text!r}')
    if not values:
        raise argparse.ArgumentTypeError('expected at least one integer')
    return values


def label_list(text):
    return [part.strip() for part in text.split(',') if part.strip()]


class EncodingOptionsMixin:
    """Adds the RAPPOR knobs as flags and validates them into EncodingParams."""

    def add_encoding_arguments(self, parser):
        defaults = EncodingParams()
        group = parser.add_argument_group('encoding parameters')
        group.add_argument('--k', type=int, default=defaults.k, help='bits per report')
        group.add_argument('--h', type=int, default=defaults.h, help='Bloom hashes')
        group.add_argument('--m', type=int, default=defaults.m, help='cohorts')
        group.add_argument('--f', type=float, default=defaults.f, help='permanent noise probability')
        group.add_argument('--p', type=float, default=defaults.p, help='P(report 1 | PRR bit 0)')
        group.add_argument('--q', type=float, default=defaults.q, help='P(report 1 | PRR bit 1)')

    def get_params(self, options):
        try:
            return EncodingParams(
                k=options['k'], h=options['h'], m=options['m'],
                f=options['f'], p=options['p'], q=options['q'],
            )
        except DomainError as exc:
            raise usage_error(str(exc)) from exc


class FleetOptionsMixin(EncodingOptionsMixin):
    """Flags that describe a simulated fleet."""

    def add_fleet_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=ara_settings('SEED'))
        parser.add_argument('--lambda', dest='rate', type=float, default=ara_settings('LAMBDA'),
                            help='rate of the exponential value distribution')
        parser.add_argument('--values', type=label_list, default=list(ara_settings('VALUES')),
                            help='comma-separated true values, most frequent first')
        parser.add_argument('--prefix', default=ara_settings('CLIENT_PREFIX'),
                            help='client id prefix')
        self.add_encoding_arguments(parser)

    def get_fleet(self, options, n_clients, seed=None, labeled=True):
        params = self.get_params(options)
        try:
            return FleetConfig(
                n_clients=n_clients,
                values=options['values'],
                seed=options['seed'] if seed is None else seed,
                params=params,
                rate=options['rate'],
                client_prefix=options['prefix'],
                secret=ara_settings('CLIENT_SECRET').encode('utf-8'),
                labeled=labeled,
            )
        except DomainError as exc:
            raise usage_error(str(exc)) from exc


class PipelineCommand(BaseCommand):
    """Base for pipeline commands.

    Subclasses implement ``run``. Unreadable input files end the command with
    exit code 1, any other violated precondition with exit code 2.
    """

    def run(self, **options):
        raise NotImplementedError('Subclasses must implement run.')

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except ReportParseError as exc:
            raise failure(str(exc)) from exc
        except DomainError as exc:
            raise usage_error(str(exc)) from exc
        except OSError as exc:
            raise failure(str(exc)) from exc

import io
import math
from collections import Counter
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from rappor.conf import DEFAULTS, ara_settings
from rappor.encoding import (
    Bitset,
    ClientReport,
    EncodingParams,
    assign_cohort,
    bloom_encode,
    encode_report,
    instantaneous_rr,
    permanent_rr,
)
from rappor.exceptions import DomainError, ReportParseError
from rappor.fleet import (
    FleetConfig,
    exponential_distribution,
    generate_corpus,
    read_csv,
    write_csv,
)

# Bit-level draws per channel measurement: 3125 reports x 32 bits.
DRAWS = 100_000
REPORTS_PER_MEASUREMENT = DRAWS // 32


class EncodingParamsTests(SimpleTestCase):
    def test_defaults(self):
        params = EncodingParams()
        self.assertEqual((params.k, params.h, params.m), (32, 2, 64))
        self.assertEqual((params.f, params.p, params.q), (0.5, 0.5, 0.75))

    def test_invalid_values(self):
        for kwargs in ({'h': 0}, {'h': 33}, {'m': 0}, {'f': 1.5}, {'p': -0.1}, {'q': 2}, {'k': 0}):
            with self.subTest(**kwargs), self.assertRaises(DomainError):
                EncodingParams(**kwargs)

    def test_fingerprint(self):
        self.assertEqual(EncodingParams().fingerprint(), EncodingParams().fingerprint())
        self.assertEqual(len(EncodingParams().fingerprint()), 16)
        self.assertNotEqual(EncodingParams().fingerprint(), EncodingParams(f=0.25).fingerprint())

    def test_integer_probabilities_fingerprint_like_floats(self):
        self.assertEqual(EncodingParams(f=0).fingerprint(), EncodingParams(f=0.0).fingerprint())
        self.assertEqual(EncodingParams(f=0, p=0, q=1).fingerprint(),
                         EncodingParams(f=0.0, p=0.0, q=1.0).fingerprint())
        self.assertIsInstance(EncodingParams(q=1).q, float)


class BitsetTests(SimpleTestCase):
    def test_string_is_most_significant_index_first(self):
        self.assertEqual(str(Bitset.from_indices(4, [0])), '0001')
        self.assertEqual(str(Bitset.from_indices(4, [3])), '1000')
        self.assertEqual(Bitset.from_string('0110').indices(), [1, 2])

    def test_array_round_trip(self):
        bits = Bitset.from_indices(32, [0, 5, 31])
        self.assertEqual(Bitset.from_array(bits.to_array()), bits)
        self.assertEqual(bits.popcount(), 3)

    def test_rejects_out_of_range(self):
        with self.assertRaises(DomainError):
            Bitset.from_indices(8, [8])
        with self.assertRaises(DomainError):
            Bitset.from_string('01x1')


class BloomEncodeTests(SimpleTestCase):
    def setUp(self):
        self.params = EncodingParams()

    def test_golden_indices(self):
        # SHA-256(00 00 'v1') = bd a5 ...; 0xbd % 32 = 29, 0xa5 % 32 = 5
        self.assertEqual(bloom_encode('v1', 0, self.params).indices(), [5, 29])
        # SHA-256(00 05 'v3') = b4 53 ...
        self.assertEqual(bloom_encode('v3', 5, self.params).indices(), [19, 20])

    def test_index_collision_sets_one_bit(self):
        # SHA-256(00 01 'v1') = 76 16 ...; both bytes are 22 mod 32
        bloom = bloom_encode('v1', 1, self.params)
        self.assertEqual(bloom.indices(), [22])

    def test_deterministic(self):
        for cohort in range(self.params.m):
            first = bloom_encode('v7', cohort, self.params)
            self.assertEqual(first, bloom_encode('v7', cohort, self.params))
            self.assertTrue(1 <= first.popcount() <= self.params.h)
            self.assertEqual(first.width, self.params.k)

    def test_cohort_out_of_range(self):
        with self.assertRaises(DomainError):
            bloom_encode('v1', 64, self.params)
        with self.assertRaises(DomainError):
            bloom_encode('v1', -1, self.params)


def one_rates(outputs, inputs):
    """P(out = 1 | in = 1) and P(out = 1 | in = 0) over stacked bit arrays."""
    outputs, inputs = np.concatenate(outputs), np.concatenate(inputs)
    return outputs[inputs].mean(), outputs[~inputs].mean()


class PermanentRRTests(SimpleTestCase):
    def test_zero_noise_is_identity(self):
        params = EncodingParams(f=0.0)
        bloom = Bitset.from_indices(32, [3, 17])
        self.assertEqual(permanent_rr(bloom, params, ('c', 'v1')), bloom)

    def test_memoized_per_client_and_value(self):
        params = EncodingParams()
        bloom = bloom_encode('v2', 3, params)
        first = permanent_rr(bloom, params, ('client-1', 'v2'))
        for _ in range(5):
            self.assertEqual(permanent_rr(bloom, params, ('client-1', 'v2')), first)

    def test_full_noise_is_a_fair_coin(self):
        params = EncodingParams(f=1.0)
        ones, zeros = Bitset(32, (1 << 32) - 1), Bitset(32, 0)
        bits = [
            permanent_rr(ones if i % 2 else zeros, params, (f'client-{i}', 'v1')).to_array()
            for i in range(REPORTS_PER_MEASUREMENT)
        ]
        mean = np.concatenate(bits).mean()
        self.assertTrue(0.49 <= mean <= 0.51, mean)

    def test_channel_rates(self):
        params = EncodingParams()
        ones, zeros = Bitset(32, (1 << 32) - 1), Bitset(32, 0)
        outputs, inputs = [], []
        for i in range(REPORTS_PER_MEASUREMENT):
            for bloom in (ones, zeros):
                outputs.append(permanent_rr(bloom, params, (f'client-{i}', 'v1')).to_array())
                inputs.append(bloom.to_array())
        given_one, given_zero = one_rates(outputs, inputs)
        self.assertTrue(0.74 <= given_one <= 0.76, given_one)
        self.assertTrue(0.24 <= given_zero <= 0.26, given_zero)


class InstantaneousRRTests(SimpleTestCase):
    def test_noiseless_channel(self):
        params = EncodingParams(p=0.0, q=1.0)
        prr = Bitset.from_indices(32, [0, 9, 30])
        self.assertEqual(instantaneous_rr(prr, params, np.random.default_rng(1)), prr)

    def test_degenerate_channel_sets_everything(self):
        params = EncodingParams(p=1.0, q=1.0)
        irr = instantaneous_rr(Bitset(32, 0), params, np.random.default_rng(1))
        self.assertEqual(irr.popcount(), 32)

    def test_channel_rates(self):
        params = EncodingParams()
        rng = np.random.default_rng(2024)
        ones, zeros = Bitset(32, (1 << 32) - 1), Bitset(32, 0)
        outputs, inputs = [], []
        for _ in range(REPORTS_PER_MEASUREMENT):
            for prr in (ones, zeros):
                outputs.append(instantaneous_rr(prr, params, rng).to_array())
                inputs.append(prr.to_array())
        given_one, given_zero = one_rates(outputs, inputs)
        self.assertTrue(0.74 <= given_one <= 0.76, given_one)
        self.assertTrue(0.49 <= given_zero <= 0.51, given_zero)

    def test_fresh_noise_each_call(self):
        params = EncodingParams()
        rng = np.random.default_rng(5)
        prr = Bitset.from_indices(32, [1, 2])
        irrs = {instantaneous_rr(prr, params, rng) for _ in range(20)}
        self.assertGreater(len(irrs), 1)


class EncodeReportTests(SimpleTestCase):
    def setUp(self):
        self.params = EncodingParams()

    def test_same_client_same_value(self):
        rng = np.random.default_rng(3)
        first = encode_report('client-7', 'v1', self.params, rng=rng)
        second = encode_report('client-7', 'v1', self.params, rng=rng)
        self.assertEqual(first.cohort, second.cohort)
        self.assertEqual(first.prr, second.prr)
        self.assertEqual(first.true_value, 'v1')

    def test_cohorts_in_range_and_stable(self):
        for i in range(500):
            cohort = assign_cohort(f'client-{i}', self.params)
            self.assertTrue(0 <= cohort < 64)
            self.assertEqual(cohort, assign_cohort(f'client-{i}', self.params))

    def test_cohorts_spread_over_clients(self):
        cohorts = {assign_cohort(f'client-{i}', self.params) for i in range(500)}
        self.assertGreater(len(cohorts), 32)

    def test_unlabeled_and_explicit_cohort(self):
        report = encode_report('c', 'v2', self.params, cohort=9, labeled=False)
        self.assertEqual(report.cohort, 9)
        self.assertIsNone(report.true_value)
        self.assertEqual((report.prr.width, report.irr.width), (32, 32))


class ExponentialDistributionTests(SimpleTestCase):
    def test_single_value(self):
        self.assertEqual(exponential_distribution(1, 3.0), [1.0])

    def test_two_values_halving(self):
        first, second = exponential_distribution(2, math.log(2))
        self.assertAlmostEqual(first, 2 / 3, places=12)
        self.assertAlmostEqual(second, 1 / 3, places=12)

    def test_ten_values(self):
        probabilities = exponential_distribution(10, 0.5)
        self.assertAlmostEqual(math.fsum(probabilities), 1.0, places=12)
        self.assertTrue(all(a > b for a, b in zip(probabilities, probabilities[1:])))

    def test_rate_must_be_positive(self):
        for rate in (0, -1):
            with self.assertRaises(DomainError):
                exponential_distribution(3, rate)


class FleetConfigTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(DomainError):
            FleetConfig(n_clients=10, values=('v1', 'v1'))
        with self.assertRaises(DomainError):
            FleetConfig(n_clients=10, values=())
        with self.assertRaises(DomainError):
            FleetConfig(n_clients=10, values=('a', 'b'), distribution=(0.5, 0.6))
        with self.assertRaises(DomainError):
            FleetConfig(n_clients=10, values=('a,b',))
        with self.assertRaises(DomainError):
            FleetConfig(n_clients=10, seed=-1)


class GenerateCorpusTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.config = FleetConfig(n_clients=25000, seed=11)
        cls.corpus = generate_corpus(cls.config)

    def test_label_frequencies_follow_distribution(self):
        counts = Counter(report.true_value for report in self.corpus)
        for value, probability in zip(self.config.values, self.config.distribution):
            self.assertLess(abs(counts[value] / len(self.corpus) - probability), 0.02, value)
        self.assertGreater(counts['v1'], counts['v10'])

    def test_reports_are_well_formed(self):
        self.assertEqual(len(self.corpus), 25000)
        for report in self.corpus[:1000]:
            self.assertTrue(0 <= report.cohort < 64)
            self.assertEqual(report.prr.width, 32)
            self.assertIn(report.true_value, self.config.values)

    def test_deterministic(self):
        config = FleetConfig(n_clients=200, seed=11)
        self.assertEqual(generate_corpus(config), generate_corpus(config))
        self.assertEqual(generate_corpus(config), self.corpus[:200])

    def test_slices_concatenate(self):
        config = FleetConfig(n_clients=120, seed=3)
        whole = generate_corpus(config)
        parts = generate_corpus(config, range(0, 50)) + generate_corpus(config, range(50, 120))
        self.assertEqual(parts, whole)

    def test_single_value(self):
        corpus = generate_corpus(FleetConfig(n_clients=100, values=('v1',)))
        self.assertEqual({report.true_value for report in corpus}, {'v1'})

    def test_unlabeled_fleet(self):
        corpus = generate_corpus(FleetConfig(n_clients=10, labeled=False))
        self.assertTrue(all(report.true_value is None for report in corpus))


class ReportCsvTests(SimpleTestCase):
    header = 'client,cohort,prr,irr,true_value\n'

    def row(self, prr='0' * 32, irr='1' * 32, cohort='3', label='v1'):
        return f'c-1,{cohort},{prr},{irr},{label}\n'

    def test_round_trip(self):
        corpus = generate_corpus(FleetConfig(n_clients=300, seed=5))
        buffer = io.StringIO()
        write_csv(corpus, buffer)
        buffer.seek(0)
        self.assertEqual(read_csv(buffer), corpus)

    def test_round_trip_randomized(self):
        rng = np.random.default_rng(99)
        for case in range(1000):
            reports = [
                ClientReport(
                    client_id=f'client-{case}-{i}',
                    cohort=int(rng.integers(64)),
                    prr=Bitset(32, int(rng.integers(1 << 32))),
                    irr=Bitset(32, int(rng.integers(1 << 32))),
                    true_value=f'v{int(rng.integers(1, 11))}' if case % 3 else None,
                )
                for i in range(int(rng.integers(0, 4)))
            ]
            buffer = io.StringIO()
            write_csv(reports, buffer)
            buffer.seek(0)
            self.assertEqual(read_csv(buffer), reports)

    def test_unlabeled_file(self):
        text = 'client,cohort,prr,irr\nc-1,3,' + '0' * 32 + ',' + '1' * 32 + '\n'
        (report,) = read_csv(io.StringIO(text))
        self.assertIsNone(report.true_value)
        self.assertEqual(report.irr.popcount(), 32)

    def test_unlabeled_reports_omit_column(self):
        buffer = io.StringIO()
        write_csv(generate_corpus(FleetConfig(n_clients=3, labeled=False)), buffer)
        self.assertTrue(buffer.getvalue().startswith('client,cohort,prr,irr\n'))

    def test_short_bitstring_names_line(self):
        text = self.header + self.row() + self.row(prr='0' * 31)
        with self.assertRaises(ReportParseError) as cm:
            read_csv(io.StringIO(text))
        self.assertEqual(cm.exception.line, 3)
        self.assertIn('3', str(cm.exception))

    def test_parse_errors(self):
        cases = {
            'columns': self.header + 'c-1,3,' + '0' * 32 + '\n',
            'binary': self.header + self.row(irr='2' * 32),
            'cohort': self.header + self.row(cohort='64'),
            'integer': self.header + self.row(cohort='x'),
            'header': 'client,cohort,bits\n',
        }
        for name, text in cases.items():
            with self.subTest(name), self.assertRaises(ReportParseError):
                read_csv(io.StringIO(text))


class GenerateCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def generate(self, name, *args):
        call_command('generate', '--out', str(self.dir / name), *args, stdout=io.StringIO())
        return self.dir / name

    def test_writes_labeled_corpus(self):
        reports = read_csv(self.generate('train.csv', '--n', '300'))
        self.assertEqual(len(reports), 300)
        self.assertTrue(all(report.is_labeled for report in reports))
        self.assertEqual(reports[0].client_id, 'client-000000')

    def test_unlabeled_corpus(self):
        path = self.generate('test.csv', '--n', '20', '--unlabeled', '--seed', '3')
        self.assertTrue(path.read_text().startswith('client,cohort,prr,irr\n'))
        self.assertFalse(any(report.is_labeled for report in read_csv(path)))

    def test_reruns_are_byte_identical(self):
        first = self.generate('a.csv', '--n', '200', '--seed', '5')
        second = self.generate('b.csv', '--n', '200', '--seed', '5')
        other = self.generate('c.csv', '--n', '200', '--seed', '6')
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertNotEqual(first.read_bytes(), other.read_bytes())

    def test_encoding_flags(self):
        reports = read_csv(self.generate('k64.csv', '--n', '10', '--k', '64', '--m', '8'),
                           EncodingParams(k=64, m=8))
        self.assertTrue(all(report.prr.width == 64 and report.cohort < 8 for report in reports))

    def test_usage_errors(self):
        for args in (['--n', '0'], ['--n', '10', '--f', '1.5'], ['--n', '10', '--values', 'a:b']):
            with self.subTest(args), self.assertRaises(CommandError) as cm:
                self.generate('bad.csv', *args)
            self.assertEqual(cm.exception.returncode, 2)


class AraSettingsTests(SimpleTestCase):
    def test_defaults_apply_without_overrides(self):
        with override_settings(ARA={}):
            self.assertEqual(ara_settings('SEED'), DEFAULTS['SEED'])
            self.assertEqual(ara_settings('SWEEP_SIZES'), [300, 400, 500, 600])

    @override_settings(ARA={'SEED': 3})
    def test_override_wins_and_other_keys_fall_back(self):
        self.assertEqual(ara_settings('SEED'), 3)
        self.assertEqual(ara_settings('N_TESTS'), 40)

    def test_unknown_name(self):
        with self.assertRaises(KeyError):
            ara_settings('NOT_A_SETTING')

import io
import math
import random
import re
from decimal import Decimal
from pathlib import Path
from tempfile import TemporaryDirectory

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from aggregator.constants import (
    PUBLISHED_CONSTANTS,
    RRSurvey,
    build_constant_table,
    constant_for_count,
    estimate_true_proportion,
    idf,
    tf,
    tfidf,
    tfidf_contribution,
    verify_constant_rule,
)
from aggregator.store import CentralStore, StoreEntry, StoreFormatError, load_store
from aggregator.weighting import quantize, weighted_sum, weighted_sum_of_report
from rappor.encoding import Bitset, ClientReport, EncodingParams
from rappor.exceptions import DomainError
from rappor.fleet import FleetConfig, generate_corpus, write_csv

TABLE = build_constant_table(32)


def report_with_counts(n_prr, n_irr, cohort, label='v1', client_id='c'):
    return ClientReport(
        client_id=client_id,
        cohort=cohort,
        prr=Bitset.from_indices(32, range(n_prr)),
        irr=Bitset.from_indices(32, range(32 - n_irr, 32)),
        true_value=label,
    )


class ConstantTableTests(SimpleTestCase):
    def test_reproduces_published_values(self):
        for count, published in PUBLISHED_CONSTANTS.items():
            self.assertLess(abs(TABLE.weights[count] - published), 1e-4, count)

    def test_closed_form(self):
        for count in range(4, 18):
            self.assertAlmostEqual(TABLE.weights[count], math.log10(32 / count), delta=1e-5)
        for count in (1, 2, 3):
            self.assertAlmostEqual(TABLE.weights[count] / TABLE.weights[count + 1], 1.1, delta=1e-4)

    def test_chain_stops_at_four(self):
        for count in range(4, 18):
            self.assertNotAlmostEqual(TABLE.weights[count] / TABLE.weights[count + 1], 1.1, delta=1e-4)

    def test_strictly_decreasing(self):
        self.assertEqual(TABLE.weights[0], 0)
        for count in range(1, 32):
            self.assertGreater(TABLE.weights[count], TABLE.weights[count + 1])

    def test_examples(self):
        self.assertAlmostEqual(constant_for_count(TABLE, 8), 0.60206, places=5)
        self.assertAlmostEqual(constant_for_count(TABLE, 17), 0.274701, places=5)
        self.assertAlmostEqual(constant_for_count(TABLE, 1), 1.20201279, places=6)
        self.assertAlmostEqual(constant_for_count(TABLE, 4), 0.90309, places=5)
        self.assertAlmostEqual(constant_for_count(TABLE, 16), 0.30103, places=5)
        self.assertAlmostEqual(constant_for_count(TABLE, 20), 0.20412, places=5)
        self.assertEqual(constant_for_count(TABLE, 0), 0)

    def test_errors(self):
        with self.assertRaises(DomainError):
            build_constant_table(3)
        with self.assertRaises(DomainError):
            constant_for_count(TABLE, 33)


class TfIdfTests(SimpleTestCase):
    def test_contribution(self):
        self.assertAlmostEqual(tfidf_contribution(TABLE, 8, 1000), 0.00060206, places=9)
        self.assertEqual(tfidf_contribution(TABLE, 0, 100), 0)
        self.assertEqual(tfidf_contribution(TABLE, 8, 1), TABLE.weights[8])
        with self.assertRaises(DomainError):
            tfidf_contribution(TABLE, 8, 0)

    def test_constant_rule(self):
        for count in range(33):
            for size in (1, 7, 100, 1000, 25000):
                scaled = tfidf_contribution(TABLE, count, size) * size
                self.assertLessEqual(abs(scaled - TABLE.weights[count]), 1e-12 * max(TABLE.weights[count], 1))

    def test_tf(self):
        self.assertEqual(tf(3, 12), 0.25)
        self.assertEqual(tf(0, 10), 0)
        self.assertEqual(tf(10, 10), 1)
        with self.assertRaises(DomainError):
            tf(1, 0)

    def test_idf(self):
        self.assertAlmostEqual(idf(10, 0), 1.0, places=12)
        self.assertAlmostEqual(idf(10, 9), 0.0, places=12)
        self.assertAlmostEqual(idf(100, 4), 1.30103, places=5)

    def test_tfidf_composes_tf_and_idf(self):
        self.assertAlmostEqual(tfidf(3, 12, 10, 0), 0.25, places=12)
        self.assertAlmostEqual(tfidf(3, 12, 100, 4), tf(3, 12) * idf(100, 4), places=12)
        self.assertEqual(tfidf(0, 12, 10, 0), 0)
        with self.assertRaises(DomainError):
            tfidf(1, 0, 10, 0)


class RandomizedResponseTests(SimpleTestCase):
    def test_worked_example(self):
        estimate = estimate_true_proportion(RRSurvey(0.55, 1 / 6))
        self.assertAlmostEqual(estimate.value, 0.425, places=12)
        self.assertFalse(estimate.out_of_range)

    def test_no_true_yes(self):
        for p in (0.1, 0.3, 0.8):
            self.assertAlmostEqual(estimate_true_proportion(RRSurvey(1 - p, p)).value, 0.0, places=12)

    def test_all_true_yes(self):
        self.assertAlmostEqual(estimate_true_proportion(RRSurvey(0.25, 0.25)).value, 1.0, places=12)

    def test_clamped(self):
        estimate = estimate_true_proportion(RRSurvey(1.0, 0.75))
        self.assertEqual(estimate.value, 1.0)
        self.assertTrue(estimate.out_of_range)

    def test_half_is_rejected(self):
        with self.assertRaises(DomainError):
            RRSurvey(0.5, 0.5)


class VerifyConstantRuleTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.corpus = generate_corpus(FleetConfig(n_clients=25000, seed=2))

    def test_default_sizes(self):
        checks = verify_constant_rule(self.corpus, [100, 1000, 10000, 20000, 25000], TABLE)
        self.assertTrue(checks)
        for check in checks:
            self.assertLess(check.max_relative_deviation, 1e-12, check)

    def test_single_report(self):
        report = report_with_counts(5, 5, 3)
        (check,) = verify_constant_rule([report], [1], TABLE)
        self.assertEqual(check.count, 5)
        self.assertEqual(check.sample_sizes, (1,))
        self.assertEqual(check.max_relative_deviation, 0)
        self.assertAlmostEqual(TABLE.weights[5], 0.80618, places=5)

    def test_no_sizes(self):
        self.assertEqual(verify_constant_rule(self.corpus[:10], [], TABLE), [])

    def test_errors(self):
        with self.assertRaises(DomainError):
            verify_constant_rule([], [1], TABLE)
        with self.assertRaises(DomainError):
            verify_constant_rule(self.corpus[:10], [11], TABLE)


def brute_force_key(n_prr, n_irr, cohort):
    """Independent evaluation: the table written out from its defining formulas."""
    def constant(count):
        if count == 0:
            return 0.0
        if count >= 4:
            return math.log10(32 / count)
        return 1.1 * constant(count + 1)

    bracket = n_prr * constant(n_prr) + n_irr * constant(n_irr)
    value = bracket * (cohort if cohort else 1)
    return Decimal(repr(value)).quantize(Decimal('0.00001'), rounding='ROUND_HALF_UP')


class WeightedSumTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(weighted_sum(8, 4, 3, TABLE).key, '25.28652')
        self.assertEqual(weighted_sum(8, 4, 0, TABLE).key, '8.42884')
        self.assertEqual(weighted_sum(0, 0, 17, TABLE).key, '0.00000')
        self.assertEqual(weighted_sum(0, 0, 17, TABLE).value, 0)
        self.assertAlmostEqual(weighted_sum(1, 1, 1, TABLE).value, 2.40402558, places=6)

    def test_report(self):
        report = report_with_counts(8, 4, 3)
        self.assertEqual(weighted_sum_of_report(report, TABLE).key, '25.28652')
        swapped = ClientReport('c', 3, report.irr, report.prr, 'v1')
        self.assertEqual(weighted_sum_of_report(swapped, TABLE), weighted_sum_of_report(report, TABLE))
        self.assertEqual(weighted_sum_of_report(report_with_counts(0, 0, 40), TABLE).key, '0.00000')

    def test_counts_out_of_range(self):
        with self.assertRaises(DomainError):
            weighted_sum(33, 0, 1, TABLE)
        with self.assertRaises(DomainError):
            weighted_sum(0, -1, 1, TABLE)

    def test_quantize_is_half_up_and_idempotent(self):
        self.assertEqual(quantize(0.000005), '0.00001')
        self.assertEqual(quantize(2.5), '2.50000')
        self.assertEqual(quantize(0.0), '0.00000')
        for value in (25.286519640, 1.234565, 1e-7):
            self.assertEqual(quantize(float(quantize(value))), quantize(value))

    def test_exhaustive_against_brute_force(self):
        keys = {}
        for n_prr in range(33):
            for n_irr in range(33):
                for cohort in range(64):
                    result = weighted_sum(n_prr, n_irr, cohort, TABLE)
                    self.assertEqual(Decimal(result.key), brute_force_key(n_prr, n_irr, cohort))
                    self.assertLessEqual(abs(Decimal(result.key) - Decimal(repr(result.value))),
                                         Decimal('0.000005'))
                    self.assertEqual(result, weighted_sum(n_irr, n_prr, cohort, TABLE))
                    if cohort >= 1:
                        self.assertEqual(result.value, cohort * weighted_sum(n_prr, n_irr, 1, TABLE).value)
                    keys[(n_prr, n_irr, cohort)] = result
                self.assertEqual(keys[(n_prr, n_irr, 0)], keys[(n_prr, n_irr, 1)])
        # Distinct outcomes more than 1e-4 apart never share a key.
        by_value = sorted(keys.values(), key=lambda result: result.value)
        for low, high in zip(by_value, by_value[1:]):
            if high.value - low.value > 1e-4:
                self.assertNotEqual(low.key, high.key)


class CentralStoreTests(SimpleTestCase):
    def setUp(self):
        self.params = EncodingParams()
        self.store = CentralStore.for_params(self.params)

    def test_identical_reports_share_an_entry(self):
        self.store.ingest(report_with_counts(8, 4, 3), TABLE)
        self.store.ingest(report_with_counts(8, 4, 3), TABLE)
        self.assertEqual(list(self.store.entries), ['25.28652'])
        self.assertEqual(self.store.lookup('25.28652').counts, {'v1': 2})
        self.assertEqual(self.store.total_training_reports, 2)

    def test_labels_collide_on_equal_weight(self):
        self.store.ingest(report_with_counts(8, 4, 3, 'v1'), TABLE)
        self.store.ingest(report_with_counts(4, 8, 3, 'v2'), TABLE)
        self.assertEqual(self.store.lookup('25.28652').counts, {'v1': 1, 'v2': 1})

    def test_unlabeled_report_is_rejected(self):
        with self.assertRaises(DomainError):
            self.store.ingest(report_with_counts(1, 1, 1, label=None), TABLE)
        self.assertEqual(self.store.total_training_reports, 0)

    def test_lookup(self):
        self.assertIsNone(self.store.lookup('1.00000'))
        self.store.ingest(report_with_counts(2, 2, 2), TABLE)
        key = weighted_sum(2, 2, 2, TABLE).key
        self.assertEqual(self.store.lookup(key), StoreEntry(key, {'v1': 1}))

    def test_lookup_is_read_only(self):
        self.store.ingest_all(generate_corpus(FleetConfig(n_clients=200)), TABLE)
        before = io.StringIO()
        self.store.save(before)
        for i in range(1000):
            self.store.lookup(quantize(i / 100))
        after = io.StringIO()
        self.store.save(after)
        self.assertEqual(before.getvalue(), after.getvalue())

    def test_conservation(self):
        corpus = generate_corpus(FleetConfig(n_clients=500, seed=4))
        self.store.ingest_all(corpus, TABLE)
        self.assertEqual(self.store.total_training_reports, 500)
        self.assertEqual(sum(entry.total() for entry in self.store.entries.values()), 500)

    def test_merge_matches_single_pass(self):
        config = FleetConfig(n_clients=400, seed=8)
        corpus = generate_corpus(config)
        whole = CentralStore.for_params(self.params).ingest_all(corpus, TABLE)
        left = CentralStore.for_params(self.params).ingest_all(corpus[:150], TABLE)
        right = CentralStore.for_params(self.params).ingest_all(corpus[150:], TABLE)
        self.assertEqual(left.merge(right), whole)
        self.assertEqual(right.merge(left), whole)
        with self.assertRaises(DomainError):
            left.merge(CentralStore.for_params(EncodingParams(f=0.1)))

    def test_modal_label(self):
        self.assertEqual(StoreEntry('1.00000', {'v1': 5}).modal_label(), 'v1')
        self.assertEqual(StoreEntry('1.00000', {'v2': 3, 'v1': 3}).modal_label(), 'v1')
        self.assertEqual(StoreEntry('1.00000', {'v2': 4, 'v1': 3}).modal_label(), 'v2')


class StoreFileTests(SimpleTestCase):
    def setUp(self):
        self.params = EncodingParams()

    def round_trip(self, store):
        buffer = io.StringIO()
        store.save(buffer)
        buffer.seek(0)
        return CentralStore.load(buffer, self.params.fingerprint())

    def test_empty_store(self):
        store = CentralStore.for_params(self.params)
        loaded = self.round_trip(store)
        self.assertEqual(loaded, store)
        self.assertEqual(loaded.params_fingerprint, self.params.fingerprint())

    def test_format(self):
        store = CentralStore.for_params(self.params)
        store.ingest(report_with_counts(8, 4, 3, 'v2'), TABLE)
        store.ingest(report_with_counts(8, 4, 3, 'v1'), TABLE)
        store.ingest(report_with_counts(1, 0, 0, 'v1'), TABLE)
        buffer = io.StringIO()
        store.save(buffer)
        self.assertEqual(buffer.getvalue(), (
            f'ARA-STORE v1 k=32 params={self.params.fingerprint()} total=3\n'
            '1.20201\tv1:1\n'
            '25.28652\tv1:1,v2:1\n'
        ))
        self.assertEqual(self.round_trip(store), store)

    def test_randomized_round_trips(self):
        rng = random.Random(1234)
        for _ in range(1000):
            store = CentralStore.for_params(self.params)
            for _ in range(rng.randrange(0, 8)):
                report = report_with_counts(
                    rng.randrange(33), rng.randrange(33), rng.randrange(64),
                    label=f'v{rng.randrange(1, 11)}')
                store.ingest(report, TABLE)
            self.assertEqual(self.round_trip(store), store)

    def test_fingerprint_mismatch(self):
        buffer = io.StringIO()
        CentralStore.for_params(self.params).save(buffer)
        buffer.seek(0)
        with self.assertRaises(StoreFormatError) as cm:
            load_store(buffer, EncodingParams(q=0.9))
        self.assertEqual(cm.exception.line, 1)

    def test_malformed_files_name_lines(self):
        header = f'ARA-STORE v1 k=32 params={self.params.fingerprint()} total=2\n'
        cases = {
            'duplicate key': (header + '1.00000\tv1:1\n1.00000\tv2:1\n', 3),
            'no tab': (header + '1.00000 v1:2\n', 2),
            'bad count': (header + '1.00000\tv1:0,v2:2\n', 2),
            'bad key': (header + '1.0\tv1:2\n', 2),
            'superscript count': (header + '1.00000\tv1:\u00b2\n', 2),
            'non-ascii key': (header + '1.\u0660\u0660\u0660\u0660\u0660\tv1:2\n', 2),
            'leading zero count': (header + '1.00000\tv1:02\n', 2),
            'total': (header + '1.00000\tv1:1\n', 1),
            'header': ('ARA-STORE v2 k=32\n', 1),
        }
        for name, (text, line) in cases.items():
            with self.subTest(name), self.assertRaises(StoreFormatError) as cm:
                CentralStore.load(io.StringIO(text))
            self.assertEqual(cm.exception.line, line)

    def test_store_file_holds_no_report_data(self):
        corpus = generate_corpus(FleetConfig(n_clients=2000, seed=12))
        store = CentralStore.for_params(self.params).ingest_all(corpus, TABLE)
        buffer = io.StringIO()
        store.save(buffer)
        text = buffer.getvalue()
        self.assertNotIn('cohort', text)
        data_line = re.compile(r'^\d+\.\d{5}\tv\d+:\d+(,v\d+:\d+)*$')
        for line in text.splitlines()[1:]:
            self.assertRegex(line, data_line)
        for report in corpus:
            self.assertNotIn(report.client_id, text)
            self.assertNotIn(str(report.prr), text)
            self.assertNotIn(str(report.irr), text)


class AggregatorCommandTests(SimpleTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_build_db(self):
        corpus = generate_corpus(FleetConfig(n_clients=300, seed=7))
        write_csv(corpus, self.dir / 'train.csv')
        call_command('build_db', corpus=str(self.dir / 'train.csv'),
                     out=str(self.dir / 'store.ara'), stdout=io.StringIO())
        store = load_store(self.dir / 'store.ara', EncodingParams())
        self.assertEqual(store.total_training_reports, 300)

    def test_build_db_empty_corpus(self):
        write_csv([], self.dir / 'empty.csv')
        call_command('build_db', corpus=str(self.dir / 'empty.csv'),
                     out=str(self.dir / 'store.ara'), stdout=io.StringIO())
        store = load_store(self.dir / 'store.ara')
        self.assertEqual((store.entries, store.total_training_reports), ({}, 0))

    def test_build_db_rejects_unlabeled_corpus(self):
        corpus = generate_corpus(FleetConfig(n_clients=5, labeled=False))
        write_csv(corpus, self.dir / 'test.csv')
        with self.assertRaises(CommandError) as cm:
            call_command('build_db', corpus=str(self.dir / 'test.csv'),
                         out=str(self.dir / 'store.ara'), stdout=io.StringIO())
        self.assertEqual(cm.exception.returncode, 1)
        self.assertIn(':2:', str(cm.exception))

    def test_verify_constants(self):
        write_csv(generate_corpus(FleetConfig(n_clients=1000, seed=7)), self.dir / 'train.csv')
        out = io.StringIO()
        call_command('verify_constants', corpus=str(self.dir / 'train.csv'),
                     sizes=[100, 1000], stdout=out)
        self.assertIn('max |delta|', out.getvalue())
        self.assertIn('Constant rule holds', out.getvalue())

    def test_verify_constants_sample_too_large(self):
        write_csv(generate_corpus(FleetConfig(n_clients=50, seed=7)), self.dir / 'small.csv')
        with self.assertRaises(CommandError) as cm:
            call_command('verify_constants', corpus=str(self.dir / 'small.csv'),
                         sizes=[100], stdout=io.StringIO())
        self.assertEqual(cm.exception.returncode, 2)

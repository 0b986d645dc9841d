import csv
import io
import random
from collections import Counter
from pathlib import Path
from tempfile import TemporaryDirectory

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from aggregator.constants import build_constant_table
from aggregator.store import CentralStore
from aggregator.weighting import weighted_sum_of_report
from analysis.experiments import (
    SIZES_FILENAME,
    ExperimentRow,
    build_store,
    derive_seed,
    draw_batch,
    rank_correlation,
    read_results_csv,
    run_experiment,
    run_size_sweep,
    write_results_csv,
)
from analysis.matching import (
    NO_MAJOR,
    analyze_batch,
    majority_label,
    match_report,
    write_analysis_csv,
)
from analysis.models import ExperimentResult, ExperimentRun
from rappor.encoding import Bitset, ClientReport, EncodingParams
from rappor.exceptions import DomainError, ReportParseError
from rappor.fleet import FleetConfig, write_csv

TABLE = build_constant_table(32)
PARAMS = EncodingParams()

# No noise at all: a report is its Bloom filter.
NOISELESS = EncodingParams(f=0.0, p=0.0, q=1.0)


def report(n_prr, n_irr, cohort, label=None, client_id='c'):
    return ClientReport(
        client_id=client_id,
        cohort=cohort,
        prr=Bitset.from_indices(32, range(n_prr)),
        irr=Bitset.from_indices(32, range(n_irr)),
        true_value=label,
    )


def store_of(reports):
    return CentralStore.for_params(PARAMS).ingest_all(reports, TABLE)


def single_value_fleet(n_clients, seed=7):
    return FleetConfig(n_clients=n_clients, values=('only',), seed=seed, params=NOISELESS)


class MajorityLabelTests(SimpleTestCase):
    def test_majority(self):
        self.assertEqual(majority_label({'v2': 3, 'v1': 1}), 'v2')
        self.assertEqual(majority_label({'v2': 3, 'v1': 3}), 'v1')
        self.assertEqual(majority_label({'v10': 2, 'v9': 2}), 'v10')

    def test_nothing_counted(self):
        self.assertEqual(majority_label({}), NO_MAJOR)
        self.assertEqual(majority_label({'v1': 0}), NO_MAJOR)


class MatchReportTests(SimpleTestCase):
    def test_matches_modal_label(self):
        store = store_of([report(8, 4, 3, 'v2'), report(8, 4, 3, 'v2'), report(8, 4, 3, 'v1')])
        self.assertEqual(match_report(report(8, 4, 3), store, TABLE), 'v2')

    def test_tie_goes_to_smallest_label(self):
        store = store_of([report(8, 4, 3, 'v2'), report(8, 4, 3, 'v1')])
        self.assertEqual(match_report(report(4, 8, 3), store, TABLE), 'v1')

    def test_unknown_key(self):
        store = store_of([report(8, 4, 3, 'v1')])
        self.assertIsNone(match_report(report(8, 4, 5), store, TABLE))


class AnalyzeBatchTests(SimpleTestCase):
    def setUp(self):
        self.store = store_of([report(8, 4, 3, 'v1'), report(2, 2, 5, 'v2'), report(9, 18, 40, 'v3')])

    def test_empty_batch(self):
        with self.assertRaises(DomainError):
            analyze_batch([], self.store, TABLE)

    def test_single_label_batch(self):
        result = analyze_batch([report(9, 18, 40)] * 10, self.store, TABLE)
        self.assertEqual(result.major_value, 'v3')
        self.assertEqual(result.achievement_pct, 100.0)
        self.assertEqual(result.credits, {'v3': 10})

    def test_nothing_matches(self):
        result = analyze_batch([report(1, 1, 7)] * 5, self.store, TABLE)
        self.assertEqual((result.matched, result.unmatched), (0, 5))
        self.assertEqual(result.major_value, NO_MAJOR)
        self.assertEqual(result.achievement_pct, 0.0)
        self.assertEqual(result.credits, {})

    def test_split_batch(self):
        batch = [report(8, 4, 3)] * 60 + [report(2, 2, 5)] * 40
        result = analyze_batch(batch, self.store, TABLE)
        self.assertEqual(result.credits, {'v1': 60, 'v2': 40})
        self.assertEqual(result.major_value, 'v1')
        self.assertEqual(result.achievement_pct, 60.0)

    def test_unmatched_reports_count_towards_sample_size(self):
        batch = [report(8, 4, 3)] * 30 + [report(1, 1, 7)] * 70
        result = analyze_batch(batch, self.store, TABLE)
        self.assertEqual(result.sample_size, 100)
        self.assertEqual(result.achievement_pct, 30.0)

    def test_scale_free(self):
        batch = [report(8, 4, 3)] * 7 + [report(2, 2, 5)] * 3 + [report(1, 1, 7)] * 5
        once = analyze_batch(batch, self.store, TABLE)
        twice = analyze_batch(batch * 2, self.store, TABLE)
        self.assertEqual(once.achievement_pct, twice.achievement_pct)
        self.assertEqual(once.major_value, twice.major_value)

    def test_labels_in_batch_are_ignored(self):
        batch = [report(8, 4, 3, 'v9')] * 4
        self.assertEqual(analyze_batch(batch, self.store, TABLE).major_value, 'v1')


class MajorityOracleTests(SimpleTestCase):
    """Compare analyze_batch with a brute-force scan over the raw training reports."""

    def test_randomized_batches(self):
        rng = random.Random(99)
        training = []
        for _ in range(3000):
            cohort = rng.randrange(1, 64)
            training.append(report(rng.randrange(4, 14), rng.randrange(4, 14), cohort,
                                   'a' if cohort < 32 else 'b'))
        store = store_of(training)
        training_keys = [(weighted_sum_of_report(r, TABLE).key, r.true_value) for r in training]

        for _ in range(20):
            batch = [report(rng.randrange(3, 16), rng.randrange(3, 16), rng.randrange(64))
                     for _ in range(rng.randrange(1, 120))]
            credits = Counter()
            for item in batch:
                key = weighted_sum_of_report(item, TABLE).key
                labels = Counter(label for stored, label in training_keys if stored == key)
                if labels:
                    credits[min(labels, key=lambda label: (-labels[label], label))] += 1

            result = analyze_batch(batch, store, TABLE)
            self.assertEqual(result.credits, dict(credits))
            self.assertEqual(result.matched, sum(credits.values()))
            self.assertLessEqual(result.matched, result.sample_size)
            self.assertEqual(result.major_value, majority_label(credits))
            self.assertAlmostEqual(
                result.achievement_pct, 100 * credits[result.major_value] / len(batch)
                if credits else 0.0)


class AnalysisCsvTests(SimpleTestCase):
    def test_one_row(self):
        store = store_of([report(8, 4, 3, 'v1'), report(2, 2, 5, 'v2')])
        result = analyze_batch([report(8, 4, 3)] * 3 + [report(2, 2, 5)], store, TABLE)
        buffer = io.StringIO()
        write_analysis_csv(result, buffer)
        self.assertEqual(buffer.getvalue(), (
            'major_value,sample_size,matched,achievement_pct,credits\n'
            'v1,4,4,75.0,v1:3;v2:1\n'
        ))


class RankCorrelationTests(SimpleTestCase):
    def test_monotone(self):
        self.assertAlmostEqual(rank_correlation([1, 2, 3, 4], [10, 20, 30, 40]), 1.0)
        self.assertAlmostEqual(rank_correlation([1, 2, 3, 4], [9, 7, 3, 1]), -1.0)
        self.assertAlmostEqual(rank_correlation([1, 2, 3, 4], [1, 4, 9, 16.5]), 1.0)

    def test_ties_use_average_ranks(self):
        self.assertAlmostEqual(rank_correlation([1, 2, 2, 3], [1, 2, 2, 3]), 1.0)
        self.assertAlmostEqual(rank_correlation([1, 1, 2, 2], [5, 6, 7, 8]), 0.894427191)

    def test_degenerate(self):
        self.assertEqual(rank_correlation([], []), 0.0)
        self.assertEqual(rank_correlation([5], [1]), 0.0)
        self.assertEqual(rank_correlation([1, 2, 3], [7, 7, 7]), 0.0)
        with self.assertRaises(DomainError):
            rank_correlation([1, 2], [1])


class DrawBatchTests(SimpleTestCase):
    def test_distinct_clients_and_stable_per_test(self):
        test = FleetConfig(n_clients=500, seed=derive_seed(7, 0), labeled=False)
        batch = draw_batch(test, 3, 80)
        self.assertEqual(len({r.client_id for r in batch}), 80)
        self.assertTrue(all(r.is_labeled for r in batch))
        self.assertEqual(batch, draw_batch(test, 3, 80))
        self.assertNotEqual(batch, draw_batch(test, 4, 80))

    def test_derive_seed(self):
        self.assertEqual(derive_seed(7, 1), derive_seed(7, 1))
        self.assertNotEqual(derive_seed(7, 1), derive_seed(7, 2))
        self.assertNotEqual(derive_seed(7, 1), derive_seed(8, 1))


class RunExperimentTests(SimpleTestCase):
    def test_deterministic(self):
        train = FleetConfig(n_clients=1500, seed=3)
        test = FleetConfig(n_clients=1500, seed=derive_seed(3, 0))
        first = run_experiment(train, test, 4, 100)
        self.assertEqual(first, run_experiment(train, test, 4, 100))
        self.assertEqual([row.test_no for row in first], [1, 2, 3, 4])
        for row in first:
            self.assertEqual(row.sample_size, 100)
            self.assertTrue(0 <= row.achievement_pct <= 100)
            self.assertEqual(row.detected_correctly, row.major_true_value == row.ground_truth_major)

    def test_single_value_fleet(self):
        fleet = single_value_fleet(2000)
        rows = run_experiment(fleet, fleet, 5, 200)
        self.assertEqual(len(rows), 5)
        for row in rows:
            self.assertTrue(row.detected_correctly)
            self.assertEqual((row.major_true_value, row.ground_truth_major), ('only', 'only'))
            self.assertEqual(row.achievement_pct, 100.0)

    def test_no_tests(self):
        fleet = single_value_fleet(50)
        self.assertEqual(run_experiment(fleet, fleet, 0, 10), [])

    def test_preconditions(self):
        fleet = FleetConfig(n_clients=100)
        with self.assertRaises(DomainError):
            run_experiment(fleet, fleet, 1, 101)
        with self.assertRaises(DomainError):
            run_experiment(fleet, fleet, 1, 0)
        with self.assertRaises(DomainError):
            run_experiment(fleet, FleetConfig(n_clients=100, params=NOISELESS), 1, 10)
        with self.assertRaises(DomainError):
            run_size_sweep(fleet, fleet, [], 1)


class FullScaleTests(SimpleTestCase):
    """25 000 training reports, batches drawn from a second 25 000-client fleet."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.train = FleetConfig(n_clients=25000, seed=7)
        cls.test = FleetConfig(n_clients=25000, seed=derive_seed(7, 0))
        cls.store = build_store(cls.train)

    def test_detects_major_value(self):
        rows = run_experiment(self.train, self.test, 40, 1000, store=self.store)
        self.assertEqual(len(rows), 40)
        self.assertGreaterEqual(sum(row.detected_correctly for row in rows), 38)
        for row in rows:
            self.assertTrue(0 <= row.achievement_pct <= 100)
            self.assertEqual(row.ground_truth_major, 'v1')
        mean = sum(row.achievement_pct for row in rows) / len(rows)
        self.assertTrue(30 <= mean <= 95, mean)

    def test_achievement_does_not_track_batch_size(self):
        sweep = run_size_sweep(self.train, self.test, [300, 400, 500, 600], 10, store=self.store)
        self.assertEqual(len(sweep.rows), 40)
        self.assertEqual([row.test_no for row in sweep.rows], list(range(1, 41)))
        self.assertEqual(Counter(row.sample_size for row in sweep.rows),
                         {300: 10, 400: 10, 500: 10, 600: 10})
        self.assertLess(abs(sweep.rank_correlation), 0.5)


def sample_rows(count):
    return [
        ExperimentRow(test_no=i, major_true_value='v1' if i % 7 else 'v2', sample_size=1000,
                      achievement_pct=31.3 + i / 3, ground_truth_major='v1',
                      detected_correctly=bool(i % 7))
        for i in range(1, count + 1)
    ]


class ResultsCsvTests(SimpleTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_layout(self):
        write_results_csv(sample_rows(40), self.dir / 'results.csv')
        lines = (self.dir / 'results.csv').read_text().splitlines()
        self.assertEqual(len(lines), 41)
        self.assertEqual(lines[0], 'test,major_value,sample_size,achievement_pct,ground_truth,correct')
        self.assertEqual(lines[7], f'7,v2,1000,{31.3 + 7 / 3!r},v1,false')

    def test_companion_file(self):
        rows = sample_rows(3)
        write_results_csv(rows, self.dir / 'results.csv')
        with open(self.dir / SIZES_FILENAME, newline='') as stream:
            records = list(csv.reader(stream))
        self.assertEqual(records[0], ['sample_size', 'achievement_pct'])
        self.assertEqual([(int(s), float(a)) for s, a in records[1:]],
                         [(row.sample_size, row.achievement_pct) for row in rows])

    def test_no_rows(self):
        buffer = io.StringIO()
        write_results_csv([], buffer)
        self.assertEqual(buffer.getvalue(), 'test,major_value,sample_size,achievement_pct,ground_truth,correct\n')

    def test_round_trip(self):
        rows = sample_rows(12) + [ExperimentRow(13, NO_MAJOR, 10, 0.0, 'v1', False)]
        buffer = io.StringIO()
        write_results_csv(rows, buffer)
        buffer.seek(0)
        self.assertEqual(read_results_csv(buffer), rows)

    def test_malformed(self):
        text = 'test,major_value,sample_size,achievement_pct,ground_truth,correct\n1,v1,10,5.0,v1,yes\n'
        with self.assertRaises(ReportParseError) as cm:
            read_results_csv(io.StringIO(text))
        self.assertEqual(cm.exception.line, 2)


class CommandTestMixin:
    def setUp(self):
        super().setUp()
        self.tmp = TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def call(self, name, *args):
        out = io.StringIO()
        call_command(name, *args, stdout=out)
        return out.getvalue()


class AnalyzeCommandTests(CommandTestMixin, SimpleTestCase):
    def setUp(self):
        super().setUp()
        self.train = self.dir / 'train.csv'
        self.store = self.dir / 'store.ara'
        self.call('generate', '--n', '500', '--seed', '11', '--out', str(self.train))
        self.call('build_db', '--corpus', str(self.train), '--out', str(self.store))

    def analyze(self, batch, *args):
        return self.call('analyze', '--batch', str(batch), '--store', str(self.store), *args)

    def test_training_corpus_matches_itself(self):
        output = self.analyze(self.train, '--out', str(self.dir / 'analysis.csv'))
        self.assertIn('matched          500', output)
        self.assertIn('ground truth', output)
        with open(self.dir / 'analysis.csv', newline='') as stream:
            (row,) = csv.DictReader(stream)
        self.assertEqual(row['sample_size'], '500')
        self.assertGreater(float(row['achievement_pct']), 0)

    def test_strip_labels_changes_nothing_but_the_verdict(self):
        self.analyze(self.train, '--out', str(self.dir / 'labeled.csv'))
        output = self.analyze(self.train, '--strip-labels', '--out', str(self.dir / 'stripped.csv'))
        self.assertNotIn('ground truth', output)
        self.assertEqual((self.dir / 'labeled.csv').read_bytes(),
                         (self.dir / 'stripped.csv').read_bytes())

    def test_strip_labels_matches_unlabeled_input(self):
        unlabeled = self.dir / 'unlabeled.csv'
        self.call('generate', '--n', '500', '--seed', '11', '--unlabeled', '--out', str(unlabeled))
        self.assertEqual(self.analyze(self.train, '--strip-labels'), self.analyze(unlabeled))

    def test_unlabeled_batch(self):
        batch = self.dir / 'batch.csv'
        self.call('generate', '--n', '100', '--seed', '12', '--unlabeled', '--out', str(batch))
        output = self.analyze(batch)
        self.assertIn('sample size      100', output)
        self.assertNotIn('ground truth', output)

    def test_empty_batch(self):
        write_csv([], self.dir / 'empty.csv')
        with self.assertRaises(CommandError) as cm:
            self.analyze(self.dir / 'empty.csv')
        self.assertEqual(cm.exception.returncode, 2)

    def test_store_built_with_other_params(self):
        with self.assertRaises(CommandError) as cm:
            self.analyze(self.train, '--q', '0.9')
        self.assertEqual(cm.exception.returncode, 1)

    def test_missing_store(self):
        self.store = self.dir / 'missing.ara'
        with self.assertRaises(CommandError) as cm:
            self.analyze(self.train)
        self.assertEqual(cm.exception.returncode, 1)

    def test_corrupt_store(self):
        lines = self.store.read_text(encoding='utf-8').splitlines()
        key = lines[1].split('\t')[0]
        self.store.write_text('\n'.join([lines[0], f'{key}\tv1:²'] + lines[2:]) + '\n',
                              encoding='utf-8')
        with self.assertRaises(CommandError) as cm:
            self.analyze(self.train)
        self.assertEqual(cm.exception.returncode, 1)
        self.assertIn(':2:', str(cm.exception))


NOISELESS_FLEET_ARGS = ['--values', 'only', '--f', '0', '--p', '0', '--q', '1']


class EvalCommandTests(CommandTestMixin, SimpleTestCase):
    def eval(self, name, *args):
        return self.call('eval', '--out', str(self.dir / name), *args)

    def test_results_table(self):
        output = self.eval('results.csv', '--tests', '40', '--batch', '50',
                           '--train-n', '300', '--test-n', '300', *NOISELESS_FLEET_ARGS)
        self.assertIn('40/40 tests detected', output)
        rows = read_results_csv(self.dir / 'results.csv')
        self.assertEqual([row.test_no for row in rows], list(range(1, 41)))
        self.assertTrue(all(row.achievement_pct == 100.0 for row in rows))
        self.assertTrue((self.dir / SIZES_FILENAME).exists())

    def test_same_seed_same_results(self):
        args = ['--tests', '5', '--batch', '100', '--train-n', '1000', '--test-n', '1000', '--seed', '4']
        for name in ('a.csv', 'b.csv'):
            try:
                self.eval(name, *args)
            except CommandError as exc:
                self.assertEqual(exc.returncode, 1)
        self.assertEqual((self.dir / 'a.csv').read_bytes(), (self.dir / 'b.csv').read_bytes())

    def test_size_sweep(self):
        output = self.eval('sweep.csv', '--tests', '2', '--sizes', '20,30,40',
                           '--train-n', '300', '--test-n', '300', *NOISELESS_FLEET_ARGS)
        self.assertIn('rank correlation', output)
        rows = read_results_csv(self.dir / 'sweep.csv')
        self.assertEqual([row.sample_size for row in rows], [20, 20, 30, 30, 40, 40])

    def test_configured_sweep(self):
        self.eval('sweep.csv', '--tests', '1', '--sweep',
                  '--train-n', '600', '--test-n', '600', *NOISELESS_FLEET_ARGS)
        rows = read_results_csv(self.dir / 'sweep.csv')
        self.assertEqual([row.sample_size for row in rows], [300, 400, 500, 600])

    def test_usage_errors(self):
        cases = [
            ['--tests', '-1'],
            ['--train-n', '0'],
            ['--batch', '500', '--test-n', '100', '--train-n', '100'],
            ['--lambda', '0'],
        ]
        for args in cases:
            with self.subTest(args), self.assertRaises(CommandError) as cm:
                self.eval('bad.csv', *args)
            self.assertEqual(cm.exception.returncode, 2)

    def test_unwritable_output(self):
        with self.assertRaises(CommandError) as cm:
            self.eval('missing-dir/results.csv', '--tests', '1', '--batch', '10',
                      '--train-n', '50', '--test-n', '50', *NOISELESS_FLEET_ARGS)
        self.assertEqual(cm.exception.returncode, 1)

    def test_missed_rows_exit_one_after_writing_results(self):
        # One cohort and one hash: every report lands on the same key, whose
        # modal label cannot agree with every single-client batch.
        with self.assertRaises(CommandError) as cm:
            self.eval('missed.csv', '--tests', '40', '--batch', '1',
                      '--train-n', '200', '--test-n', '200', '--values', 'b,a',
                      '--f', '0', '--p', '0', '--q', '1', '--h', '1', '--m', '1')
        self.assertEqual(cm.exception.returncode, 1)
        self.assertIn('missed the major true value', str(cm.exception))
        rows = read_results_csv(self.dir / 'missed.csv')
        self.assertEqual(len(rows), 40)
        self.assertEqual(len({row.major_true_value for row in rows}), 1)
        self.assertIn(False, [row.detected_correctly for row in rows])
        self.assertIn(True, [row.detected_correctly for row in rows])


class RecordedRunTests(CommandTestMixin, TestCase):
    def test_record(self):
        self.eval_args = ['--train-n', '300', '--test-n', '300', *NOISELESS_FLEET_ARGS]
        self.call('eval', '--out', str(self.dir / 'r.csv'), '--tests', '6', '--batch', '25',
                  '--record', *self.eval_args)
        run = ExperimentRun.objects.get()
        self.assertEqual((run.n_tests, run.batch_size, run.train_clients), (6, 25, 300))
        self.assertEqual(run.params_fingerprint, NOISELESS.fingerprint())
        self.assertIsNone(run.rank_correlation)
        self.assertEqual(run.detected, 6)
        self.assertEqual(list(run.results.values_list('test_no', flat=True)), [1, 2, 3, 4, 5, 6])

    def test_record_sweep(self):
        self.call('eval', '--out', str(self.dir / 's.csv'), '--tests', '2', '--sizes', '10,30',
                  '--record', '--train-n', '300', '--test-n', '300', *NOISELESS_FLEET_ARGS)
        run = ExperimentRun.objects.get()
        self.assertEqual(run.batch_size, 30)
        self.assertEqual(run.rank_correlation, 0.0)
        self.assertEqual(run.results.count(), 4)

    def test_no_record_by_default(self):
        self.call('eval', '--out', str(self.dir / 'n.csv'), '--tests', '1', '--batch', '10',
                  '--train-n', '50', '--test-n', '50', *NOISELESS_FLEET_ARGS)
        self.assertFalse(ExperimentRun.objects.exists())


class ExperimentRunApiTests(APITestCase):
    @classmethod
    def setUpTestData(cls):
        fleet = single_value_fleet(100)
        rows = sample_rows(3)
        cls.first = ExperimentRun.record(rows, fleet, fleet, 1000)
        cls.other = ExperimentRun.record(sample_rows(7), fleet, fleet, 1000, rank_correlation=0.1)

    def test_list(self):
        response = self.client.get(reverse('api:experimentrun-list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 2)
        by_id = {item['id']: item for item in response.data}
        self.assertEqual(by_id[self.first.id]['detected'], 3)
        self.assertEqual(by_id[self.other.id]['detected'], 6)
        self.assertNotIn('results', by_id[self.first.id])

    def test_detail(self):
        response = self.client.get(reverse('api:experimentrun-detail', args=[self.other.id]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['n_tests'], 7)
        self.assertEqual(response.data['rank_correlation'], 0.1)
        self.assertEqual(len(response.data['results']), 7)
        self.assertEqual(response.data['results'][6]['major_value'], 'v2')
        self.assertFalse(response.data['results'][6]['correct'])

    def test_sizes(self):
        response = self.client.get(reverse('api:experimentrun-sizes', args=[self.first.id]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([dict(point) for point in response.data],
                         [{'sample_size': 1000, 'achievement_pct': 31.3 + i / 3} for i in (1, 2, 3)])

    def test_read_only(self):
        response = self.client.post(reverse('api:experimentrun-list'), {'seed': 1})
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)
        self.assertEqual(ExperimentResult.objects.count(), 10)

    def test_unknown_run(self):
        response = self.client.get(reverse('api:experimentrun-detail', args=[9999]))
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

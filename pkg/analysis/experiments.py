"""Repeated detection experiments and their result files.

One experiment trains a store once, then analyzes ``n_tests`` fresh batches
drawn from the test fleet. Batch ``i`` is generated from a seed derived from
``(test seed, i)``, so tests can run in any order and still agree.
"""
import csv
import logging
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import stats

from aggregator.constants import build_constant_table
from aggregator.store import CentralStore
from rappor.exceptions import DomainError, ReportParseError
from rappor.fleet import generate_corpus
from rappor.textio import open_text, source_name

from .matching import analyze_batch, majority_label

logger = logging.getLogger(__name__)

RESULTS_HEADER = ['test', 'major_value', 'sample_size', 'achievement_pct', 'ground_truth', 'correct']
SIZES_HEADER = ['sample_size', 'achievement_pct']
SIZES_FILENAME = 'achievement_vs_size.csv'


@dataclass(frozen=True)
class ExperimentRow:
    test_no: int
    major_true_value: str
    sample_size: int
    achievement_pct: float
    ground_truth_major: str
    detected_correctly: bool

    @classmethod
    def from_analysis(cls, test_no, analysis, ground_truth):
        return cls(
            test_no=test_no,
            major_true_value=analysis.major_value,
            sample_size=analysis.sample_size,
            achievement_pct=analysis.achievement_pct,
            ground_truth_major=ground_truth,
            detected_correctly=analysis.major_value == ground_truth,
        )


@dataclass(frozen=True)
class SweepResult:
    rows: list
    rank_correlation: float


def derive_seed(seed, test_no):
    state = np.random.SeedSequence([seed, test_no]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def build_store(config, table=None):
    table = table or build_constant_table(config.params.k)
    return CentralStore.for_params(config.params).ingest_all(generate_corpus(config), table)


def draw_batch(test_config, test_no, batch_size):
    """Labeled batch of ``batch_size`` distinct clients from the test fleet."""
    seed = derive_seed(test_config.seed, test_no)
    rng = np.random.default_rng(seed)
    clients = np.sort(rng.choice(test_config.n_clients, size=batch_size, replace=False))
    config = replace(test_config, seed=seed, labeled=True)
    return generate_corpus(config, client_range=clients.tolist())


def _check_configs(train_config, test_config, batch_size):
    if train_config.params != test_config.params:
        raise DomainError('training and test fleets must share encoding parameters')
    if not 1 <= batch_size <= test_config.n_clients:
        raise DomainError(f'batch size {batch_size} outside [1, {test_config.n_clients}]')


def _run_tests(store, table, test_config, batch_size, test_numbers):
    rows = []
    for test_no in test_numbers:
        batch = draw_batch(test_config, test_no, batch_size)
        truth = majority_label(Counter(report.true_value for report in batch))
        analysis = analyze_batch([report.without_label() for report in batch], store, table)
        row = ExperimentRow.from_analysis(test_no, analysis, truth)
        logger.info('test finished', extra={
            'test': test_no, 'major': row.major_true_value, 'truth': truth,
            'achievement_pct': row.achievement_pct,
        })
        rows.append(row)
    return rows


def run_experiment(train_config, test_config, n_tests, batch_size, store=None):
    """Train once, then detect the major true value in ``n_tests`` batches."""
    if n_tests < 0:
        raise DomainError(f'number of tests must be nonnegative, got {n_tests}')
    _check_configs(train_config, test_config, batch_size)
    table = build_constant_table(train_config.params.k)
    store = store or build_store(train_config, table)
    return _run_tests(store, table, test_config, batch_size, range(1, n_tests + 1))


def run_size_sweep(train_config, test_config, sizes, tests_per_size, store=None):
    """Run ``tests_per_size`` tests at each batch size and correlate size with achievement."""
    if not sizes:
        raise DomainError('a sweep needs at least one batch size')
    for size in sizes:
        _check_configs(train_config, test_config, size)
    table = build_constant_table(train_config.params.k)
    store = store or build_store(train_config, table)
    rows = []
    for size in sizes:
        first = len(rows) + 1
        rows.extend(_run_tests(store, table, test_config, size, range(first, first + tests_per_size)))
    rho = rank_correlation([row.sample_size for row in rows], [row.achievement_pct for row in rows])
    return SweepResult(rows=rows, rank_correlation=rho)


def rank_correlation(xs, ys) -> float:
    """Spearman's rho with average ranks for ties; 0.0 when either side is constant."""
    if len(xs) != len(ys):
        raise DomainError('rank correlation needs paired samples')
    if len(xs) < 2 or len(set(xs)) < 2 or len(set(ys)) < 2:
        return 0.0
    return float(stats.spearmanr(xs, ys).statistic)


def write_results_csv(rows, destination, sizes_destination=None):
    """Write the per-test results, plus the (sample_size, achievement_pct) companion file.

    For a path destination the companion goes next to it as
    ``achievement_vs_size.csv`` unless ``sizes_destination`` says otherwise.
    """
    if sizes_destination is None and isinstance(destination, (str, Path)):
        sizes_destination = Path(destination).with_name(SIZES_FILENAME)
    with open_text(destination, 'w') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            writer.writerow([
                row.test_no, row.major_true_value, row.sample_size,
                repr(row.achievement_pct), row.ground_truth_major,
                'true' if row.detected_correctly else 'false',
            ])
    if sizes_destination is not None:
        with open_text(sizes_destination, 'w') as stream:
            writer = csv.writer(stream, lineterminator='\n')
            writer.writerow(SIZES_HEADER)
            for row in rows:
                writer.writerow([row.sample_size, repr(row.achievement_pct)])


def read_results_csv(source):
    name = source_name(source)
    rows = []
    with open_text(source) as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise ReportParseError(f'unexpected header {header!r}', line=1, source=name)
        for record in reader:
            if len(record) != len(RESULTS_HEADER) or record[5] not in ('true', 'false'):
                raise ReportParseError(f'malformed result {record!r}', line=reader.line_num, source=name)
            try:
                rows.append(ExperimentRow(
                    test_no=int(record[0]),
                    major_true_value=record[1],
                    sample_size=int(record[2]),
                    achievement_pct=float(record[3]),
                    ground_truth_major=record[4],
                    detected_correctly=record[5] == 'true',
                ))
            except ValueError:
                raise ReportParseError(
                    f'malformed result {record!r}', line=reader.line_num, source=name) from None
    return rows

"""Simulated client fleets and the report CSV format.

Client ``i`` of a fleet draws its value and its IRR noise from a generator
seeded with ``(seed, i)``, so any slice of the fleet can be generated on its
own and the slices concatenate to the full corpus.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .encoding import DEFAULT_SECRET, Bitset, ClientReport, EncodingParams, encode_report
from .exceptions import DomainError, ReportParseError
from .textio import open_text, source_name

logger = logging.getLogger(__name__)

DEFAULT_VALUES = tuple(f'v{i}' for i in range(1, 11))

CSV_HEADER = ['client', 'cohort', 'prr', 'irr', 'true_value']

# Characters the CSV and store formats use as separators.
FORBIDDEN_LABEL_CHARS = set(',:;\t\r\n')


def validate_label(label):
    if not label or FORBIDDEN_LABEL_CHARS & set(label):
        raise DomainError(f'invalid label {label!r}: must be nonempty and free of , : ; tab newline')
    return label


def exponential_distribution(n_values: int, rate: float):
    """P(v_i) proportional to exp(-rate * i) for i = 1..n_values."""
    if n_values < 1:
        raise DomainError(f'need at least one value, got {n_values}')
    if not rate > 0:
        raise DomainError(f'rate must be positive, got {rate}')
    weights = np.exp(-rate * np.arange(1, n_values + 1))
    return (weights / weights.sum()).tolist()


@dataclass(frozen=True)
class FleetConfig:
    n_clients: int
    values: tuple = DEFAULT_VALUES
    distribution: Optional[tuple] = None
    seed: int = 7
    params: EncodingParams = field(default_factory=EncodingParams)
    rate: float = 0.5
    client_prefix: str = 'client'
    secret: bytes = DEFAULT_SECRET
    labeled: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(self.values))
        if self.n_clients < 0:
            raise DomainError(f'n_clients must be nonnegative, got {self.n_clients}')
        if not self.values:
            raise DomainError('a fleet needs at least one value')
        if len(set(self.values)) != len(self.values):
            raise DomainError(f'values must be distinct: {self.values}')
        for value in self.values:
            validate_label(value)
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f'seed must be a 64-bit nonnegative integer, got {self.seed}')
        if self.distribution is None:
            distribution = exponential_distribution(len(self.values), self.rate)
        else:
            distribution = [float(x) for x in self.distribution]
        if len(distribution) != len(self.values):
            raise DomainError('distribution and values differ in length')
        if any(x < 0 for x in distribution):
            raise DomainError('probabilities must be nonnegative')
        if abs(math.fsum(distribution) - 1.0) > 1e-9:
            raise DomainError(f'probabilities sum to {math.fsum(distribution)}, not 1')
        object.__setattr__(self, 'distribution', tuple(distribution))

    def client_id(self, index):
        return f'{self.client_prefix}-{index:06d}'


def client_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def generate_corpus(config: FleetConfig, client_range: Optional[Iterable[int]] = None):
    """Encode one report per client; a pure function of ``config``.

    ``client_range`` restricts generation to some client indices.
    """
    if client_range is None:
        client_range = range(config.n_clients)
    cumulative = np.cumsum(config.distribution)
    last = len(config.values) - 1
    reports = []
    for index in client_range:
        rng = client_rng(config.seed, index)
        pick = min(int(np.searchsorted(cumulative, rng.random(), side='right')), last)
        reports.append(encode_report(
            config.client_id(index),
            config.values[pick],
            config.params,
            rng=rng,
            secret=config.secret,
            labeled=config.labeled,
        ))
    logger.info('corpus generated', extra={
        'clients': len(reports), 'seed': config.seed,
        'params': config.params.fingerprint(),
    })
    return reports


def write_csv(reports, destination):
    """Write reports one per line; the true_value column only if any report is labeled."""
    labeled = any(report.is_labeled for report in reports)
    header = CSV_HEADER if labeled else CSV_HEADER[:-1]
    with open_text(destination, 'w') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for report in reports:
            row = [report.client_id, report.cohort, str(report.prr), str(report.irr)]
            if labeled:
                row.append(report.true_value or '')
            writer.writerow(row)


def read_csv(source, params: Optional[EncodingParams] = None):
    """Read a report CSV written by :func:`write_csv`.

    Bitstrings must be exactly ``params.k`` characters and cohorts must lie
    in ``[0, params.m)``. A missing or empty true_value yields an unlabeled report.
    """
    params = params or EncodingParams()
    name = source_name(source)
    reports = []
    with open_text(source) as stream:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header not in (CSV_HEADER, CSV_HEADER[:-1]):
            raise ReportParseError(f'unexpected header {header!r}', line=1, source=name)
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise ReportParseError(
                    f'expected {len(header)} columns, got {len(row)}', line=line, source=name)
            client_id, cohort_text, prr_text, irr_text = row[:4]
            label = row[4] if len(row) == 5 and row[4] else None
            if label is not None and FORBIDDEN_LABEL_CHARS & set(label):
                raise ReportParseError(f'invalid label {label!r}', line=line, source=name)
            try:
                cohort = int(cohort_text)
            except ValueError:
                raise ReportParseError(
                    f'cohort {cohort_text!r} is not an integer', line=line, source=name) from None
            if not 0 <= cohort < params.m:
                raise ReportParseError(
                    f'cohort {cohort} outside [0, {params.m})', line=line, source=name)
            prr = _parse_bits(prr_text, params.k, 'prr', line, name)
            irr = _parse_bits(irr_text, params.k, 'irr', line, name)
            reports.append(ClientReport(client_id, cohort, prr, irr, label))
    return reports


def _parse_bits(text, width, column, line, name):
    if len(text) != width:
        raise ReportParseError(
            f'{column} has {len(text)} bits, expected {width}', line=line, source=name)
    try:
        return Bitset.from_string(text)
    except DomainError:
        raise ReportParseError(f'{column} is not a bit string: {text!r}', line=line, source=name) from None

"""Per-on-bit-count constants and the TF-IDF arithmetic behind them.

For ``c >= 4`` the constant of a string with ``c`` on bits is
``log10(k / c)``; below that each step down multiplies by 1.1. For k = 32
this reproduces the published table:

    c  constant        c  constant
    1  1.20201279      10 0.50515
    2  1.0927389       11 0.4637573
    3  0.993399        12 0.425969
    4  0.90309         13 0.3912066
    5  0.80618         14 0.3590219
    6  0.727           15 0.329059
    7  0.660052        16 0.30103
    8  0.60206         17 0.274701
    9  0.550907

A string with no on bits contributes nothing.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from rappor.exceptions import DomainError

# Published values for k = 32, c = 1..17.
PUBLISHED_CONSTANTS = {
    1: 1.20201279, 2: 1.0927389, 3: 0.993399, 4: 0.90309, 5: 0.80618,
    6: 0.727, 7: 0.660052, 8: 0.60206, 9: 0.550907, 10: 0.50515,
    11: 0.4637573, 12: 0.425969, 13: 0.3912066, 14: 0.3590219,
    15: 0.329059, 16: 0.30103, 17: 0.274701,
}

CHAIN_FACTOR = 1.1
# Lowest count whose constant follows log10(k / c); counts below it chain off it.
CHAIN_ANCHOR = 4


@dataclass(frozen=True)
class ConstantTable:
    k: int
    weights: tuple

    def constant_for_count(self, count: int) -> float:
        if not 0 <= count <= self.k:
            raise DomainError(f'on-bit count {count} outside [0, {self.k}]')
        return self.weights[count]

    def tfidf_contribution(self, count: int, sample_size: int) -> float:
        if sample_size < 1:
            raise DomainError(f'sample size must be positive, got {sample_size}')
        return self.constant_for_count(count) / sample_size


def build_constant_table(k: int) -> ConstantTable:
    if k < CHAIN_ANCHOR:
        raise DomainError(f'k must be at least {CHAIN_ANCHOR}, got {k}')
    weights = [0.0] * (k + 1)
    for count in range(CHAIN_ANCHOR, k + 1):
        weights[count] = math.log10(k / count)
    for count in range(CHAIN_ANCHOR - 1, 0, -1):
        weights[count] = CHAIN_FACTOR * weights[count + 1]
    return ConstantTable(k=k, weights=tuple(weights))


def constant_for_count(table: ConstantTable, count: int) -> float:
    return table.constant_for_count(count)


def tfidf_contribution(table: ConstantTable, count: int, sample_size: int) -> float:
    return table.tfidf_contribution(count, sample_size)


def published_deviation(table: ConstantTable) -> float:
    """Largest absolute difference from the published constants (k = 32 only)."""
    return max(abs(table.weights[c] - value) for c, value in PUBLISHED_CONSTANTS.items())


@dataclass(frozen=True)
class SamplingCheck:
    count: int
    sample_sizes: tuple
    max_relative_deviation: float


def verify_constant_rule(reports, sample_sizes, table: ConstantTable, seed=0):
    """Audit the constant/sample-size rule on subsamples of a corpus.

    For every size S one subsample is drawn without replacement. Each PRR and
    IRR string in it contributes ``constant / S`` for its on-bit count; the
    mean contribution per count, scaled back by S, must equal the constant.
    """
    if not reports:
        raise DomainError('cannot audit an empty corpus')
    for size in sample_sizes:
        if not 1 <= size <= len(reports):
            raise DomainError(f'sample size {size} outside [1, {len(reports)}]')
    rng = np.random.default_rng(seed)
    observed = {}
    for size in sample_sizes:
        picked = rng.choice(len(reports), size=size, replace=False)
        contributions = {}
        for index in picked:
            report = reports[index]
            for bits in (report.prr, report.irr):
                count = bits.popcount()
                contributions.setdefault(count, []).append(table.tfidf_contribution(count, size))
        for count, values in contributions.items():
            scaled = math.fsum(values) / len(values) * size
            expected = table.constant_for_count(count)
            deviation = abs(scaled - expected) / expected if expected else abs(scaled)
            sizes, worst = observed.get(count, ((), 0.0))
            observed[count] = (sizes + (size,), max(worst, deviation))
    return [
        SamplingCheck(count=count, sample_sizes=sizes, max_relative_deviation=worst)
        for count, (sizes, worst) in sorted(observed.items())
    ]


# Generic TF-IDF and the randomized-response survey estimator.

def tf(term_count: int, doc_length: int) -> float:
    if doc_length < 1:
        raise DomainError(f'document length must be positive, got {doc_length}')
    if not 0 <= term_count <= doc_length:
        raise DomainError(f'term count {term_count} outside [0, {doc_length}]')
    return term_count / doc_length


def idf(total_docs: int, docs_containing: int) -> float:
    if total_docs < 1:
        raise DomainError(f'need at least one document, got {total_docs}')
    return math.log10(total_docs / (1 + docs_containing))


def tfidf(term_count, doc_length, total_docs, docs_containing):
    return tf(term_count, doc_length) * idf(total_docs, docs_containing)


@dataclass(frozen=True)
class RRSurvey:
    yes_fraction: float
    truth_probability: float

    def __post_init__(self):
        if not 0.0 <= self.yes_fraction <= 1.0:
            raise DomainError(f'yes fraction must be in [0, 1], got {self.yes_fraction}')
        if not 0.0 <= self.truth_probability <= 1.0:
            raise DomainError(f'truth probability must be in [0, 1], got {self.truth_probability}')
        if self.truth_probability == 0.5:
            raise DomainError('truth probability 1/2 carries no information')


RANGE_TOLERANCE = 1e-12


class ProportionEstimate(NamedTuple):
    value: float
    out_of_range: bool


def estimate_true_proportion(survey: RRSurvey) -> ProportionEstimate:
    """(YA + p - 1) / (2p - 1), clamped to [0, 1]."""
    p = survey.truth_probability
    raw = (survey.yes_fraction + p - 1) / (2 * p - 1)
    clamped = min(max(raw, 0.0), 1.0)
    # Rounding noise at the interval ends is not an out-of-range estimate.
    out_of_range = not -RANGE_TOLERANCE <= raw <= 1.0 + RANGE_TOLERANCE
    return ProportionEstimate(value=clamped, out_of_range=out_of_range)

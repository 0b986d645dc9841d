"""The central store: quantized weighted sums and per-label counts, nothing else.

File layout (UTF-8, LF):

    ARA-STORE v1 k=32 params=<16 hex digits> total=<n>
    <key>\t<label>:<count>[,<label>:<count>...]

Entries are sorted by numeric key, labels lexicographically. Cohorts,
bitsets and client ids never reach the store.
"""
import logging
import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from rappor.exceptions import DomainError, ReportParseError
from rappor.fleet import FORBIDDEN_LABEL_CHARS, validate_label
from rappor.textio import open_text, source_name

from .weighting import weighted_sum_of_report

logger = logging.getLogger(__name__)

STORE_HEADER = 'ARA-STORE v1 k={k} params={fingerprint} total={total}'
HEADER_RE = re.compile(r'ARA-STORE v1 k=(\d+) params=([0-9a-f]{16}) total=(\d+)', re.ASCII)
KEY_RE = re.compile(r'(0|[1-9]\d*)\.\d{5}', re.ASCII)
COUNT_RE = re.compile(r'[1-9]\d*', re.ASCII)


class StoreFormatError(ReportParseError):
    pass


@dataclass
class StoreEntry:
    key: str
    counts: dict = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())

    def modal_label(self) -> str:
        """Most frequent label; ties go to the lexicographically smallest."""
        return min(self.counts, key=lambda label: (-self.counts[label], label))


@dataclass
class CentralStore:
    k: int
    params_fingerprint: str
    entries: dict = field(default_factory=dict)
    total_training_reports: int = 0

    @classmethod
    def for_params(cls, params):
        return cls(k=params.k, params_fingerprint=params.fingerprint())

    def ingest(self, report, table):
        if not report.is_labeled:
            raise DomainError(f'report from {report.client_id} has no true value')
        validate_label(report.true_value)
        if table.k != self.k:
            raise DomainError(f'constant table k={table.k} does not match store k={self.k}')
        key = weighted_sum_of_report(report, table).key
        entry = self.entries.setdefault(key, StoreEntry(key))
        entry.counts[report.true_value] = entry.counts.get(report.true_value, 0) + 1
        self.total_training_reports += 1
        return self

    def ingest_all(self, reports, table):
        for report in reports:
            self.ingest(report, table)
        logger.info('store built', extra={
            'entries': len(self.entries), 'total': self.total_training_reports,
        })
        return self

    def lookup(self, key) -> Optional[StoreEntry]:
        return self.entries.get(key)

    def merge(self, other):
        """Sum the counts of two partial stores built under the same parameters."""
        if (self.k, self.params_fingerprint) != (other.k, other.params_fingerprint):
            raise DomainError('cannot merge stores built with different encoding parameters')
        merged = CentralStore(self.k, self.params_fingerprint)
        for store in (self, other):
            for key, entry in store.entries.items():
                target = merged.entries.setdefault(key, StoreEntry(key))
                for label, count in entry.counts.items():
                    target.counts[label] = target.counts.get(label, 0) + count
        merged.total_training_reports = self.total_training_reports + other.total_training_reports
        return merged

    def save(self, destination):
        with open_text(destination, 'w') as stream:
            stream.write(STORE_HEADER.format(
                k=self.k, fingerprint=self.params_fingerprint,
                total=self.total_training_reports) + '\n')
            for key in sorted(self.entries, key=Decimal):
                counts = self.entries[key].counts
                pairs = ','.join(f'{label}:{counts[label]}' for label in sorted(counts))
                stream.write(f'{key}\t{pairs}\n')

    @classmethod
    def load(cls, source, expected_fingerprint=None):
        name = source_name(source)
        with open_text(source) as stream:
            lines = stream.read().split('\n')
        if lines and lines[-1] == '':
            lines.pop()
        if not lines:
            raise StoreFormatError('missing header', line=1, source=name)
        match = HEADER_RE.fullmatch(lines[0])
        if match is None:
            raise StoreFormatError(f'malformed header {lines[0]!r}', line=1, source=name)
        k, fingerprint, total = int(match[1]), match[2], int(match[3])
        if expected_fingerprint is not None and fingerprint != expected_fingerprint:
            raise StoreFormatError(
                f'params fingerprint {fingerprint} does not match {expected_fingerprint}',
                line=1, source=name)
        store = cls(k, fingerprint)
        for number, text in enumerate(lines[1:], start=2):
            key, counts = _parse_entry(text, number, name)
            if key in store.entries:
                raise StoreFormatError(f'duplicate key {key}', line=number, source=name)
            store.entries[key] = StoreEntry(key, counts)
        store.total_training_reports = sum(entry.total() for entry in store.entries.values())
        if store.total_training_reports != total:
            raise StoreFormatError(
                f'header total {total} != {store.total_training_reports} counted',
                line=1, source=name)
        return store


def _parse_entry(text, number, name):
    key, tab, rest = text.partition('\t')
    if not tab or not KEY_RE.fullmatch(key):
        raise StoreFormatError(f'malformed entry {text!r}', line=number, source=name)
    counts = {}
    for pair in rest.split(','):
        label, colon, count = pair.rpartition(':')
        if not colon or not label or FORBIDDEN_LABEL_CHARS & set(label):
            raise StoreFormatError(f'malformed label count {pair!r}', line=number, source=name)
        if not COUNT_RE.fullmatch(count):
            raise StoreFormatError(f'count must be a positive integer, got {count!r}',
                                   line=number, source=name)
        if label in counts:
            raise StoreFormatError(f'duplicate label {label}', line=number, source=name)
        counts[label] = int(count)
    return key, counts


def load_store(source, params=None):
    """Load a store, checking it was built with ``params`` when given."""
    return CentralStore.load(source, params.fingerprint() if params is not None else None)

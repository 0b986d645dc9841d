"""Matching unlabeled reports against the central store."""
import csv
import logging
from dataclasses import dataclass, field
from typing import Optional

from aggregator.weighting import weighted_sum_of_report
from rappor.exceptions import DomainError
from rappor.textio import open_text

logger = logging.getLogger(__name__)

# major_value of a batch in which nothing matched.
NO_MAJOR = ''


def majority_label(counts) -> str:
    """Label with the largest count, ties to the lexicographically smallest; NO_MAJOR if empty."""
    positive = {label: count for label, count in counts.items() if count > 0}
    if not positive:
        return NO_MAJOR
    return min(positive, key=lambda label: (-positive[label], label))


@dataclass(frozen=True)
class AnalysisReport:
    sample_size: int
    matched: int
    credits: dict = field(default_factory=dict)
    major_value: str = NO_MAJOR
    achievement_pct: float = 0.0

    @property
    def unmatched(self) -> int:
        return self.sample_size - self.matched


def match_report(report, store, table) -> Optional[str]:
    entry = store.lookup(weighted_sum_of_report(report, table).key)
    if entry is None:
        return None
    return entry.modal_label()


def analyze_batch(reports, store, table) -> AnalysisReport:
    """Credit each matched report to the modal label of its store entry."""
    if not reports:
        raise DomainError('cannot analyze an empty batch')
    credits = {}
    for report in reports:
        label = match_report(report, store, table)
        if label is not None:
            credits[label] = credits.get(label, 0) + 1
    major = majority_label(credits)
    sample_size = len(reports)
    result = AnalysisReport(
        sample_size=sample_size,
        matched=sum(credits.values()),
        credits=dict(sorted(credits.items())),
        major_value=major,
        achievement_pct=100.0 * credits.get(major, 0) / sample_size,
    )
    logger.debug('batch analyzed', extra={
        'sample_size': sample_size, 'matched': result.matched, 'major': major,
    })
    return result


ANALYSIS_HEADER = ['major_value', 'sample_size', 'matched', 'achievement_pct', 'credits']


def write_analysis_csv(report: AnalysisReport, destination):
    """One-row CSV; credits are written as ``label:count`` pairs joined by ';'."""
    credits = ';'.join(f'{label}:{count}' for label, count in sorted(report.credits.items()))
    with open_text(destination, 'w') as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(ANALYSIS_HEADER)
        writer.writerow([report.major_value, report.sample_size, report.matched,
                         repr(report.achievement_pct), credits])

"""Domain model for longitudinal scan collections and transition analysis.

A cohort is a validated set of scans, each belonging to one subject at one
visit with a three-stage diagnosis label. Subjects are viewed as visit
series ordered by visit index; a "transition" is a label change between two
consecutive visits of the same subject.
"""

from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Iterable, Mapping

from .errors import CohortSplitError, EmptyInput


class DiagnosisLabel(str, Enum):
    """The three diagnosis stages, totally ordered by progression CN < MCI < AD."""

    CN = "CN"
    MCI = "MCI"
    AD = "AD"

    @property
    def stage_level(self) -> int:
        """Progression level: CN=0, MCI=1, AD=2."""
        return _STAGE_LEVEL[self]

    @classmethod
    def parse(cls, text: str) -> "DiagnosisLabel":
        """Parse a label, case-insensitively. Raises ValueError for anything
        other than CN/MCI/AD."""
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown diagnosis label: {text!r}") from None


_STAGE_LEVEL = {DiagnosisLabel.CN: 0, DiagnosisLabel.MCI: 1, DiagnosisLabel.AD: 2}

#: Labels in progression order, used for deterministic tie-breaking.
PROGRESSION_ORDER = (DiagnosisLabel.CN, DiagnosisLabel.MCI, DiagnosisLabel.AD)


class CohortError(CohortSplitError):
    """Base class for cohort construction errors."""


class DuplicateScanId(CohortError):
    def __init__(self, scan_id: str):
        super().__init__(f"duplicate scan_id: {scan_id!r}")
        self.scan_id = scan_id


class DuplicateVisit(CohortError):
    def __init__(self, subject_id: str, visit_index: int):
        super().__init__(
            f"subject {subject_id!r} has more than one scan at visit {visit_index}"
        )
        self.subject_id = subject_id
        self.visit_index = visit_index


@dataclass(frozen=True)
class ScanRecord:
    """One scan: identifiers, visit ordinal, optional acquisition date, label.

    Visit ordering uses visit_index only; acquisition_date is metadata and
    never drives ordering.
    """

    scan_id: str
    subject_id: str
    visit_index: int
    acquisition_date: date | None
    label: DiagnosisLabel

    def __post_init__(self):
        if self.visit_index < 0:
            raise ValueError(f"visit_index must be non-negative, got {self.visit_index}")


@dataclass(frozen=True)
class SubjectSeries:
    """All scans of one subject, sorted ascending by visit_index."""

    subject_id: str
    scans: tuple[ScanRecord, ...]

    @property
    def last_visit(self) -> int:
        return self.scans[-1].visit_index

    @property
    def last_scan(self) -> ScanRecord:
        return self.scans[-1]

    @property
    def labels(self) -> tuple[DiagnosisLabel, ...]:
        return tuple(s.label for s in self.scans)

    def __len__(self) -> int:
        return len(self.scans)


@dataclass(frozen=True)
class Cohort:
    """Validated collection of scans with per-subject visit series.

    Immutable after construction; build via build_cohort(). Equality ignores
    the order the input records arrived in.
    """

    scans: tuple[ScanRecord, ...]  # sorted by scan_id
    subjects: Mapping[str, SubjectSeries] = field(compare=False)
    _by_scan_id: Mapping[str, ScanRecord] = field(compare=False, repr=False)

    @property
    def n_scans(self) -> int:
        return len(self.scans)

    @property
    def n_subjects(self) -> int:
        return len(self.subjects)

    @property
    def scan_ids(self) -> tuple[str, ...]:
        return tuple(s.scan_id for s in self.scans)

    def scan(self, scan_id: str) -> ScanRecord:
        return self._by_scan_id[scan_id]

    def max_series_length(self) -> int:
        return max(len(series) for series in self.subjects.values())


def build_cohort(records: Iterable[ScanRecord]) -> Cohort:
    """Validate records into a Cohort.

    Rejects duplicate scan ids and replicated same-visit scans for a subject.
    The result is a pure function of the record multiset: input order does
    not matter.
    """
    records = list(records)
    if not records:
        raise EmptyInput("cannot build a cohort from zero records")

    by_scan_id: dict[str, ScanRecord] = {}
    per_subject: dict[str, dict[int, ScanRecord]] = {}
    for rec in records:
        if rec.scan_id in by_scan_id:
            raise DuplicateScanId(rec.scan_id)
        by_scan_id[rec.scan_id] = rec
        visits = per_subject.setdefault(rec.subject_id, {})
        if rec.visit_index in visits:
            raise DuplicateVisit(rec.subject_id, rec.visit_index)
        visits[rec.visit_index] = rec

    subjects = {
        subject_id: SubjectSeries(
            subject_id=subject_id,
            scans=tuple(visits[v] for v in sorted(visits)),
        )
        for subject_id, visits in sorted(per_subject.items())
    }
    scans = tuple(by_scan_id[sid] for sid in sorted(by_scan_id))
    return Cohort(scans=scans, subjects=subjects, _by_scan_id=by_scan_id)


@dataclass(frozen=True)
class TransitionStats:
    """Counts of diagnosis-label changes between consecutive visits.

    last_visit_transitions counts only each subject's final consecutive pair.
    Subjects with a single scan contribute zero pairs.
    """

    total_transitions: int
    last_visit_transitions: int
    consecutive_pairs: int
    per_transition_kind: Mapping[tuple[DiagnosisLabel, DiagnosisLabel], int]


def count_transitions(cohort: Cohort) -> TransitionStats:
    """Count label changes over consecutive sorted visits of every subject."""
    total = 0
    last_visit = 0
    pairs = 0
    per_kind: Counter[tuple[DiagnosisLabel, DiagnosisLabel]] = Counter()
    for series in cohort.subjects.values():
        labels = series.labels
        n_pairs = len(labels) - 1
        pairs += n_pairs
        for i in range(n_pairs):
            if labels[i] != labels[i + 1]:
                total += 1
                per_kind[(labels[i], labels[i + 1])] += 1
                if i == n_pairs - 1:
                    last_visit += 1
    return TransitionStats(
        total_transitions=total,
        last_visit_transitions=last_visit,
        consecutive_pairs=pairs,
        per_transition_kind=dict(per_kind),
    )


def filter_transition_subjects(cohort: Cohort) -> set[str]:
    """Subjects whose final consecutive visit pair has differing labels.

    These are the subjects whose last visit cannot be predicted by repeating
    the previous diagnosis.
    """
    out: set[str] = set()
    for subject_id, series in cohort.subjects.items():
        labels = series.labels
        if len(labels) >= 2 and labels[-1] != labels[-2]:
            out.add(subject_id)
    return out

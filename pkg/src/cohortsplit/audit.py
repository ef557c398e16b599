"""Structural leakage audit for split assignments.

Leakage here means a subject whose scans land on both sides of the
train∪val / test boundary: a model can then recognize the subject rather
than the disease stage. Sharing a subject between train and val is model
selection, not leakage, and is deliberately not flagged.

The audit also checks which scheme an assignment is *consistent* with —
consistency, not provenance: a one-scan-per-subject cohort split by scan is
indistinguishable from a subject-level split, and is reported as such.
"""

from dataclasses import dataclass
from typing import Mapping

from .cohort import Cohort
from .splitting import (
    BY_SUBJECT,
    BY_VISIT_HISTORY,
    Partition,
    SplitAssignment,
)

#: inferred_scheme value when neither subject-level nor visit-history
#: structure holds.
OTHER_SCHEME = "random_by_scan_or_other"

_PARTITION_ORDER = (Partition.TRAIN, Partition.VAL, Partition.TEST)


@dataclass(frozen=True)
class AuditReport:
    """Outcome of a structural split audit.

    leaked_subjects pairs each offending subject with the partitions its
    scans span; subject_disjoint is true iff that list is empty.
    """

    leaked_subjects: tuple[tuple[str, tuple[str, ...]], ...]
    subject_disjoint: bool
    visit_history_consistent: bool
    inferred_scheme: str
    scan_counts: Mapping[str, int]
    subject_counts: Mapping[str, int]

    def to_doc(self) -> dict:
        """Plain-dict form for the structured sidecar format."""
        return {
            "leaked_subjects": [
                {"subject_id": sid, "partitions": list(parts)}
                for sid, parts in self.leaked_subjects
            ],
            "n_leaked_subjects": len(self.leaked_subjects),
            "subject_disjoint": self.subject_disjoint,
            "visit_history_consistent": self.visit_history_consistent,
            "inferred_scheme": self.inferred_scheme,
            "scan_counts": dict(self.scan_counts),
            "subject_counts": dict(self.subject_counts),
        }


def audit_split(cohort: Cohort, assignment: SplitAssignment) -> AuditReport:
    """Audit an assignment for subject-level leakage and scheme consistency.

    Read-only; neither argument is modified. The assignment must be valid
    for the cohort (total, single-valued).
    """
    partitions_of: dict[str, set[Partition]] = {}
    for rec in cohort.scans:
        part = assignment.mapping[rec.scan_id]
        partitions_of.setdefault(rec.subject_id, set()).add(part)

    leaked = []
    for subject_id in sorted(partitions_of):
        parts = partitions_of[subject_id]
        trains_side = parts & {Partition.TRAIN, Partition.VAL}
        if trains_side and Partition.TEST in parts:
            spanned = tuple(p.value for p in _PARTITION_ORDER if p in parts)
            leaked.append((subject_id, spanned))

    scan_counts = {p.value: 0 for p in _PARTITION_ORDER}
    for part in assignment.mapping.values():
        scan_counts[part.value] += 1
    scan_counts["train+val"] = scan_counts["train"] + scan_counts["val"]
    subject_counts = {
        p.value: sum(1 for parts in partitions_of.values() if p in parts)
        for p in _PARTITION_ORDER
    }
    # union, not a sum: a leaky subject may sit in both train and val
    subject_counts["train+val"] = sum(
        1
        for parts in partitions_of.values()
        if parts & {Partition.TRAIN, Partition.VAL}
    )

    subject_disjoint = not leaked
    vh_consistent = _visit_history_consistent(cohort, assignment)
    if subject_disjoint:
        inferred = BY_SUBJECT
    elif vh_consistent:
        inferred = BY_VISIT_HISTORY
    else:
        inferred = OTHER_SCHEME

    return AuditReport(
        leaked_subjects=tuple(leaked),
        subject_disjoint=subject_disjoint,
        visit_history_consistent=vh_consistent,
        inferred_scheme=inferred,
        scan_counts=scan_counts,
        subject_counts=subject_counts,
    )


def _visit_history_consistent(cohort: Cohort, assignment: SplitAssignment) -> bool:
    """True iff test is exactly one last-visit scan per test-represented
    subject, with that subject's earlier scans all in train∪val."""
    test_subjects = {
        cohort.scan(sid).subject_id
        for sid, part in assignment.mapping.items()
        if part == Partition.TEST
    }
    for subject_id in test_subjects:
        series = cohort.subjects[subject_id]
        for rec in series.scans[:-1]:
            if assignment.mapping[rec.scan_id] == Partition.TEST:
                return False
        if assignment.mapping[series.last_scan.scan_id] != Partition.TEST:
            return False
    return True


@dataclass(frozen=True)
class CountMismatch:
    """One divergence between an expected and an observed partition count."""

    table: str  # "scans" or "subjects"
    partition: str  # "train", "val", "test", or "train+val"
    expected: int
    actual: int

    @property
    def delta(self) -> int:
        return self.actual - self.expected

    def __str__(self) -> str:
        return (
            f"{self.table}[{self.partition}]: expected {self.expected}, "
            f"got {self.actual} (delta {self.delta:+d})"
        )


def compare_counts(
    report: AuditReport, expected: Mapping[str, Mapping[str, int]]
) -> list[CountMismatch]:
    """Check observed partition counts against an expectation table.

    `expected` maps "scans"/"subjects" to {partition: count}; the pseudo
    partition "train+val" addresses the pool side as a whole (for subjects,
    the union, not the sum). Missing entries are unchecked; an empty table
    vacuously matches.
    """
    observed = {"scans": dict(report.scan_counts), "subjects": dict(report.subject_counts)}
    mismatches = []
    for table in sorted(expected):
        for partition in sorted(expected[table]):
            want = expected[table][partition]
            got = observed[table][partition]
            if got != want:
                mismatches.append(
                    CountMismatch(table=table, partition=partition, expected=want, actual=got)
                )
    return mismatches

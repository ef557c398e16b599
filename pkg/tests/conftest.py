"""Shared test helpers: compact cohort builders and a random-cohort maker.

The random maker deliberately uses the stdlib random module, not numpy, so
property tests exercise the library through an independent code path.
"""

import random

from cohortsplit.cohort import Cohort, DiagnosisLabel, ScanRecord, build_cohort

LABELS = (DiagnosisLabel.CN, DiagnosisLabel.MCI, DiagnosisLabel.AD)


def cohort_from_labels(labels_per_subject) -> Cohort:
    """Build a cohort from label sequences.

    Accepts a list of per-subject label lists (subjects named S01, S02, ...)
    or a dict subject_id -> label list. Labels are strings or DiagnosisLabel;
    visit indices run 0..n-1; scan ids are `<subject>-<visit>`.
    """
    if isinstance(labels_per_subject, dict):
        items = sorted(labels_per_subject.items())
    else:
        width = max(2, len(str(len(labels_per_subject))))
        items = [
            (f"S{i + 1:0{width}d}", seq) for i, seq in enumerate(labels_per_subject)
        ]
    records = []
    for subject_id, seq in items:
        for visit, label in enumerate(seq):
            if not isinstance(label, DiagnosisLabel):
                label = DiagnosisLabel.parse(label)
            records.append(
                ScanRecord(
                    scan_id=f"{subject_id}-{visit}",
                    subject_id=subject_id,
                    visit_index=visit,
                    acquisition_date=None,
                    label=label,
                )
            )
    return build_cohort(records)


def scored_cohort_from_matrix(counts):
    """Expand a 3×3 confusion grid (rows = predicted, cols = true, both in
    AD/MCI/CN order) into (cohort, all-test assignment, predictions dict).

    Each cell becomes that many single-visit subjects with the column's true
    label, predicted as the row's label.
    """
    from cohortsplit.splitting import Partition, SplitAssignment

    order = (DiagnosisLabel.AD, DiagnosisLabel.MCI, DiagnosisLabel.CN)
    records = []
    mapping = {}
    predictions = {}
    n = 0
    for r, predicted in enumerate(order):
        for c, true in enumerate(order):
            for _ in range(counts[r][c]):
                sid = f"S{n:04d}"
                scan_id = f"{sid}-0"
                records.append(ScanRecord(scan_id, sid, 0, None, true))
                mapping[scan_id] = Partition.TEST
                predictions[scan_id] = predicted
                n += 1
    cohort = build_cohort(records)
    return cohort, SplitAssignment("manual", 0, mapping), predictions


def random_label_cohort(
    rng: random.Random,
    n_subjects: int | None = None,
    max_visits: int = 5,
    p_change: float = 0.25,
) -> Cohort:
    """A random cohort with arbitrary (not necessarily monotone) label walks."""
    if n_subjects is None:
        n_subjects = rng.randint(2, 12)
    subjects = []
    for _ in range(n_subjects):
        n_visits = rng.randint(1, max_visits)
        label = rng.choice(LABELS)
        seq = [label]
        for _ in range(n_visits - 1):
            if rng.random() < p_change:
                label = rng.choice([l for l in LABELS if l != label])
            seq.append(label)
        subjects.append(seq)
    return cohort_from_labels(subjects)

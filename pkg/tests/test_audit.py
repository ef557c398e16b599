import copy
import random

from cohortsplit.audit import OTHER_SCHEME, audit_split, compare_counts
from cohortsplit.cohort import DiagnosisLabel, ScanRecord, build_cohort
from cohortsplit.splitting import (
    Partition,
    SplitAssignment,
    SplitRatios,
    UnreachableRatios,
    reference_ratios,
    split_by_subject,
    split_by_visit_history,
    split_random_by_scan,
)
from conftest import cohort_from_labels, random_label_cohort

THIRDS = SplitRatios(train=1 / 3, val=1 / 3, test=1 / 3)


def test_by_subject_output_audits_clean_over_many_cohorts():
    rng = random.Random(17)
    for trial in range(100):
        cohort = random_label_cohort(rng, n_subjects=rng.randint(6, 20))
        try:
            assignment = split_by_subject(cohort, THIRDS, seed=trial)
        except UnreachableRatios:
            continue
        report = audit_split(cohort, assignment)
        assert report.subject_disjoint
        assert report.leaked_subjects == ()
        assert report.inferred_scheme == "by_subject"


def test_moving_one_scan_flips_the_verdict():
    rng = random.Random(18)
    flipped = 0
    trials = 0
    while trials < 60:
        cohort = random_label_cohort(rng, n_subjects=rng.randint(6, 16), max_visits=4)
        try:
            assignment = split_by_subject(cohort, THIRDS, seed=trials)
        except UnreachableRatios:
            continue
        # pick a multi-visit test subject and move one of its scans to train
        candidates = [
            sid
            for sid, series in cohort.subjects.items()
            if len(series) >= 2
            and assignment.mapping[series.scans[0].scan_id] == Partition.TEST
        ]
        if not candidates:
            continue
        trials += 1
        victim = cohort.subjects[rng.choice(candidates)]
        moved_scan = rng.choice(victim.scans).scan_id
        mutated = dict(assignment.mapping)
        mutated[moved_scan] = Partition.TRAIN
        report = audit_split(cohort, SplitAssignment("mutated", 0, mutated))
        if not report.subject_disjoint:
            flipped += 1
        assert any(sid == victim.subject_id for sid, _ in report.leaked_subjects)
    assert flipped == trials


def test_visit_history_flags():
    cohort = cohort_from_labels([["CN", "CN", "MCI"], ["AD", "AD"], ["MCI", "MCI"]])
    assignment, _ = split_by_visit_history(cohort, 0.0, seed=0)
    report = audit_split(cohort, assignment)
    assert report.visit_history_consistent
    assert not report.subject_disjoint  # multi-visit subjects span by design
    assert report.inferred_scheme == "by_visit_history"
    assert len(report.leaked_subjects) == 3


def test_random_split_neither_flag():
    # large enough that a random assignment is essentially never vh-shaped
    cohort = cohort_from_labels([["CN", "MCI", "AD"] for _ in range(10)])
    assignment = split_random_by_scan(cohort, THIRDS, seed=2)
    report = audit_split(cohort, assignment)
    assert not report.subject_disjoint
    assert not report.visit_history_consistent
    assert report.inferred_scheme == OTHER_SCHEME


def test_single_visit_cohort_split_by_scan_reads_as_by_subject():
    # consistency, not provenance: with one scan per subject, a by-scan split
    # is indistinguishable from a subject-level one
    cohort = cohort_from_labels([["CN"] for _ in range(9)])
    assignment = split_random_by_scan(cohort, THIRDS, seed=0)
    report = audit_split(cohort, assignment)
    assert report.subject_disjoint
    assert report.inferred_scheme == "by_subject"


def test_train_val_sharing_is_not_leakage():
    cohort = cohort_from_labels({"a": ["CN", "CN"], "b": ["MCI", "MCI"], "c": ["AD", "AD"]})
    mapping = {
        "a-0": Partition.TRAIN,
        "a-1": Partition.VAL,  # same subject in train and val: allowed
        "b-0": Partition.TRAIN,
        "b-1": Partition.TRAIN,
        "c-0": Partition.TEST,
        "c-1": Partition.TEST,
    }
    report = audit_split(cohort, SplitAssignment("manual", 0, mapping))
    assert report.subject_disjoint
    assert report.leaked_subjects == ()


def test_partition_counts_tables():
    cohort = cohort_from_labels({"a": ["CN", "CN"], "b": ["MCI"], "c": ["AD", "AD"]})
    mapping = {
        "a-0": Partition.TRAIN,
        "a-1": Partition.TEST,  # leaky subject counted on both sides
        "b-0": Partition.VAL,
        "c-0": Partition.TEST,
        "c-1": Partition.TEST,
    }
    report = audit_split(cohort, SplitAssignment("manual", 0, mapping))
    assert report.scan_counts == {"train": 1, "val": 1, "test": 3, "train+val": 2}
    assert report.subject_counts == {"train": 1, "val": 1, "test": 2, "train+val": 2}
    assert [sid for sid, _ in report.leaked_subjects] == ["a"]
    assert dict(report.leaked_subjects)["a"] == ("train", "test")


def test_audit_is_read_only():
    cohort = cohort_from_labels([["CN", "MCI"], ["AD", "AD"], ["CN", "CN"]])
    assignment = split_random_by_scan(cohort, THIRDS, seed=5)
    before = copy.deepcopy(dict(assignment.mapping))
    scans_before = cohort.scans
    audit_split(cohort, assignment)
    assert dict(assignment.mapping) == before
    assert cohort.scans is scans_before


def _reference_shaped_by_subject_fixture():
    """657 subjects / 2,731 scans where an exact 484/173-subject split exists:
    test side 35x3 + 138x4 = 657 scans, pool side 138x5 + 346x4 = 2,074."""
    sizes = [3] * 35 + [4] * 138 + [5] * 138 + [4] * 346
    assert len(sizes) == 657 and sum(sizes) == 2731
    records = []
    mapping = {}
    for i, n_visits in enumerate(sizes):
        sid = f"S{i:03d}"
        part = Partition.TEST if i < 173 else Partition.TRAIN
        for v in range(n_visits):
            scan_id = f"{sid}-{v}"
            records.append(
                ScanRecord(scan_id, sid, v, None, DiagnosisLabel.CN)
            )
            mapping[scan_id] = part
    return build_cohort(records), SplitAssignment("by_subject", 0, mapping)


def test_compare_counts_reference_expectation_matches():
    cohort, assignment = _reference_shaped_by_subject_fixture()
    report = audit_split(cohort, assignment)
    expected = {
        "scans": {"train+val": 2074, "test": 657},
        "subjects": {"train+val": 484, "test": 173},
    }
    assert compare_counts(report, expected) == []


def test_compare_counts_off_by_one_and_empty():
    cohort, assignment = _reference_shaped_by_subject_fixture()
    report = audit_split(cohort, assignment)
    mismatches = compare_counts(report, {"scans": {"test": 658}})
    assert len(mismatches) == 1
    m = mismatches[0]
    assert (m.table, m.partition, m.expected, m.actual, m.delta) == (
        "scans", "test", 658, 657, -1
    )
    assert "test" in str(m)
    assert compare_counts(report, {}) == []

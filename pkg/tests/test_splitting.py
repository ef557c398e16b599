import random

import pytest

from cohortsplit.splitting import (
    CohortTooSmall,
    Partition,
    SplitRatios,
    TooFewSubjects,
    UnreachableRatios,
    group_kfold,
    reference_ratios,
    split_by_subject,
    split_by_visit_history,
    split_random_by_scan,
)
from conftest import cohort_from_labels, random_label_cohort

THIRDS = SplitRatios(train=1 / 3, val=1 / 3, test=1 / 3)


def _partition_sets(cohort, assignment):
    """subject_id -> set of partitions its scans landed in."""
    out = {}
    for rec in cohort.scans:
        out.setdefault(rec.subject_id, set()).add(assignment.mapping[rec.scan_id])
    return out


# --- ratios ---------------------------------------------------------------

def test_ratios_validation():
    SplitRatios(train=0.7, val=0.1, test=0.2)
    SplitRatios(train=0.8, val=0.0, test=0.2)  # val may be zero
    with pytest.raises(ValueError):
        SplitRatios(train=0.8, val=0.1, test=0.2)  # sums to 1.1
    with pytest.raises(ValueError):
        SplitRatios(train=0.0, val=0.5, test=0.5)
    with pytest.raises(ValueError):
        SplitRatios(train=0.5, val=0.5, test=0.0)


def test_reference_ratios_recover_test_pool_sizes():
    r = reference_ratios()
    assert abs(r.train + r.val + r.test - 1.0) < 1e-12
    assert round(2731 * r.test) == 657
    assert round(2731 * (r.train + r.val)) == 2074


# --- random by scan -------------------------------------------------------

def test_random_split_exact_thirds_on_three_scans():
    cohort = cohort_from_labels({"a": ["CN"], "b": ["MCI"], "c": ["AD"]})
    assignment = split_random_by_scan(cohort, THIRDS, seed=0)
    counts = assignment.counts()
    assert counts == {Partition.TRAIN: 1, Partition.VAL: 1, Partition.TEST: 1}


def test_random_split_sizes_hit_integer_targets():
    rng = random.Random(5)
    for _ in range(50):
        cohort = random_label_cohort(rng, n_subjects=rng.randint(3, 15))
        if cohort.n_scans < 3:
            continue
        ratios = SplitRatios(train=0.6, val=0.2, test=0.2)
        counts = split_random_by_scan(cohort, ratios, seed=1).counts()
        n = cohort.n_scans
        n_test = int(n * 0.2 + 0.5)
        n_val = int(n * 0.2 + 0.5)
        assert counts[Partition.TEST] == n_test
        assert counts[Partition.VAL] == n_val
        assert counts[Partition.TRAIN] == n - n_test - n_val


def test_random_split_requires_three_scans():
    cohort = cohort_from_labels({"a": ["CN", "MCI"]})
    with pytest.raises(CohortTooSmall):
        split_random_by_scan(cohort, THIRDS, seed=0)


def test_random_split_varies_with_seed():
    cohort = cohort_from_labels([["CN", "MCI", "AD", "AD"] for _ in range(6)])
    seen = set()
    for seed in range(100):
        assignment = split_random_by_scan(cohort, THIRDS, seed)
        seen.add(tuple(sorted((s, p.value) for s, p in assignment.mapping.items())))
    assert len(seen) >= 99


def test_random_split_deterministic():
    cohort = cohort_from_labels([["CN", "MCI", "AD"] for _ in range(5)])
    a = split_random_by_scan(cohort, THIRDS, seed=42)
    b = split_random_by_scan(cohort, THIRDS, seed=42)
    assert a.mapping == b.mapping


# --- by subject -----------------------------------------------------------

def test_by_subject_never_splits_a_subject():
    rng = random.Random(21)
    for trial in range(50):
        cohort = random_label_cohort(rng, n_subjects=10, max_visits=4)
        assignment = split_by_subject(cohort, THIRDS, seed=trial)
        for sid, parts in _partition_sets(cohort, assignment).items():
            assert len(parts) == 1, f"subject {sid} spans {parts}"


def test_by_subject_scan_counts_within_max_series_length():
    rng = random.Random(22)
    for trial in range(50):
        cohort = random_label_cohort(rng, n_subjects=rng.randint(6, 20), max_visits=5)
        ratios = SplitRatios(train=0.6, val=0.15, test=0.25)
        try:
            assignment = split_by_subject(cohort, ratios, seed=trial)
        except UnreachableRatios:
            continue  # tiny cohort with a long series; legitimately refused
        counts = assignment.counts()
        tol = cohort.max_series_length()
        n = cohort.n_scans
        for part, frac in [(Partition.TEST, 0.25), (Partition.VAL, 0.15)]:
            target = int(n * frac + 0.5)
            assert abs(counts[part] - target) <= tol, (trial, part, counts, target)


def test_by_subject_single_subject_unreachable():
    cohort = cohort_from_labels({"only": ["CN", "CN", "MCI", "AD"]})
    with pytest.raises(UnreachableRatios):
        split_by_subject(cohort, THIRDS, seed=0)


def test_by_subject_too_few_subjects():
    cohort = cohort_from_labels({"a": ["CN"], "b": ["AD"]})
    with pytest.raises(CohortTooSmall):
        split_by_subject(cohort, THIRDS, seed=0)


def test_by_subject_stratified_still_disjoint_and_covers():
    rng = random.Random(33)
    for trial in range(30):
        cohort = random_label_cohort(rng, n_subjects=18, max_visits=3)
        assignment = split_by_subject(cohort, THIRDS, seed=trial, stratify=True)
        assert set(assignment.mapping) == set(cohort.scan_ids)
        for parts in _partition_sets(cohort, assignment).values():
            assert len(parts) == 1


def test_by_subject_stratified_balances_final_labels():
    # 30 subjects per final label, 2 scans each: each stratum should put
    # roughly a third of its subjects in test under 1/3 ratios
    labels = (["CN"] * 30 + ["MCI"] * 30 + ["AD"] * 30)
    cohort = cohort_from_labels([[lab, lab] for lab in labels])
    assignment = split_by_subject(cohort, THIRDS, seed=4, stratify=True)
    per_label_test = {"CN": 0, "MCI": 0, "AD": 0}
    for sid, parts in _partition_sets(cohort, assignment).items():
        if Partition.TEST in parts:
            per_label_test[cohort.subjects[sid].last_scan.label.value] += 1
    for label, n in per_label_test.items():
        assert 7 <= n <= 13, (label, per_label_test)


# --- by visit history -----------------------------------------------------

def test_visit_history_holds_out_exactly_last_visits():
    rng = random.Random(44)
    for trial in range(50):
        cohort = random_label_cohort(rng, n_subjects=rng.randint(2, 12), max_visits=5)
        assignment, excluded = split_by_visit_history(cohort, 0.15, seed=trial)
        included = [s for s in cohort.subjects if s not in set(excluded)]
        test_ids = {s for s, p in assignment.mapping.items() if p == Partition.TEST}
        want = {cohort.subjects[s].last_scan.scan_id for s in included}
        assert test_ids == want
        assert len(test_ids) == len(included)


def test_visit_history_two_visits_example():
    cohort = cohort_from_labels({"p": ["CN", "MCI"]})
    assignment, excluded = split_by_visit_history(cohort, 0.0, seed=0)
    assert excluded == []
    assert assignment.mapping["p-1"] is Partition.TEST
    assert assignment.mapping["p-0"] is Partition.TRAIN


def test_visit_history_excludes_single_visit_subjects():
    cohort = cohort_from_labels(
        {"a": ["CN", "CN"], "b": ["MCI"], "c": ["AD"], "d": ["CN"], "e": ["AD", "AD", "AD"]}
    )
    assignment, excluded = split_by_visit_history(cohort, 0.0, seed=0)
    assert excluded == ["b", "c", "d"]
    test_ids = [s for s, p in assignment.mapping.items() if p == Partition.TEST]
    assert len(test_ids) == cohort.n_subjects - 3
    # the single-visit scans stay in the training pool, not in test
    for sid in ("b-0", "c-0", "d-0"):
        assert assignment.mapping[sid] is not Partition.TEST
    # mapping still total
    assert set(assignment.mapping) == set(cohort.scan_ids)


def test_visit_history_val_fraction_of_pool():
    cohort = cohort_from_labels([["CN"] * 5 for _ in range(20)])  # pool = 80 scans
    assignment, _ = split_by_visit_history(cohort, 0.25, seed=9)
    counts = assignment.counts()
    assert counts[Partition.TEST] == 20
    assert counts[Partition.VAL] == 20  # 25% of the 80-scan pool
    assert counts[Partition.TRAIN] == 60


def test_visit_history_rejects_bad_fraction():
    cohort = cohort_from_labels({"p": ["CN", "MCI"]})
    with pytest.raises(ValueError):
        split_by_visit_history(cohort, 1.0, seed=0)


# --- group k-fold ---------------------------------------------------------

def test_group_kfold_leave_one_subject_out():
    cohort = cohort_from_labels([["CN", "MCI"], ["AD"], ["CN", "CN", "CN"], ["MCI"]])
    folds = group_kfold(cohort, k=4, seed=0)
    assert len(folds) == 4
    for fold in folds:
        test_subjects = {
            cohort.scan(s).subject_id
            for s, p in fold.mapping.items()
            if p == Partition.TEST
        }
        assert len(test_subjects) == 1


def test_group_kfold_folds_cover_cohort_disjointly():
    rng = random.Random(55)
    for trial in range(20):
        cohort = random_label_cohort(rng, n_subjects=rng.randint(5, 15))
        k = rng.randint(2, min(5, cohort.n_subjects))
        folds = group_kfold(cohort, k=k, seed=trial)
        seen = {}
        for i, fold in enumerate(folds):
            assert set(fold.mapping) == set(cohort.scan_ids)
            assert fold.params["fold_index"] == i
            for sid, part in fold.mapping.items():
                if part == Partition.TEST:
                    assert sid not in seen, "scan tested in two folds"
                    seen[sid] = i
        assert set(seen) == set(cohort.scan_ids)


def test_group_kfold_657_subjects_fold_sizes():
    cohort = cohort_from_labels([["CN"] for _ in range(657)])
    folds = group_kfold(cohort, k=10, seed=1)
    sizes = []
    for fold in folds:
        sizes.append(sum(1 for p in fold.mapping.values() if p == Partition.TEST))
    assert sorted(sizes) == [65] * 3 + [66] * 7  # 657 = 10*65 + 7


def test_group_kfold_errors():
    cohort = cohort_from_labels([["CN"], ["AD"], ["MCI"]])
    with pytest.raises(TooFewSubjects):
        group_kfold(cohort, k=4, seed=0)
    with pytest.raises(ValueError):
        group_kfold(cohort, k=1, seed=0)


# --- cross-scheme determinism --------------------------------------------

def test_all_schemes_deterministic_across_calls():
    rng = random.Random(66)
    cohort = random_label_cohort(rng, n_subjects=12, max_visits=4)
    r = THIRDS
    assert split_random_by_scan(cohort, r, 7).mapping == split_random_by_scan(cohort, r, 7).mapping
    assert split_by_subject(cohort, r, 7).mapping == split_by_subject(cohort, r, 7).mapping
    a1, e1 = split_by_visit_history(cohort, 0.15, 7)
    a2, e2 = split_by_visit_history(cohort, 0.15, 7)
    assert a1.mapping == a2.mapping and e1 == e2
    f1 = group_kfold(cohort, 3, 7)
    f2 = group_kfold(cohort, 3, 7)
    assert [f.mapping for f in f1] == [f.mapping for f in f2]

"""Split-scheme generators for longitudinal cohorts.

Three schemes plus a group k-fold variant, all deterministic under a seed:

- random_by_scan: shuffles individual scans, ignoring subject identity.
  This is the leaky scheme: one subject's visits can land on both sides.
- by_subject: keeps every subject's scans in a single partition.
- by_visit_history: holds out each subject's final visit for testing and
  splits the remaining scans into train/val.
- group_kfold: k subject-disjoint folds, each subject tested exactly once.

Shuffling uses numpy's PCG64 generator (see RNG_ALGORITHM); the emitted
assignment manifest, not bit-equality of draws, is the reproducibility
contract.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .cohort import Cohort
from .errors import CohortSplitError

#: Identifier of the seeded shuffle pinned by this tool version.
RNG_ALGORITHM = "numpy-pcg64-shuffle"

RANDOM_BY_SCAN = "random_by_scan"
BY_SUBJECT = "by_subject"
BY_VISIT_HISTORY = "by_visit_history"
GROUP_KFOLD = "group_kfold"


class Partition(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


class SplitError(CohortSplitError):
    """Base class for split-generation errors."""


class CohortTooSmall(SplitError):
    pass


class UnreachableRatios(SplitError):
    pass


class TooFewSubjects(SplitError):
    pass


@dataclass(frozen=True)
class SplitRatios:
    """Train/val/test fractions; must sum to 1 within 1e-9."""

    train: float
    val: float
    test: float

    def __post_init__(self):
        if not (0.0 < self.train < 1.0):
            raise ValueError(f"train fraction must be in (0,1), got {self.train}")
        if not (0.0 <= self.val < 1.0):
            raise ValueError(f"val fraction must be in [0,1), got {self.val}")
        if not (0.0 < self.test < 1.0):
            raise ValueError(f"test fraction must be in (0,1), got {self.test}")
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            raise ValueError(
                f"ratios must sum to 1, got {self.train + self.val + self.test!r}"
            )

    def as_dict(self) -> dict[str, float]:
        return {"train": self.train, "val": self.val, "test": self.test}


def reference_ratios(val_fraction_of_train: float = 0.15) -> SplitRatios:
    """Ratios reproducing the 2,074-train+val / 657-test scan partition of the
    2,731-scan reference cohort, with the given share of train+val held for
    validation."""
    test = 657.0 / 2731.0
    val = (1.0 - test) * val_fraction_of_train
    return SplitRatios(train=1.0 - test - val, val=val, test=test)


@dataclass(frozen=True)
class SplitAssignment:
    """A scheme, a seed, and a total single-valued scan -> partition mapping."""

    scheme: str
    seed: int
    mapping: Mapping[str, Partition]
    params: Mapping[str, object] = field(default_factory=dict)

    def ids(self, partition: Partition) -> list[str]:
        """Scan ids in one partition, sorted."""
        return sorted(s for s, p in self.mapping.items() if p == partition)

    def counts(self) -> dict[Partition, int]:
        out = {p: 0 for p in Partition}
        for p in self.mapping.values():
            out[p] += 1
        return out


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _size_targets(n: int, ratios: SplitRatios) -> dict[Partition, int]:
    """Integer partition targets: round(n * fraction), remainder to train."""
    n_test = _round_half_up(n * ratios.test)
    n_val = _round_half_up(n * ratios.val)
    return {
        Partition.TRAIN: n - n_test - n_val,
        Partition.VAL: n_val,
        Partition.TEST: n_test,
    }


def split_random_by_scan(cohort: Cohort, ratios: SplitRatios, seed: int) -> SplitAssignment:
    """Split individual scans at random, ignoring subject identity.

    Partition sizes hit the integer targets exactly; rounding remainder goes
    to train.
    """
    if cohort.n_scans < 3:
        raise CohortTooSmall(f"need >= 3 scans, cohort has {cohort.n_scans}")
    targets = _size_targets(cohort.n_scans, ratios)
    if targets[Partition.TRAIN] < 0:
        raise CohortTooSmall("cohort too small for the requested ratios")

    rng = np.random.default_rng(seed)
    ids = sorted(cohort.scan_ids)
    rng.shuffle(ids)
    mapping: dict[str, Partition] = {}
    cut_test = targets[Partition.TEST]
    cut_val = cut_test + targets[Partition.VAL]
    for i, scan_id in enumerate(ids):
        if i < cut_test:
            mapping[scan_id] = Partition.TEST
        elif i < cut_val:
            mapping[scan_id] = Partition.VAL
        else:
            mapping[scan_id] = Partition.TRAIN
    return SplitAssignment(
        scheme=RANDOM_BY_SCAN,
        seed=seed,
        mapping=mapping,
        params={"ratios": ratios.as_dict(), "rng": RNG_ALGORITHM},
    )


def _greedy_fill(
    queue: list[str],
    lengths: Mapping[str, int],
    target: int,
) -> tuple[list[str], int]:
    """Consume subjects from the queue front until the scan-count target is
    best met. When the next subject would overshoot, it is taken only if that
    lands closer to the target than stopping short; deviation is therefore at
    most half that subject's series length."""
    taken: list[str] = []
    count = 0
    while queue and count < target:
        n = lengths[queue[0]]
        if count + n > target and (count + n - target) > (target - count):
            break
        taken.append(queue.pop(0))
        count += n
    return taken, count


def split_by_subject(
    cohort: Cohort,
    ratios: SplitRatios,
    seed: int,
    stratify: bool = False,
) -> SplitAssignment:
    """Assign whole subjects to partitions: no subject spans two partitions.

    Shuffled subjects greedily fill test, then val, with train taking the
    rest; each partition's scan count lands within the longest series length
    of its integer target. With stratify=True the shuffle-and-fill runs per
    stratum, a subject's stratum being its final-visit label.
    """
    targets = _size_targets(cohort.n_scans, ratios)
    lengths = {sid: len(series) for sid, series in cohort.subjects.items()}
    max_len = max(lengths.values())
    for part, target in targets.items():
        if 0 < target < max_len:
            raise UnreachableRatios(
                f"a subject with {max_len} scans exceeds the {part.value} "
                f"target of {target} scans"
            )
    if cohort.n_subjects < 3:
        raise CohortTooSmall(f"need >= 3 subjects, cohort has {cohort.n_subjects}")

    rng = np.random.default_rng(seed)
    mapping: dict[str, Partition] = {}

    def assign(subject_ids, part):
        for sid in subject_ids:
            for rec in cohort.subjects[sid].scans:
                mapping[rec.scan_id] = part

    if stratify:
        strata = {}
        for sid, series in sorted(cohort.subjects.items()):
            strata.setdefault(series.last_scan.label, []).append(sid)
        groups = [strata[label] for label in sorted(strata, key=lambda l: l.stage_level)]
    else:
        groups = [sorted(cohort.subjects)]

    for group in groups:
        group_scans = sum(lengths[sid] for sid in group)
        share = group_scans / cohort.n_scans
        queue = list(group)
        rng.shuffle(queue)
        for part in (Partition.TEST, Partition.VAL):
            group_target = _round_half_up(targets[part] * share) if stratify else targets[part]
            taken, _ = _greedy_fill(queue, lengths, group_target)
            assign(taken, part)
        assign(queue, Partition.TRAIN)

    return SplitAssignment(
        scheme=BY_SUBJECT,
        seed=seed,
        mapping=mapping,
        params={"ratios": ratios.as_dict(), "rng": RNG_ALGORITHM},
    )


def split_by_visit_history(
    cohort: Cohort,
    val_fraction_of_train: float,
    seed: int,
) -> tuple[SplitAssignment, list[str]]:
    """Hold out each subject's final visit for testing.

    Earlier visits feed a random train/val split. Subjects with a single
    visit have nothing to hold out: their scan stays in the train/val pool
    and their id is returned in the exclusion list (excluded from testing,
    not from the cohort).
    """
    if not (0.0 <= val_fraction_of_train < 1.0):
        raise ValueError(
            f"val_fraction_of_train must be in [0,1), got {val_fraction_of_train}"
        )
    mapping: dict[str, Partition] = {}
    excluded: list[str] = []
    pool: list[str] = []
    for sid, series in sorted(cohort.subjects.items()):
        if len(series) < 2:
            excluded.append(sid)
            pool.extend(rec.scan_id for rec in series.scans)
            continue
        mapping[series.last_scan.scan_id] = Partition.TEST
        pool.extend(rec.scan_id for rec in series.scans[:-1])

    rng = np.random.default_rng(seed)
    pool.sort()
    rng.shuffle(pool)
    n_val = _round_half_up(len(pool) * val_fraction_of_train)
    for i, scan_id in enumerate(pool):
        mapping[scan_id] = Partition.VAL if i < n_val else Partition.TRAIN

    params: dict[str, object] = {
        "ratios": {"val_fraction_of_train": val_fraction_of_train},
        "rng": RNG_ALGORITHM,
    }
    if excluded:
        params["excluded_subjects"] = list(excluded)
    assignment = SplitAssignment(
        scheme=BY_VISIT_HISTORY, seed=seed, mapping=mapping, params=params
    )
    return assignment, excluded


def group_kfold(cohort: Cohort, k: int, seed: int) -> list[SplitAssignment]:
    """k subject-disjoint folds; each subject's scans are tested exactly once.

    Fold subject counts differ by at most one; val is empty.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if cohort.n_subjects < k:
        raise TooFewSubjects(f"{cohort.n_subjects} subjects cannot form {k} folds")

    rng = np.random.default_rng(seed)
    subjects = sorted(cohort.subjects)
    rng.shuffle(subjects)
    base, rem = divmod(len(subjects), k)
    folds: list[list[str]] = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        folds.append(subjects[start : start + size])
        start += size

    assignments = []
    for fold_index, fold_subjects in enumerate(folds):
        held_out = set(fold_subjects)
        mapping = {
            rec.scan_id: Partition.TEST if rec.subject_id in held_out else Partition.TRAIN
            for rec in cohort.scans
        }
        assignments.append(
            SplitAssignment(
                scheme=GROUP_KFOLD,
                seed=seed,
                mapping=mapping,
                params={
                    "ratios": {},
                    "rng": RNG_ALGORITHM,
                    "fold_index": fold_index,
                    "k": k,
                },
            )
        )
    return assignments

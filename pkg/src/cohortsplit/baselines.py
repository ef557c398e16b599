"""Label-only and memorization baselines.

None of these train anything. carry_forward repeats the subject's most
recent earlier diagnosis; majority_class predicts the most frequent training
label; nearest_neighbor looks up the closest training feature vectors. Their
point is diagnostic: whatever accuracy they reach on a given split is
accuracy a learned model could reach without reading the disease stage out
of the image.

Everything here is deterministic. Distance ties resolve toward the smaller
scan_id; label-vote ties resolve toward the earlier progression stage
(CN before MCI before AD).
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .cohort import Cohort, DiagnosisLabel
from .errors import CohortSplitError
from .features import FeatureMatrix
from .splitting import Partition, SplitAssignment

CARRY_FORWARD = "carry_forward"
MAJORITY_CLASS = "majority_class"
NEAREST_NEIGHBOR = "nearest_neighbor"

BASELINE_NAMES = (CARRY_FORWARD, MAJORITY_CLASS, NEAREST_NEIGHBOR)


class BaselineError(CohortSplitError):
    """Base class for baseline-predictor errors."""


class MissingFeature(BaselineError):
    def __init__(self, scan_id: str):
        super().__init__(f"no feature vector for scan {scan_id!r}")
        self.scan_id = scan_id


@dataclass(frozen=True)
class Predictions:
    """Test-partition predictions plus the provenance that produced them."""

    baseline: str
    params: Mapping[str, object] = field(compare=False)
    labels: Mapping[str, DiagnosisLabel] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.labels)


def _train_pool_ids(assignment: SplitAssignment) -> list[str]:
    """Sorted train∪val scan ids."""
    return sorted(
        sid for sid, part in assignment.mapping.items() if part != Partition.TEST
    )


def _majority_label(labels) -> DiagnosisLabel:
    """Most frequent label; ties go to the earliest progression stage."""
    counts = Counter(labels)
    return max(counts, key=lambda lab: (counts[lab], -lab.stage_level))


def training_majority_label(cohort: Cohort, assignment: SplitAssignment) -> DiagnosisLabel:
    """The most frequent label among train∪val scans (tie rule: CN<MCI<AD)."""
    pool = _train_pool_ids(assignment)
    return _majority_label(cohort.scan(sid).label for sid in pool)


def carry_forward_predict(cohort: Cohort, assignment: SplitAssignment) -> Predictions:
    """Repeat each test subject's most recent earlier diagnosis.

    For each test scan, the prediction is the label of the same subject's
    latest strictly-earlier visit that sits in train∪val. Subjects with no
    such visit (e.g. under a subject-level split) fall back to the training
    majority label, keeping the prediction map total.
    """
    fallback = training_majority_label(cohort, assignment)
    labels: dict[str, DiagnosisLabel] = {}
    for sid, part in assignment.mapping.items():
        if part != Partition.TEST:
            continue
        rec = cohort.scan(sid)
        prior = None
        for earlier in cohort.subjects[rec.subject_id].scans:
            if earlier.visit_index >= rec.visit_index:
                break
            if assignment.mapping[earlier.scan_id] != Partition.TEST:
                prior = earlier
        labels[sid] = prior.label if prior is not None else fallback
    return Predictions(baseline=CARRY_FORWARD, params={}, labels=labels)


def majority_class_predict(cohort: Cohort, assignment: SplitAssignment) -> Predictions:
    """Predict the training majority label for every test scan."""
    fallback = training_majority_label(cohort, assignment)
    labels = {
        sid: fallback
        for sid, part in assignment.mapping.items()
        if part == Partition.TEST
    }
    return Predictions(baseline=MAJORITY_CLASS, params={}, labels=labels)


def nearest_neighbor_predict(
    features: FeatureMatrix,
    cohort: Cohort,
    assignment: SplitAssignment,
    k: int = 1,
) -> Predictions:
    """k-nearest-neighbor lookup in feature space, Euclidean distance.

    The memorizer: with strong subject fingerprints in the features, it wins
    exactly when a test subject also appears in training. k must be odd; a
    three-way vote tie still resolves CN before MCI before AD. Distance ties
    prefer the smaller scan_id. If fewer than k training scans exist, all of
    them vote.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be a positive odd integer, got {k}")
    for rec in cohort.scans:
        if rec.scan_id not in features:
            raise MissingFeature(rec.scan_id)

    train_ids = _train_pool_ids(assignment)
    train_mat = features.submatrix(train_ids)
    train_labels = [cohort.scan(sid).label for sid in train_ids]
    labels: dict[str, DiagnosisLabel] = {}
    for sid in sorted(assignment.mapping):
        if assignment.mapping[sid] != Partition.TEST:
            continue
        diff = train_mat - features.vector(sid)
        d2 = np.einsum("ij,ij->i", diff, diff)
        # stable sort over pre-sorted ids = ties favor the smaller scan_id
        order = np.argsort(d2, kind="stable")[:k]
        labels[sid] = _majority_label(train_labels[i] for i in order)
    return Predictions(baseline=NEAREST_NEIGHBOR, params={"k": k}, labels=labels)

"""Leakage-aware train/val/test splitting for longitudinal cohorts.

Builds scan-level cohorts with subject identity and visit order, generates
splits under three schemes (random by scan, subject-disjoint, last-visit
holdout), audits arbitrary assignments for subject leakage, and ships
no-training baselines that quantify what leakage and label persistence alone
buy a classifier.
"""

from .cohort import (
    Cohort,
    CohortError,
    DiagnosisLabel,
    DuplicateScanId,
    DuplicateVisit,
    EmptyInput,
    ScanRecord,
    SubjectSeries,
    TransitionStats,
    build_cohort,
    count_transitions,
    filter_transition_subjects,
)
from .errors import CohortSplitError
from .splitting import (
    BY_SUBJECT,
    BY_VISIT_HISTORY,
    GROUP_KFOLD,
    RANDOM_BY_SCAN,
    RNG_ALGORITHM,
    CohortTooSmall,
    Partition,
    SplitAssignment,
    SplitError,
    SplitRatios,
    TooFewSubjects,
    UnreachableRatios,
    group_kfold,
    reference_ratios,
    split_by_subject,
    split_by_visit_history,
    split_random_by_scan,
)

__version__ = "0.1.0"

__all__ = [
    "Cohort",
    "CohortError",
    "CohortSplitError",
    "CohortTooSmall",
    "DiagnosisLabel",
    "DuplicateScanId",
    "DuplicateVisit",
    "EmptyInput",
    "Partition",
    "ScanRecord",
    "SplitAssignment",
    "SplitError",
    "SplitRatios",
    "SubjectSeries",
    "TooFewSubjects",
    "TransitionStats",
    "UnreachableRatios",
    "build_cohort",
    "count_transitions",
    "filter_transition_subjects",
    "group_kfold",
    "reference_ratios",
    "split_by_subject",
    "split_by_visit_history",
    "split_random_by_scan",
    "BY_SUBJECT",
    "BY_VISIT_HISTORY",
    "GROUP_KFOLD",
    "RANDOM_BY_SCAN",
    "RNG_ALGORITHM",
    "__version__",
]

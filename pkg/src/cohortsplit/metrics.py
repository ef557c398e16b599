"""Accuracy, confusion matrices, and multi-run aggregation.

The confusion matrix is laid out rows = predicted, columns = ground truth,
in (AD, MCI, CN) order, and prints as an aligned table in that layout.
Multi-run summaries report mean ± sample standard deviation of accuracy,
formatted "xx.x ± y.y %".
"""

import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .baselines import Predictions
from .cohort import Cohort, DiagnosisLabel
from .errors import CohortSplitError, EmptyInput
from .splitting import Partition, SplitAssignment

#: Row/column label order of every confusion matrix in this package.
CONFUSION_ORDER = (DiagnosisLabel.AD, DiagnosisLabel.MCI, DiagnosisLabel.CN)

_POS = {label: i for i, label in enumerate(CONFUSION_ORDER)}


class EvaluationError(CohortSplitError):
    """Base class for scoring errors."""


class MissingPrediction(EvaluationError):
    def __init__(self, scan_id: str):
        super().__init__(f"no prediction for test scan {scan_id!r}")
        self.scan_id = scan_id


class UnexpectedPrediction(EvaluationError):
    def __init__(self, scan_id: str):
        super().__init__(f"prediction for {scan_id!r}, which is not a test scan")
        self.scan_id = scan_id


@dataclass(frozen=True)
class ConfusionMatrix:
    """3×3 counts, rows = predicted label, columns = true label, (AD, MCI, CN)."""

    counts: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.counts) != 3 or any(len(row) != 3 for row in self.counts):
            raise ValueError("confusion matrix must be 3×3")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("confusion matrix counts must be non-negative")

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[DiagnosisLabel, DiagnosisLabel]]
    ) -> "ConfusionMatrix":
        """Build from (predicted, true) pairs."""
        grid = [[0, 0, 0] for _ in range(3)]
        for predicted, true in pairs:
            grid[_POS[predicted]][_POS[true]] += 1
        return cls(counts=tuple(tuple(row) for row in grid))

    @property
    def total(self) -> int:
        return sum(c for row in self.counts for c in row)

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(3))

    @property
    def accuracy(self) -> float:
        return self.trace / self.total if self.total else 0.0

    def row_sums(self) -> dict[DiagnosisLabel, int]:
        """Per-label prediction counts."""
        return {lab: sum(self.counts[_POS[lab]]) for lab in CONFUSION_ORDER}

    def col_sums(self) -> dict[DiagnosisLabel, int]:
        """Per-label ground-truth counts."""
        return {
            lab: sum(self.counts[r][_POS[lab]] for r in range(3))
            for lab in CONFUSION_ORDER
        }

    def count(self, predicted: DiagnosisLabel, true: DiagnosisLabel) -> int:
        return self.counts[_POS[predicted]][_POS[true]]

    def to_text(self) -> str:
        """Aligned table, predictions down the side, ground truth across."""
        names = [lab.value for lab in CONFUSION_ORDER]
        name_w = max(len(n) for n in names)
        cell_w = max(
            max(len(str(c)) for row in self.counts for c in row),
            max(len(n) for n in names),
        )
        stub_w = len("pred ") + name_w
        lines = [" " * stub_w + "  " + " ".join(f"{n:>{cell_w}}" for n in names)]
        for i, name in enumerate(names):
            row = " ".join(f"{c:>{cell_w}}" for c in self.counts[i])
            lines.append(f"pred {name:<{name_w}}  {row}")
        return "\n".join(lines)


@dataclass(frozen=True)
class EvalReport:
    """Accuracy plus the confusion matrix and per-class precision/recall."""

    accuracy: float
    confusion: ConfusionMatrix
    precision: Mapping[DiagnosisLabel, float]
    recall: Mapping[DiagnosisLabel, float]
    n_scored: int

    def to_doc(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n_scored": self.n_scored,
            "confusion_order": [lab.value for lab in CONFUSION_ORDER],
            "confusion": [list(row) for row in self.confusion.counts],
            "precision": {lab.value: self.precision[lab] for lab in CONFUSION_ORDER},
            "recall": {lab.value: self.recall[lab] for lab in CONFUSION_ORDER},
        }


def report_from_confusion(confusion: ConfusionMatrix) -> EvalReport:
    """Derive accuracy and per-class metrics from a finished matrix."""
    rows = confusion.row_sums()
    cols = confusion.col_sums()
    precision = {
        lab: (confusion.count(lab, lab) / rows[lab]) if rows[lab] else 0.0
        for lab in CONFUSION_ORDER
    }
    recall = {
        lab: (confusion.count(lab, lab) / cols[lab]) if cols[lab] else 0.0
        for lab in CONFUSION_ORDER
    }
    return EvalReport(
        accuracy=confusion.accuracy,
        confusion=confusion,
        precision=precision,
        recall=recall,
        n_scored=confusion.total,
    )


def evaluate(
    predictions: Predictions | Mapping[str, DiagnosisLabel],
    cohort: Cohort,
    assignment: SplitAssignment,
) -> EvalReport:
    """Score predictions over the assignment's test partition.

    Predictions must cover the test partition exactly: a missing test scan or
    a prediction for a non-test scan is an error, not a silent skip.
    """
    labels = predictions.labels if isinstance(predictions, Predictions) else predictions
    test_ids = {
        sid for sid, part in assignment.mapping.items() if part == Partition.TEST
    }
    for sid in labels:
        if sid not in test_ids:
            raise UnexpectedPrediction(sid)
    pairs = []
    for sid in sorted(test_ids):
        if sid not in labels:
            raise MissingPrediction(sid)
        pairs.append((labels[sid], cohort.scan(sid).label))
    return report_from_confusion(ConfusionMatrix.from_pairs(pairs))


@dataclass(frozen=True)
class MultiRunSummary:
    """Mean ± sample std of accuracy over repeated runs."""

    accuracies: tuple[float, ...]
    mean: float
    std: float
    n_runs: int

    def format(self) -> str:
        """Render as "xx.x ± y.y %" with accuracies in percent."""
        return f"{self.mean * 100:.1f} ± {self.std * 100:.1f} %"

    def to_doc(self) -> dict:
        return {
            "accuracies": list(self.accuracies),
            "mean": self.mean,
            "std": self.std,
            "n_runs": self.n_runs,
            "formatted": self.format(),
        }


def aggregate_runs(reports: Sequence[EvalReport | float]) -> MultiRunSummary:
    """Summarize accuracies over runs: mean and sample (n−1) standard
    deviation, with std defined as 0.0 for a single run."""
    if not reports:
        raise EmptyInput("no runs to aggregate")
    accs = tuple(
        r.accuracy if isinstance(r, EvalReport) else float(r) for r in reports
    )
    mean = statistics.fmean(accs)
    std = statistics.stdev(accs) if len(accs) > 1 else 0.0
    return MultiRunSummary(accuracies=accs, mean=mean, std=std, n_runs=len(accs))

"""File formats shared with the cohort-splitting toolchain.

The harness deliberately never constructs splits itself: manifests and
assignments arrive as CSV files written by the splitting tool, and reports
leave as JSON/CSV documents that tool can read back. This module owns both
directions plus the on-disk volume convention `<image_root>/<scan_id>.npy`.
"""

import csv
import io as _io
import json
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import FormatError, IncompatibleAssignment, MissingImage

MANIFEST_HEADER = "scan_id,subject_id,visit_index,acquisition_date,label"
ASSIGNMENT_HEADER = "scan_id,subject_id,partition"
PREDICTIONS_HEADER = "scan_id,label"

LABELS = ("CN", "MCI", "AD")
#: training class index of each label, in disease-stage order
CLASS_INDEX = {label: i for i, label in enumerate(LABELS)}
PARTITIONS = ("train", "val", "test")

#: confusion-matrix row/column order used in emitted report documents
REPORT_LABEL_ORDER = ("AD", "MCI", "CN")


class ScanRow(NamedTuple):
    scan_id: str
    subject_id: str
    visit_index: int
    label: str


def _rows(text: str, header: str):
    lines = text.split("\n")
    if not lines or lines[0].strip() != header:
        raise FormatError(f"expected header {header!r}", line=1)
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "" and lineno == len(lines):
            continue  # trailing newline
        yield lineno, next(csv.reader([line]))


def parse_manifest(text: str) -> list[ScanRow]:
    rows = []
    seen = set()
    for lineno, fields in _rows(text, MANIFEST_HEADER):
        if len(fields) != 5:
            raise FormatError(f"expected 5 fields, got {len(fields)}", lineno)
        scan_id, subject_id, visit, _date, label = fields
        if scan_id in seen:
            raise FormatError(f"duplicate scan_id {scan_id!r}", lineno)
        seen.add(scan_id)
        try:
            visit_index = int(visit)
        except ValueError:
            raise FormatError(f"bad visit_index {visit!r}", lineno) from None
        if visit_index < 0:
            raise FormatError(f"negative visit_index {visit_index}", lineno)
        if label not in LABELS:
            raise FormatError(f"unknown label {label!r}", lineno)
        rows.append(ScanRow(scan_id, subject_id, visit_index, label))
    if not rows:
        raise FormatError("manifest has no scans")
    return rows


def parse_assignment(text: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, fields in _rows(text, ASSIGNMENT_HEADER):
        if len(fields) != 3:
            raise FormatError(f"expected 3 fields, got {len(fields)}", lineno)
        scan_id, _subject_id, partition = fields
        if partition not in PARTITIONS:
            raise FormatError(f"unknown partition {partition!r}", lineno)
        if scan_id in mapping:
            raise FormatError(f"duplicate scan_id {scan_id!r}", lineno)
        mapping[scan_id] = partition
    if not mapping:
        raise FormatError("assignment has no rows")
    return mapping


def check_compatible(records: list[ScanRow], assignment: Mapping[str, str]) -> None:
    """The assignment must cover the manifest exactly and leave a test set."""
    manifest_ids = {r.scan_id for r in records}
    assigned_ids = set(assignment)
    missing = manifest_ids - assigned_ids
    if missing:
        raise IncompatibleAssignment(
            f"{len(missing)} manifest scans missing from the assignment, "
            f"e.g. {sorted(missing)[0]!r}"
        )
    unknown = assigned_ids - manifest_ids
    if unknown:
        raise IncompatibleAssignment(
            f"{len(unknown)} assigned scans not in the manifest, "
            f"e.g. {sorted(unknown)[0]!r}"
        )
    if not any(part == "test" for part in assignment.values()):
        raise IncompatibleAssignment("assignment has no test scans")


def parse_features(text: str) -> dict[str, np.ndarray]:
    """Read the latent-vector CSV (scan_id,f0,...,fN) into arrays."""
    lines = text.split("\n")
    if not lines or not lines[0].startswith("scan_id,f0"):
        raise FormatError("expected header scan_id,f0,...", line=1)
    dim = len(lines[0].split(",")) - 1
    out: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "" and lineno == len(lines):
            continue
        fields = line.split(",")
        if len(fields) != dim + 1:
            raise FormatError(f"expected {dim + 1} fields, got {len(fields)}", lineno)
        if fields[0] in out:
            raise FormatError(f"duplicate scan_id {fields[0]!r}", lineno)
        try:
            out[fields[0]] = np.array([float(v) for v in fields[1:]], dtype=np.float64)
        except ValueError:
            raise FormatError("non-numeric feature value", lineno) from None
    if not out:
        raise FormatError("feature file has no rows")
    return out


def transition_subjects(records: Iterable[ScanRow]) -> set[str]:
    """Subjects whose final two visits carry different labels."""
    per_subject: dict[str, list[ScanRow]] = {}
    for row in records:
        per_subject.setdefault(row.subject_id, []).append(row)
    out = set()
    for subject_id, rows in per_subject.items():
        rows.sort(key=lambda r: r.visit_index)
        if len(rows) >= 2 and rows[-2].label != rows[-1].label:
            out.add(subject_id)
    return out


def volume_path(image_root, scan_id: str) -> Path:
    return Path(image_root) / f"{scan_id}.npy"


def load_volume(image_root, scan_id: str) -> np.ndarray:
    path = volume_path(image_root, scan_id)
    if not path.exists():
        raise MissingImage(scan_id, path)
    volume = np.load(path)
    if volume.ndim != 3:
        raise FormatError(f"volume for {scan_id!r} is {volume.ndim}-d, want 3-d")
    return volume.astype(np.float32)


def dump_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def predictions_csv(labels: Mapping[str, str]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTIONS_HEADER.split(","))
    for scan_id in sorted(labels):
        writer.writerow([scan_id, labels[scan_id]])
    return buf.getvalue()


def report_doc(pairs: list[tuple[str, str]]) -> dict:
    """Score (predicted, true) label pairs into the report document layout."""
    pos = {label: i for i, label in enumerate(REPORT_LABEL_ORDER)}
    grid = [[0, 0, 0] for _ in range(3)]
    for predicted, true in pairs:
        grid[pos[predicted]][pos[true]] += 1
    total = len(pairs)
    trace = sum(grid[i][i] for i in range(3))
    row_sums = [sum(row) for row in grid]
    col_sums = [sum(grid[r][c] for r in range(3)) for c in range(3)]
    return {
        "accuracy": trace / total if total else 0.0,
        "n_scored": total,
        "confusion_order": list(REPORT_LABEL_ORDER),
        "confusion": [list(row) for row in grid],
        "precision": {
            lab: (grid[i][i] / row_sums[i]) if row_sums[i] else 0.0
            for i, lab in enumerate(REPORT_LABEL_ORDER)
        },
        "recall": {
            lab: (grid[i][i] / col_sums[i]) if col_sums[i] else 0.0
            for i, lab in enumerate(REPORT_LABEL_ORDER)
        },
    }

"""Stable text formats: cohort manifests, assignment files, sidecar documents.

All outputs are UTF-8 with LF line endings and deterministic ordering
(sorted by scan_id), so repeated runs with identical inputs are
byte-identical and file diffs stay stable. Sidecar metadata and reports are
JSON with sorted keys and two-space indentation.
"""

import csv
import io
import json
from datetime import date
from typing import Mapping

from .cohort import Cohort, DiagnosisLabel, ScanRecord
from .errors import CohortSplitError
from .splitting import Partition, SplitAssignment

MANIFEST_HEADER = "scan_id,subject_id,visit_index,acquisition_date,label"
ASSIGNMENT_HEADER = "scan_id,subject_id,partition"
PREDICTIONS_HEADER = "scan_id,label"

#: Metadata keys that round-trip into SplitAssignment.params.
_PARAM_KEYS = ("ratios", "rng", "fold_index", "k", "excluded_subjects")


class ManifestError(CohortSplitError):
    """Base class for manifest parsing and validation errors."""


class EmptyFile(ManifestError):
    pass


class BadHeader(ManifestError):
    def __init__(self, expected: str, got: str):
        super().__init__(f"bad header: expected {expected!r}, got {got!r}")


class BadLabel(ManifestError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: bad diagnosis label {value!r}")
        self.line = line


class BadVisitIndex(ManifestError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: bad visit_index {value!r}")
        self.line = line


class BadDate(ManifestError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: bad acquisition_date {value!r} (want ISO-8601)")
        self.line = line


class BadPartition(ManifestError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: bad partition {value!r} (want train/val/test)")
        self.line = line


class CoverageMismatch(ManifestError):
    pass


class UnknownScanId(ManifestError):
    def __init__(self, scan_id: str):
        super().__init__(f"assignment names scan_id {scan_id!r} absent from cohort")
        self.scan_id = scan_id


class MissingScanId(ManifestError):
    def __init__(self, scan_id: str):
        super().__init__(f"cohort scan_id {scan_id!r} missing from assignment")
        self.scan_id = scan_id


class DuplicateAssignment(ManifestError):
    def __init__(self, scan_id: str):
        super().__init__(f"scan_id {scan_id!r} assigned more than once")
        self.scan_id = scan_id


def _rows(text: str, expected_header: str, n_fields: int):
    """Yield (line_number, fields) for each record row after a strict header check."""
    if not text.strip():
        raise EmptyFile("empty file")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:  # pragma: no cover - guarded by the strip() check
        raise EmptyFile("empty file") from None
    if ",".join(header) != expected_header:
        raise BadHeader(expected_header, ",".join(header))
    for lineno, fields in enumerate(reader, start=2):
        if not fields:
            continue  # tolerate a trailing blank line
        if len(fields) != n_fields:
            raise ManifestError(f"line {lineno}: expected {n_fields} fields, got {len(fields)}")
        yield lineno, fields


def _csv_line(fields: list[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(fields)
    return buf.getvalue()


def parse_manifest(text: str) -> list[ScanRecord]:
    """Parse a cohort manifest into records, in file order.

    Labels are case-insensitive on input and canonicalized to CN/MCI/AD.
    """
    records = []
    for lineno, (scan_id, subject_id, visit, acq, label) in _rows(text, MANIFEST_HEADER, 5):
        try:
            visit_index = int(visit)
            if visit_index < 0:
                raise ValueError
        except ValueError:
            raise BadVisitIndex(lineno, visit) from None
        if acq:
            try:
                acquisition_date = date.fromisoformat(acq)
            except ValueError:
                raise BadDate(lineno, acq) from None
        else:
            acquisition_date = None
        try:
            parsed = DiagnosisLabel.parse(label)
        except ValueError:
            raise BadLabel(lineno, label) from None
        records.append(
            ScanRecord(
                scan_id=scan_id,
                subject_id=subject_id,
                visit_index=visit_index,
                acquisition_date=acquisition_date,
                label=parsed,
            )
        )
    return records


def write_manifest(cohort: Cohort) -> str:
    """Serialize a cohort manifest, sorted by scan_id."""
    lines = [MANIFEST_HEADER + "\n"]
    for rec in cohort.scans:
        acq = rec.acquisition_date.isoformat() if rec.acquisition_date else ""
        lines.append(
            _csv_line([rec.scan_id, rec.subject_id, str(rec.visit_index), acq, rec.label.value])
        )
    return "".join(lines)


def dump_doc(doc: Mapping) -> str:
    """Serialize a structured key-value document (sidecar/report) deterministically."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_doc(text: str) -> dict:
    if not text.strip():
        raise EmptyFile("empty document")
    return json.loads(text)


def assignment_metadata(assignment: SplitAssignment, cohort: Cohort, **extra) -> dict:
    """Build the metadata sidecar document for an assignment.

    Carries scheme, seed, ratios, per-partition counts, and the tool version,
    plus any scheme-specific parameters recorded on the assignment.
    """
    from . import __version__

    counts = {p: 0 for p in Partition}
    for part in assignment.mapping.values():
        counts[part] += 1
    doc = {
        "scheme": assignment.scheme,
        "seed": assignment.seed,
        "ratios": assignment.params.get("ratios", {}),
        "counts_train": counts[Partition.TRAIN],
        "counts_val": counts[Partition.VAL],
        "counts_test": counts[Partition.TEST],
        "version": __version__,
    }
    for key in _PARAM_KEYS:
        if key != "ratios" and key in assignment.params:
            doc[key] = assignment.params[key]
    doc.update(extra)
    return doc


def write_assignment(assignment: SplitAssignment, cohort: Cohort) -> tuple[str, str]:
    """Serialize an assignment to (assignment text, metadata document).

    The assignment must cover exactly the cohort's scan ids. Output is sorted
    by scan_id and round-trips losslessly through read_assignment.
    """
    mapped = set(assignment.mapping)
    cohort_ids = set(c.scan_id for c in cohort.scans)
    if mapped != cohort_ids:
        missing = sorted(cohort_ids - mapped)[:3]
        extra = sorted(mapped - cohort_ids)[:3]
        raise CoverageMismatch(
            f"assignment does not cover the cohort exactly "
            f"(missing {missing}, unknown {extra})"
        )
    lines = [ASSIGNMENT_HEADER + "\n"]
    for rec in cohort.scans:
        lines.append(
            _csv_line([rec.scan_id, rec.subject_id, assignment.mapping[rec.scan_id].value])
        )
    return "".join(lines), dump_doc(assignment_metadata(assignment, cohort))


def read_assignment(text: str, cohort: Cohort, metadata_text: str | None = None) -> SplitAssignment:
    """Parse and validate an assignment against a cohort.

    Every cohort scan must appear exactly once. Scheme, seed, and split
    parameters are recovered from the metadata sidecar when provided.
    """
    mapping: dict[str, Partition] = {}
    for lineno, (scan_id, subject_id, partition) in _rows(text, ASSIGNMENT_HEADER, 3):
        if scan_id in mapping:
            raise DuplicateAssignment(scan_id)
        try:
            rec = cohort.scan(scan_id)
        except KeyError:
            raise UnknownScanId(scan_id) from None
        if rec.subject_id != subject_id:
            raise ManifestError(
                f"line {lineno}: scan {scan_id!r} belongs to subject "
                f"{rec.subject_id!r}, not {subject_id!r}"
            )
        try:
            mapping[scan_id] = Partition(partition)
        except ValueError:
            raise BadPartition(lineno, partition) from None
    for rec in cohort.scans:
        if rec.scan_id not in mapping:
            raise MissingScanId(rec.scan_id)

    scheme = "unknown"
    seed = 0
    params: dict = {}
    if metadata_text is not None:
        meta = load_doc(metadata_text)
        scheme = meta.get("scheme", scheme)
        seed = int(meta.get("seed", seed))
        for key in _PARAM_KEYS:
            if key in meta:
                params[key] = meta[key]
    return SplitAssignment(scheme=scheme, seed=seed, mapping=mapping, params=params)


def write_predictions(mapping: Mapping[str, DiagnosisLabel]) -> str:
    """Serialize test-set predictions, sorted by scan_id."""
    lines = [PREDICTIONS_HEADER + "\n"]
    for scan_id in sorted(mapping):
        lines.append(_csv_line([scan_id, mapping[scan_id].value]))
    return "".join(lines)


def read_predictions(text: str) -> dict[str, DiagnosisLabel]:
    """Parse a predictions file into a scan_id -> label mapping."""
    mapping: dict[str, DiagnosisLabel] = {}
    for lineno, (scan_id, label) in _rows(text, PREDICTIONS_HEADER, 2):
        if scan_id in mapping:
            raise DuplicateAssignment(scan_id)
        try:
            mapping[scan_id] = DiagnosisLabel.parse(label)
        except ValueError:
            raise BadLabel(lineno, label) from None
    return mapping

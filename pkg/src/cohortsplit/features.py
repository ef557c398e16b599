"""Per-scan feature vectors with a plain-text interchange format.

A FeatureMatrix maps scan ids to real vectors of one shared dimension; it
stands in for image-derived descriptors so the baselines can run without
touching pixel data. The text format is delimiter-separated with header
scan_id,f0,f1,...,f{d-1}; values are written with shortest round-trip float
formatting so write/read is lossless and byte-stable.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import CohortSplitError, EmptyInput


class FeatureError(CohortSplitError):
    """Base class for feature-matrix errors."""


class DimensionMismatch(FeatureError):
    def __init__(self, scan_id: str, expected: int, got: int):
        super().__init__(
            f"feature vector for {scan_id!r} has dimension {got}, expected {expected}"
        )
        self.scan_id = scan_id


class NonFiniteFeature(FeatureError):
    def __init__(self, scan_id: str):
        super().__init__(f"feature vector for {scan_id!r} contains non-finite values")
        self.scan_id = scan_id


class BadFeatureRow(FeatureError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class FeatureMatrix:
    """Immutable scan_id -> vector mapping backed by one dense array.

    Rows are ordered by scan_id so two matrices with equal content are equal
    regardless of insertion order.
    """

    scan_ids: tuple[str, ...]
    values: np.ndarray = field(compare=False)  # shape (n, d), float64
    _index: Mapping[str, int] = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.scan_ids)

    def __contains__(self, scan_id: str) -> bool:
        return scan_id in self._index

    def vector(self, scan_id: str) -> np.ndarray:
        """Read-only view of one scan's feature vector."""
        return self.values[self._index[scan_id]]

    def submatrix(self, scan_ids: Iterable[str]) -> np.ndarray:
        """Rows for the given ids, in the given order."""
        rows = [self._index[sid] for sid in scan_ids]
        return self.values[rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return self.scan_ids == other.scan_ids and np.array_equal(
            self.values, other.values
        )


def build_features(vectors: Mapping[str, Iterable[float]]) -> FeatureMatrix:
    """Build a validated FeatureMatrix from a scan_id -> vector mapping."""
    if not vectors:
        raise EmptyInput("cannot build a feature matrix from zero vectors")
    scan_ids = tuple(sorted(vectors))
    first = np.asarray(vectors[scan_ids[0]], dtype=np.float64)
    dim = first.shape[0] if first.ndim == 1 else -1
    if first.ndim != 1 or dim < 1:
        raise DimensionMismatch(scan_ids[0], 1, 0)
    values = np.empty((len(scan_ids), dim), dtype=np.float64)
    for i, sid in enumerate(scan_ids):
        vec = np.asarray(vectors[sid], dtype=np.float64)
        if vec.shape != (dim,):
            raise DimensionMismatch(sid, dim, int(vec.size))
        if not np.all(np.isfinite(vec)):
            raise NonFiniteFeature(sid)
        values[i] = vec
    values.setflags(write=False)
    return FeatureMatrix(scan_ids=scan_ids, values=values, _index={s: i for i, s in enumerate(scan_ids)})


def feature_header(dim: int) -> str:
    return ",".join(["scan_id"] + [f"f{i}" for i in range(dim)])


def write_features(features: FeatureMatrix) -> str:
    """Serialize a feature matrix; rows sorted by scan_id, lossless floats."""
    lines = [feature_header(features.dim) + "\n"]
    for i, scan_id in enumerate(features.scan_ids):
        row = ",".join([scan_id] + [repr(float(v)) for v in features.values[i]])
        lines.append(row + "\n")
    return "".join(lines)


def read_features(text: str) -> FeatureMatrix:
    """Parse the scan_id,f0,...,f{d-1} text format back into a FeatureMatrix."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyInput("empty feature file")
    header = lines[0]
    fields = header.split(",")
    if fields[0] != "scan_id" or len(fields) < 2 or header != feature_header(len(fields) - 1):
        raise BadFeatureRow(1, f"bad header {header!r}")
    dim = len(fields) - 1
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise BadFeatureRow(lineno, f"expected {dim + 1} fields, got {len(parts)}")
        scan_id = parts[0]
        if scan_id in vectors:
            raise BadFeatureRow(lineno, f"duplicate scan_id {scan_id!r}")
        try:
            vectors[scan_id] = np.array([float(p) for p in parts[1:]], dtype=np.float64)
        except ValueError:
            raise BadFeatureRow(lineno, "non-numeric feature value") from None
    if not vectors:
        raise EmptyInput("feature file has a header but no rows")
    return build_features(vectors)

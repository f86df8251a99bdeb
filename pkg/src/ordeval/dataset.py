"""Ordinal survey data model, CSV ingestion and the per-attribute diff primitive.

Attribute cells are stored as small integers with ``MISSING == 0``; valid codes
run from 1 to the column's scale maximum. The response column never holds
missing values.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

MISSING = 0
DEFAULT_MISSING_TOKENS = ("", "NA")

# snaps sums of equal rationals onto one float so ties compare equal
DISTANCE_DECIMALS = 12


class DatasetError(ValueError):
    """Raised for invalid or unparsable ordinal data."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        text = f"{message} ({', '.join(where)})" if where else message
        super().__init__(text)
        self.row = row
        self.column = column


@dataclass(frozen=True)
class OrdinalScale:
    """Integer codes ``1..max_code``, optionally labelled."""

    max_code: int = 7
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if int(self.max_code) != self.max_code or self.max_code < 2:
            raise DatasetError(f"scale maximum must be an integer >= 2, got {self.max_code}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.max_code:
                raise DatasetError(
                    f"scale has {self.max_code} codes but {len(self.labels)} labels"
                )

    @property
    def min_code(self) -> int:
        return 1

    @property
    def codes(self) -> range:
        return range(1, self.max_code + 1)

    @property
    def midpoint(self) -> float:
        return (1 + self.max_code) / 2


@dataclass
class ValidationReport:
    rows_read: int = 0
    rows_rejected: int = 0
    inferred_scales: dict[str, int] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_rejected": self.rows_rejected,
            "inferred_scales": dict(self.inferred_scales),
            "errors": list(self.errors),
        }


def _frozen(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class OrdinalDataset:
    """Respondents x ordinal attributes plus one ordinal response.

    ``cells`` is an ``(n, a)`` integer matrix (``MISSING`` for blanks) and
    ``response`` a length-``n`` integer vector. Both are stored read-only.
    """

    attribute_names: tuple[str, ...]
    attribute_scales: tuple[OrdinalScale, ...]
    response_scale: OrdinalScale
    cells: np.ndarray
    response: np.ndarray
    response_name: str = "response"
    report: ValidationReport | None = None

    def __post_init__(self):
        names = tuple(str(x) for x in self.attribute_names)
        scales = tuple(self.attribute_scales)
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "attribute_scales", scales)
        cells = _frozen(self.cells, np.int64)
        response = _frozen(self.response, np.int64)
        if cells.ndim == 1 and len(names) == 1:
            cells = _frozen(cells.reshape(-1, 1), np.int64)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "response", response)

        if len(set(names)) != len(names):
            raise DatasetError("attribute names must be unique")
        if len(names) != len(scales):
            raise DatasetError("one scale per attribute is required")
        if cells.ndim != 2 or cells.shape[1] != len(names):
            raise DatasetError(f"cells must have shape (n, {len(names)}), got {cells.shape}")
        if response.shape != (cells.shape[0],):
            raise DatasetError("response length must match the number of rows")
        if cells.shape[0] < 2:
            raise DatasetError("at least 2 rows are required")
        for j, (name, scale) in enumerate(zip(names, scales)):
            col = cells[:, j]
            bad = np.flatnonzero((col != MISSING) & ((col < 1) | (col > scale.max_code)))
            if bad.size:
                i = int(bad[0])
                raise DatasetError(
                    f"code {col[i]} outside scale 1..{scale.max_code}", row=i, column=name
                )
        bad = np.flatnonzero((response < 1) | (response > self.response_scale.max_code))
        if bad.size:
            raise DatasetError(
                f"response code {response[bad[0]]} outside scale 1..{self.response_scale.max_code}",
                row=int(bad[0]),
                column=self.response_name,
            )
        if np.unique(response).size < 2:
            raise DatasetError("response must take at least 2 distinct values")

    @property
    def n_rows(self) -> int:
        return self.cells.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.cells.shape[1]

    def attribute_index(self, attribute: int | str) -> int:
        if isinstance(attribute, str):
            try:
                return self.attribute_names.index(attribute)
            except ValueError:
                raise KeyError(attribute) from None
        if not 0 <= attribute < self.n_attributes:
            raise IndexError(attribute)
        return int(attribute)

    def take_rows(self, order: Sequence[int]) -> "OrdinalDataset":
        """Dataset with rows reordered/selected by ``order``."""
        order = np.asarray(order)
        return OrdinalDataset(
            self.attribute_names,
            self.attribute_scales,
            self.response_scale,
            self.cells[order],
            self.response[order],
            self.response_name,
        )

    def with_column(self, index: int, values: np.ndarray) -> "OrdinalDataset":
        cells = self.cells.copy()
        cells[:, index] = values
        return OrdinalDataset(
            self.attribute_names,
            self.attribute_scales,
            self.response_scale,
            cells,
            self.response,
            self.response_name,
        )

    def __eq__(self, other):
        if not isinstance(other, OrdinalDataset):
            return NotImplemented
        return (
            self.attribute_names == other.attribute_names
            and self.attribute_scales == other.attribute_scales
            and self.response_scale == other.response_scale
            and self.response_name == other.response_name
            and np.array_equal(self.cells, other.cells)
            and np.array_equal(self.response, other.response)
        )

    __hash__ = None


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _parse_code(token: str, row: int, column: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatasetError(f"non-integer value {token!r}", row=row, column=column) from None


def load_csv(
    source: IO[bytes] | IO[str] | bytes | str,
    response: str,
    scales: Mapping[str, int] | None = None,
    response_scale: int | None = None,
    missing: Iterable[str] = DEFAULT_MISSING_TOKENS,
    attributes: Sequence[str] | None = None,
) -> OrdinalDataset:
    """Read an ordinal dataset from UTF-8 CSV text.

    Parameters
    ----------
    source : bytes, str, or file-like
        CSV content with a header row. A ``str`` is treated as CSV text, not a path.
    response : str
        Name of the response column.
    scales : mapping, optional
        Per-attribute scale maxima. Columns absent here get a scale inferred
        as ``1..max observed code``; those are listed in ``report.inferred_scales``.
    response_scale : int, optional
        Scale maximum of the response; inferred when omitted.
    missing : iterable of str
        Tokens (after whitespace stripping) treated as MISSING.
    attributes : sequence of str, optional
        Attribute columns to use; defaults to every non-response column.

    Returns
    -------
    OrdinalDataset
        With ``report`` holding a :class:`ValidationReport`.

    Raises
    ------
    DatasetError
        On unparsable or out-of-scale cells, an unknown response column, or
        fewer than 2 usable rows.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if source.startswith("﻿"):
        source = source[1:]
    missing = {m.strip() for m in missing}
    scales = dict(scales or {})
    report = ValidationReport()

    reader = csv.reader(io.StringIO(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DatasetError("empty input: header row required") from None
    if response not in header:
        raise DatasetError(f"response column {response!r} not found in header", column=response)
    if attributes is None:
        attributes = [h for h in header if h != response]
    else:
        for name in attributes:
            if name not in header:
                raise DatasetError(f"attribute column {name!r} not found in header", column=name)
    if not attributes:
        raise DatasetError("no attribute columns")
    unknown = set(scales) - set(attributes)
    if unknown:
        raise DatasetError(f"scale given for unknown columns: {sorted(unknown)}")
    col_idx = [header.index(name) for name in attributes]
    resp_idx = header.index(response)

    rows, ys = [], []
    for line_no, record in enumerate(reader, start=2):
        if not record or all(not tok.strip() for tok in record):
            continue
        report.rows_read += 1
        if len(record) != len(header):
            raise DatasetError(
                f"expected {len(header)} fields, found {len(record)}", row=line_no
            )
        y_tok = record[resp_idx].strip()
        if y_tok in missing:
            report.rows_rejected += 1
            report.errors.append(f"row {line_no}: missing response, row dropped")
            continue
        y = _parse_code(y_tok, line_no, response)
        if y < 1 or (response_scale is not None and y > response_scale):
            raise DatasetError(f"response code {y} outside its scale", row=line_no, column=response)
        values = []
        for name, j in zip(attributes, col_idx):
            tok = record[j].strip()
            if tok in missing:
                values.append(MISSING)
                continue
            v = _parse_code(tok, line_no, name)
            top = scales.get(name)
            if v < 1 or (top is not None and v > top):
                bound = f"1..{top}" if top is not None else ">= 1"
                raise DatasetError(f"code {v} outside scale {bound}", row=line_no, column=name)
            values.append(v)
        rows.append(values)
        ys.append(y)

    if len(rows) < 2:
        raise DatasetError(f"fewer than 2 usable rows ({len(rows)})")
    cells = np.array(rows, dtype=np.int64)
    y = np.array(ys, dtype=np.int64)

    attr_scales = []
    for j, name in enumerate(attributes):
        if name in scales:
            attr_scales.append(OrdinalScale(scales[name]))
        else:
            top = max(2, int(cells[:, j].max()))
            report.inferred_scales[name] = top
            attr_scales.append(OrdinalScale(top))
    if response_scale is None:
        response_scale = max(2, int(y.max()))
        report.inferred_scales[response] = response_scale

    return OrdinalDataset(
        tuple(attributes),
        tuple(attr_scales),
        OrdinalScale(response_scale),
        cells,
        y,
        response_name=response,
        report=report,
    )


def to_csv(dataset: OrdinalDataset, missing_token: str = "") -> str:
    """Serialize to the same CSV dialect :func:`load_csv` reads."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*dataset.attribute_names, dataset.response_name])
    for row, y in zip(dataset.cells, dataset.response):
        writer.writerow([missing_token if v == MISSING else int(v) for v in row] + [int(y)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Class-conditional probabilities and distances
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClassConditionalTable:
    """Laplace-smoothed ``P(attribute code | response code)``.

    ``probs[j]`` has shape ``(response_max + 1, attribute_max + 1)``; row and
    column 0 are unused padding so codes index directly.
    """

    probs: tuple[np.ndarray, ...]

    def prob(self, attribute: int, response_code: int, value: int) -> float:
        return float(self.probs[attribute][response_code, value])


def class_conditional(dataset: OrdinalDataset) -> ClassConditionalTable:
    """Add-one smoothed distribution of each attribute's codes within each response class.

    Missing cells do not count. A response code with no rows gets the uniform
    distribution.
    """
    ymax = dataset.response_scale.max_code
    tables = []
    for j, scale in enumerate(dataset.attribute_scales):
        s = scale.max_code
        col = dataset.cells[:, j]
        present = col != MISSING
        counts = np.zeros((ymax + 1, s + 1))
        np.add.at(counts, (dataset.response[present], col[present]), 1.0)
        counts[:, 1:] += 1.0
        counts[0, :] = 0.0
        probs = np.zeros_like(counts)
        probs[1:, 1:] = counts[1:, 1:] / counts[1:, 1:].sum(axis=1, keepdims=True)
        probs.flags.writeable = False
        tables.append(probs)
    return ClassConditionalTable(tuple(tables))


def value_diff(
    attribute: int,
    row_i: int,
    row_j: int,
    dataset: OrdinalDataset,
    table: ClassConditionalTable,
) -> float:
    """Difference of two rows on one attribute, in [0, 1].

    Present codes differ by ``|v_i - v_j| / (s - 1)``. A missing code is
    replaced by its class-conditional expectation of a mismatch.
    """
    vi = int(dataset.cells[row_i, attribute])
    vj = int(dataset.cells[row_j, attribute])
    ci = int(dataset.response[row_i])
    cj = int(dataset.response[row_j])
    p = table.probs[attribute]
    if vi != MISSING and vj != MISSING:
        return abs(vi - vj) / (dataset.attribute_scales[attribute].max_code - 1)
    if vi == MISSING and vj == MISSING:
        return float(1.0 - np.dot(p[ci, 1:], p[cj, 1:]))
    if vi == MISSING:
        return 1.0 - float(p[ci, vj])
    return 1.0 - float(p[cj, vi])


def instance_distance(
    row_i: int,
    row_j: int,
    dataset: OrdinalDataset,
    table: ClassConditionalTable,
    exclude: int | None = None,
) -> float:
    total = 0.0
    for a in range(dataset.n_attributes):
        if a != exclude:
            total += value_diff(a, row_i, row_j, dataset, table)
    return total


def diff_rows(
    dataset: OrdinalDataset,
    table: ClassConditionalTable,
    rows: np.ndarray,
    attribute: int,
) -> np.ndarray:
    """Vectorized ``value_diff`` of ``rows`` against every row: shape ``(len(rows), n)``."""
    rows = np.asarray(rows)
    col = dataset.cells[:, attribute]
    y = dataset.response
    p = table.probs[attribute]
    s = dataset.attribute_scales[attribute].max_code

    vi = col[rows][:, None]
    vj = col[None, :]
    d = np.abs(vi - vj) / (s - 1)
    mi = vi == MISSING
    mj = vj == MISSING
    if mi.any() or mj.any():
        ci = y[rows][:, None]
        cj = y[None, :]
        only_i = mi & ~mj
        only_j = mj & ~mi
        both = mi & mj
        d = np.where(only_i, 1.0 - p[ci, vj], d)
        d = np.where(only_j, 1.0 - p[cj, vi], d)
        if both.any():
            overlap = p[:, 1:] @ p[:, 1:].T
            overlap = (overlap + overlap.T) / 2
            d = np.where(both, 1.0 - overlap[ci, cj], d)
    return d


def distance_matrix(
    dataset: OrdinalDataset,
    table: ClassConditionalTable | None = None,
    exclude: int | None = None,
) -> np.ndarray:
    """All-pairs ``instance_distance``, rounded so mathematically equal sums tie exactly."""
    if table is None:
        table = class_conditional(dataset)
    n = dataset.n_rows
    rows = np.arange(n)
    total = np.zeros((n, n))
    for a in range(dataset.n_attributes):
        if a != exclude:
            total += diff_rows(dataset, table, rows, a)
    return np.round(total, DISTANCE_DECIMALS)

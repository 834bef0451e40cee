"""Typed tabular datasets: CSV ingestion, feature engineering, materialization.

A :class:`Dataset` is immutable. Columns are either numeric (float64 with a
missing mask) or categorical (strings). Engineered columns are appended by
returning a new Dataset, never by mutating one in place, so values are safe
to share across threads and sessions.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

DEFAULT_MISSING_TOKENS = frozenset({"", "NA", "NaN"})

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class Column:
    """One dataset column: metadata plus its values and missing mask."""

    name: str
    kind: str  # NUMERIC or CATEGORICAL
    values: np.ndarray  # float64 for numeric, object (str) for categorical
    missing: np.ndarray  # bool, same length as values
    derived_from: str | None = None  # arithmetic expression for engineered columns
    divzero_count: int = 0

    @property
    def is_derived(self) -> bool:
        return self.derived_from is not None


@dataclass(frozen=True)
class Dataset:
    """Immutable typed table with a missing-value mask and provenance."""

    name: str
    columns: tuple[Column, ...]
    source_path: str = ""
    source_hash: str = ""

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        if any(not n for n in names):
            raise DataError("empty column name")
        lengths = {len(c.values) for c in self.columns}
        if len(lengths) > 1:
            raise DataError("columns have differing lengths")
        for c in self.columns:
            if c.missing.shape != c.values.shape:
                raise DataError(f"mask shape mismatch on column {c.name!r}")

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values) if self.columns else 0

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise DataError(f"unknown column {name!r}")

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def numeric_columns(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == NUMERIC]

    def missing_mask(self) -> np.ndarray:
        """n_rows x n_cols boolean mask (True where missing)."""
        if not self.columns:
            return np.zeros((0, 0), dtype=bool)
        return np.column_stack([c.missing for c in self.columns])

    def row_ids(self) -> range:
        return range(self.n_rows)


def _hash_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_csv(
    path: str,
    delimiter: str = ",",
    missing_tokens: frozenset[str] | set[str] = DEFAULT_MISSING_TOKENS,
    name: str | None = None,
) -> Dataset:
    """Load a header-first CSV into a typed Dataset.

    A column is numeric iff every non-missing cell parses as a number.
    Cells matching ``missing_tokens`` set the missing mask. Ragged rows and
    duplicate header names are errors.
    """
    missing_tokens = frozenset(missing_tokens)
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header required") from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise DataError(f"{path}: duplicate header names {dupes}")
        if any(not h.strip() for h in header):
            raise DataError(f"{path}: blank header name")
        n_cols = len(header)
        cells: list[list[str]] = []
        for i, row in enumerate(reader):
            if len(row) != n_cols:
                raise DataError(
                    f"{path}: ragged row {i} has {len(row)} cells, expected {n_cols}"
                )
            cells.append(row)

    n_rows = len(cells)
    columns = []
    for j, col_name in enumerate(header):
        raw = [cells[i][j] for i in range(n_rows)]
        missing = np.array([v in missing_tokens for v in raw], dtype=bool)
        numeric = True
        parsed = np.zeros(n_rows, dtype=np.float64)
        for i, v in enumerate(raw):
            if missing[i]:
                parsed[i] = np.nan
                continue
            try:
                parsed[i] = float(v)
                if math.isnan(parsed[i]):
                    # an explicit "nan" literal not in missing_tokens is
                    # treated as a missing numeric cell
                    missing[i] = True
            except ValueError:
                numeric = False
                break
        if numeric:
            parsed[missing] = np.nan
            columns.append(Column(col_name.strip(), NUMERIC, parsed, missing))
        else:
            vals = np.array(raw, dtype=object)
            vals[missing] = None
            columns.append(Column(col_name.strip(), CATEGORICAL, vals, missing))

    ds = Dataset(
        name=name or path,
        columns=tuple(columns),
        source_path=path,
        source_hash=_hash_file(path),
    )
    log.info("loaded %s: %d rows, %d columns", path, ds.n_rows, ds.n_cols)
    return ds


# --------------------------------------------------------------------------
# Feature engineering: arithmetic expressions over numeric columns
# --------------------------------------------------------------------------

_ARITH_OPS = {"+", "-", "*", "/"}


class _ArithParser:
    """Recursive descent for +, -, *, / with parentheses and unary minus."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise DataError(f"expression error at offset {self.pos}: {msg}")

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return node

    def expr(self):
        node = self.term()
        while (ch := self.peek()) and ch in "+-":
            self.pos += 1
            node = (ch, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while (ch := self.peek()) and ch in "*/":
            self.pos += 1
            node = (ch, node, self.factor())
        return node

    def factor(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return node
        if ch == "-":
            self.pos += 1
            return ("neg", self.factor())
        if ch.isdigit() or ch == ".":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isdigit() or self.text[self.pos] in ".eE"
                or (self.text[self.pos] in "+-" and self.text[self.pos - 1] in "eE")
            ):
                self.pos += 1
            try:
                return ("lit", float(self.text[start : self.pos]))
            except ValueError:
                self.pos = start
                self.error("bad numeric literal")
        if ch.isalpha() or ch == "_":
            start = self.pos
            while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"
            ):
                self.pos += 1
            return ("col", self.text[start : self.pos])
        self.error("expected column, number or '('")


def expression_columns(expression: str) -> set[str]:
    """Column names referenced by an arithmetic expression."""
    node = _ArithParser(expression).parse()
    out: set[str] = set()

    def walk(n):
        if n[0] == "col":
            out.add(n[1])
        elif n[0] == "neg":
            walk(n[1])
        elif n[0] in _ARITH_OPS:
            walk(n[1])
            walk(n[2])

    walk(node)
    return out


def engineer_feature(dataset: Dataset, name: str, expression: str) -> Dataset:
    """Append a derived numeric column computed from existing numeric columns.

    A cell is missing iff any referenced cell is missing; division by zero
    also yields a missing cell and is counted on the new column's
    ``divzero_count``.
    """
    if dataset.has_column(name):
        raise DataError(f"column {name!r} already exists")
    node = _ArithParser(expression).parse()
    refs = expression_columns(expression)
    for ref in sorted(refs):
        if not dataset.has_column(ref):
            raise DataError(f"unknown column {ref!r} in expression")
        col = dataset.column(ref)
        if col.kind != NUMERIC:
            raise DataError(f"column {ref!r} is categorical, not usable in arithmetic")
        if col.is_derived:
            raise DataError(f"column {ref!r} is derived; expressions may only use original columns")

    n = dataset.n_rows
    missing = np.zeros(n, dtype=bool)
    divzero = 0

    def ev(nd) -> np.ndarray:
        nonlocal divzero
        tag = nd[0]
        if tag == "lit":
            return np.full(n, nd[1], dtype=np.float64)
        if tag == "col":
            c = dataset.column(nd[1])
            missing[:] |= c.missing
            return c.values
        if tag == "neg":
            return -ev(nd[1])
        a, b = ev(nd[1]), ev(nd[2])
        if tag == "+":
            return a + b
        if tag == "-":
            return a - b
        if tag == "*":
            return a * b
        # division: zero divisor => missing cell
        zero = (b == 0) & ~missing
        divzero += int(zero.sum())
        missing[:] |= zero
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(b == 0, np.nan, a / b)

    values = ev(node).astype(np.float64, copy=True)
    values[missing] = np.nan
    if divzero:
        log.warning("engineer_feature %r: %d division(s) by zero set missing", name, divzero)
    new_col = Column(name, NUMERIC, values, missing, derived_from=expression,
                     divzero_count=divzero)
    return replace(dataset, columns=dataset.columns + (new_col,))


# --------------------------------------------------------------------------
# Materialization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MaterializedMatrix:
    """Dense numeric matrix for a (rows, features) selection of a dataset.

    Missing cells are median-imputed over the selected rows. When
    ``standardized``, non-constant columns are z-scored with population std
    (constant columns are flagged ``zero_variance`` and left unscaled).
    ``column_means`` / ``column_stds`` are in source-column units.
    """

    row_ids: tuple[int, ...]
    feature_ids: tuple[str, ...]
    data: np.ndarray  # n x f float64, row-major
    standardized: bool
    column_means: np.ndarray
    column_stds: np.ndarray
    zero_variance: tuple[bool, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def f(self) -> int:
        return self.data.shape[1]

    def feature_index(self, feature_id: str) -> int:
        try:
            return self.feature_ids.index(feature_id)
        except ValueError:
            raise DataError(f"feature {feature_id!r} not in matrix") from None


def materialize(
    dataset: Dataset,
    rows,
    features,
    standardize: bool = False,
) -> MaterializedMatrix:
    """Build the analysis matrix for ``rows`` x ``features``.

    Rows are ordered ascending by id, features in dataset column order.
    Deterministic: identical inputs give bit-identical matrices.
    """
    row_list = sorted(int(r) for r in rows)
    if not row_list:
        raise DataError("materialize needs at least one row")
    if row_list[0] < 0 or row_list[-1] >= dataset.n_rows:
        raise DataError("row id out of range")
    wanted = set(features)
    feat_list = [c.name for c in dataset.columns if c.name in wanted]
    if len(feat_list) != len(wanted):
        unknown = sorted(wanted - set(feat_list))
        raise DataError(f"unknown feature(s) {unknown}")
    if not feat_list:
        raise DataError("materialize needs at least one feature")

    idx = np.asarray(row_list, dtype=np.intp)
    cols = []
    for fname in feat_list:
        col = dataset.column(fname)
        if col.kind != NUMERIC:
            raise DataError(f"feature {fname!r} is categorical")
        vals = col.values[idx].astype(np.float64, copy=True)
        miss = col.missing[idx]
        if miss.all():
            raise DataError(f"column {fname!r} is entirely missing in the selection")
        if miss.any():
            median = float(np.median(vals[~miss]))
            vals[miss] = median
        cols.append(vals)

    data = np.column_stack(cols)
    means = data.mean(axis=0)
    stds = data.std(axis=0)  # population std; see module docstring
    zero_var = stds == 0.0
    if standardize:
        scale = np.where(zero_var, 1.0, stds)
        data = (data - means) / scale
    return MaterializedMatrix(
        row_ids=tuple(row_list),
        feature_ids=tuple(feat_list),
        data=data,
        standardized=standardize,
        column_means=means,
        column_stds=stds,
        zero_variance=tuple(bool(z) for z in zero_var),
    )

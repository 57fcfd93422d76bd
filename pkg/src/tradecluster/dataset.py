"""Loading, cleaning and summarising entity/indicator tables."""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllMissingColumn,
    DuplicateEntityId,
    EmptyColumn,
    EmptyInput,
    InvalidTable,
    MissingColumn,
    MissingFile,
    NonPositiveRate,
)

ID_COLUMN = "entity_id"
MISSING_TOKENS = frozenset({"", "NA"})
ADJUSTED_SUFFIX = "rate-adjusted"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Column:
    name: str
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())


@dataclass(frozen=True)
class Provenance:
    source: str
    loaded_at: str


@dataclass(frozen=True)
class IndicatorTable:
    """Entities (rows) described by named numeric indicator columns."""

    entity_ids: tuple[str, ...]
    columns: tuple[Column, ...]
    provenance: Provenance | None = None

    def __post_init__(self):
        object.__setattr__(self, "entity_ids", tuple(self.entity_ids))
        object.__setattr__(self, "columns", tuple(self.columns))
        seen = set()
        for eid in self.entity_ids:
            if not eid:
                raise InvalidTable("entity ids must be non-empty")
            if eid in seen:
                raise DuplicateEntityId(eid)
            seen.add(eid)
        if not self.columns:
            raise InvalidTable("table needs at least one numeric column")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise InvalidTable(f"duplicate column names in {names}")
        for col in self.columns:
            if col.values.shape != (len(self.entity_ids),):
                raise InvalidTable(
                    f"column {col.name!r} has {col.values.size} values for "
                    f"{len(self.entity_ids)} entities"
                )

    @property
    def n(self) -> int:
        return len(self.entity_ids)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise MissingColumn(name)

    def select(self, names: Sequence[str]) -> IndicatorTable:
        return replace(self, columns=tuple(self.column(n) for n in names))

    def with_columns(self, columns: Iterable[Column]) -> IndicatorTable:
        return replace(self, columns=tuple(columns))

    def matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.column_names if names is None else names
        if not names:
            return np.empty((self.n, 0))
        return np.column_stack([self.column(n).values for n in names])


@dataclass(frozen=True)
class FeatureMatrix:
    """Standardized n x d features plus the (mean, sd) used per column."""

    X: np.ndarray
    feature_names: tuple[str, ...]
    means: np.ndarray
    sds: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def inverse_transform(self, Z: np.ndarray | None = None) -> np.ndarray:
        Z = self.X if Z is None else np.asarray(Z, dtype=float)
        return Z * self.sds + self.means


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    median: float
    sd: float
    min: float
    max: float

    def as_row(self) -> list[float]:
        return [self.mean, self.median, self.sd, self.min, self.max]


@dataclass(frozen=True)
class ImputeResult:
    table: IndicatorTable
    count: int
    per_column: dict[str, int] = field(default_factory=dict)


def _parse_cell(text: str) -> float:
    text = text.strip()
    if text in MISSING_TOKENS:
        return math.nan
    try:
        value = float(text.replace(",", ""))
    except ValueError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def load_csv(path, schema: Sequence[str] | None = None, units: dict[str, str] | str = "") -> IndicatorTable:
    """Read a UTF-8 CSV with an ``entity_id`` column and numeric indicators.

    ``schema`` lists the indicator columns to keep (all non-id columns when
    omitted). Empty cells, ``NA`` and anything non-numeric become NaN.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InvalidTable(f"{path}: no header row") from None
        rows = [r for r in reader if any(cell.strip() for cell in r)]

    id_idx = header.index(ID_COLUMN) if ID_COLUMN in header else 0
    if schema is None:
        schema = [h for i, h in enumerate(header) if i != id_idx]
    positions = {}
    for name in schema:
        if name not in header:
            raise MissingColumn(name)
        positions[name] = header.index(name)

    ids = []
    values = {name: [] for name in schema}
    for lineno, row in enumerate(rows, start=2):
        if len(row) < len(header):
            row = row + [""] * (len(header) - len(row))
        eid = row[id_idx].strip()
        if not eid:
            raise InvalidTable(f"{path}:{lineno}: empty entity id")
        ids.append(eid)
        for name, pos in positions.items():
            values[name].append(_parse_cell(row[pos]))

    if isinstance(units, str):
        units = {name: units for name in schema}
    columns = [Column(name, values[name], units.get(name, "")) for name in schema]
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return IndicatorTable(tuple(ids), tuple(columns), Provenance(path, stamp))


def adjust_for_rate(table: IndicatorTable, rate: float | str, columns: Sequence[str] | None = None) -> IndicatorTable:
    """Divide indicator values by a positive scalar or a per-entity rate column.

    When ``rate`` names a column, that column is left untouched and excluded
    from the default selection.
    """
    if isinstance(rate, str):
        divisor = table.column(rate).values
        for eid, r in zip(table.entity_ids, divisor):
            if not (r > 0):
                raise NonPositiveRate(f"rate {r} for entity {eid!r} is not positive", eid)
        skip = {rate}
    else:
        rate = float(rate)
        if not (rate > 0) or not math.isfinite(rate):
            raise NonPositiveRate(f"rate {rate} is not positive")
        divisor = rate
        skip = set()

    if columns is None:
        columns = [c for c in table.column_names if c not in skip]
    targets = set(columns)
    for name in targets:
        table.column(name)

    out = []
    for col in table.columns:
        if col.name in targets:
            unit = f"{col.unit}, {ADJUSTED_SUFFIX}" if col.unit else ADJUSTED_SUFFIX
            out.append(Column(col.name, col.values / divisor, unit))
        else:
            out.append(col)
    return table.with_columns(out)


def impute_missing(table: IndicatorTable) -> ImputeResult:
    """Fill missing cells with the median of the observed values in the column."""
    out = []
    per_column = {}
    for col in table.columns:
        mask = np.isnan(col.values)
        n_missing = int(mask.sum())
        per_column[col.name] = n_missing
        if not n_missing:
            out.append(col)
            continue
        if n_missing == col.values.size:
            raise AllMissingColumn(col.name)
        filled = col.values.copy()
        filled[mask] = np.median(col.values[~mask])
        out.append(Column(col.name, filled, col.unit))
    return ImputeResult(table.with_columns(out), sum(per_column.values()), per_column)


def standardize(table: IndicatorTable, columns: Sequence[str] | None = None) -> FeatureMatrix:
    """Z-score each column with the population sd.

    A column whose values are all identical maps to zeros and records sd 1.
    """
    names = table.column_names if columns is None else list(columns)
    if table.n == 0:
        raise EmptyInput("cannot standardize a table with no rows")
    raw = table.matrix(names)
    if np.isnan(raw).any():
        bad = [n for n in names if np.isnan(table.column(n).values).any()]
        raise InvalidTable(f"columns {bad} still contain missing values; impute first")
    means = raw.mean(axis=0)
    sds = raw.std(axis=0)
    # sd can underflow to zero for distinct subnormal values
    constant = (raw.max(axis=0) == raw.min(axis=0)) | (sds == 0)
    sds[constant] = 1.0
    X = (raw - means) / sds
    X[:, constant] = 0.0
    return FeatureMatrix(X, tuple(names), means, sds)


def describe(column) -> DescriptiveStats:
    """Mean, median, population sd, min and max of a column."""
    values = np.asarray(column, dtype=float)
    if values.size == 0:
        raise EmptyColumn("cannot describe an empty column")
    lo, hi = float(values.min()), float(values.max())
    # the floating mean of a near-constant column can drift an ulp outside [min, max]
    mean = min(max(float(values.mean()), lo), hi)
    return DescriptiveStats(mean, float(np.median(values)), float(values.std()), lo, hi)


def describe_table(table: IndicatorTable) -> dict[str, DescriptiveStats]:
    return {col.name: describe(col.values[~np.isnan(col.values)]) for col in table.columns}


STATS_HEADER = ["variable", "mean", "median", "sd", "min", "max"]


def descriptive_csv(stats: dict[str, DescriptiveStats]) -> str:
    """Render stats as CSV text, one row per variable."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    for name, st in stats.items():
        writer.writerow([name, *(repr(v) for v in st.as_row())])
    return buf.getvalue()

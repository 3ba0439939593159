"""Typed tabular data: loaders, sensitive-feature derivation, partitions.

The German Credit loader understands the classic whitespace-separated,
A-coded file (21 fields per line, label 1=good / 2=bad).  A generic CSV
loader keeps the engine model-agnostic.  Datasets are immutable after
load; "mutating" helpers return new Dataset objects sharing column data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

GOOD = "good"
BAD = "bad"

CATEGORICAL = "categorical"
INTEGER = "integer"
DERIVED = "derived"


class ParseError(ValueError):
    """Malformed input file (bad field count, unknown code, empty file)."""


class EmptyClassError(ValueError):
    """Distribution requested over an empty row set.

    Raised instead of returning a degenerate distribution so that callers
    can record a warning and skip the comparison rather than crash.
    """


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # CATEGORICAL | INTEGER | DERIVED
    values: tuple

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, INTEGER, DERIVED):
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass(frozen=True)
class Dataset:
    """An immutable labelled table.

    Every row has a value for every column, the outcome column holds
    good/bad labels only, and the table is non-empty.
    """

    columns: tuple[Column, ...]
    outcome: str

    def __post_init__(self):
        if not self.columns:
            raise ValueError("dataset has no columns")
        sizes = {len(c.values) for c in self.columns}
        if len(sizes) != 1:
            raise ValueError("columns have differing lengths")
        if next(iter(sizes)) == 0:
            raise ValueError("dataset has no rows")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")
        if self.outcome not in names:
            raise ValueError(f"outcome column {self.outcome!r} not present")
        bad_labels = set(self.column(self.outcome).values) - {GOOD, BAD}
        if bad_labels:
            raise ValueError(f"outcome values outside {{good, bad}}: {sorted(bad_labels)}")

    @property
    def size(self) -> int:
        return len(self.columns[0].values)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise ValueError(f"unknown column {name!r}")

    def row(self, index: int) -> dict:
        return {c.name: c.values[index] for c in self.columns}

    def with_columns(self, new: list[Column]) -> "Dataset":
        """Return a dataset with the given columns added or replaced."""
        by_name = {c.name: c for c in new}
        cols = [by_name.pop(c.name, c) for c in self.columns]
        cols.extend(by_name[c.name] for c in new if c.name in by_name)
        return replace(self, columns=tuple(cols))


@dataclass(frozen=True)
class SensitiveSpec:
    """A sensitive feature: the column holding its class labels and the
    ordered, pairwise-distinct class labels it can take."""

    name: str
    column: str
    classes: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("sensitive classes must be pairwise distinct")
        if len(self.classes) < 2:
            raise ValueError("a sensitive feature needs at least two classes")


@dataclass(frozen=True)
class FeaturePartition:
    """The cells induced by a sensitive feature under optional conditions.

    Cells are pairwise disjoint and their union is exactly the set of rows
    matching `conditions`.  Empty cells are kept (they are flagged with
    warnings downstream, never silently dropped).
    """

    feature: SensitiveSpec
    cells: dict  # class label -> tuple of row indices
    conditions: tuple[tuple[str, str], ...]

    def non_empty(self) -> list[str]:
        return [c for c in self.feature.classes if self.cells[c]]

    def empty(self) -> list[str]:
        return [c for c in self.feature.classes if not self.cells[c]]

    @property
    def covered(self) -> int:
        return sum(len(rows) for rows in self.cells.values())


@dataclass(frozen=True)
class ProbabilityDistribution:
    support: tuple[str, ...]
    mass: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass lengths differ")
        if any(m < 0.0 or m > 1.0 for m in self.mass):
            raise ValueError("masses must lie in [0, 1]")
        if abs(math.fsum(self.mass) - 1.0) > 1e-9:
            raise ValueError("masses must sum to 1")

    @classmethod
    def from_counts(cls, support, counts) -> "ProbabilityDistribution":
        """Empirical distribution from per-label counts.

        The last nonzero mass is adjusted so the float masses sum to
        exactly 1.0, which keeps degenerate divergence values (JS of
        disjoint supports) exact.
        """
        counts = list(counts)
        total = sum(counts)
        if total <= 0:
            raise EmptyClassError("cannot build a distribution from zero counts")
        mass = [c / total for c in counts]
        nonzero = [i for i, m in enumerate(mass) if m > 0.0]
        last = nonzero[-1]
        rest = [mass[i] for i in nonzero[:-1]]
        mass[last] = max(0.0, float(math.fsum([1.0] + [-m for m in rest])))
        return cls(tuple(support), tuple(mass))

    def prob(self, label: str) -> float:
        return self.mass[self.support.index(label)]


# --- German Credit loader -------------------------------------------------

_CODE_DOMAINS = {
    "Attribute1": {f"A1{i}" for i in range(1, 5)},
    "Attribute3": {f"A3{i}" for i in range(0, 5)},
    "Attribute4": {f"A4{i}" for i in range(0, 11)},
    "Attribute6": {f"A6{i}" for i in range(1, 6)},
    "Attribute7": {f"A7{i}" for i in range(1, 6)},
    "Attribute9": {f"A9{i}" for i in range(1, 6)},
    "Attribute10": {f"A10{i}" for i in range(1, 4)},
    "Attribute12": {f"A12{i}" for i in range(1, 5)},
    "Attribute14": {f"A14{i}" for i in range(1, 4)},
    "Attribute15": {f"A15{i}" for i in range(1, 4)},
    "Attribute17": {f"A17{i}" for i in range(1, 5)},
    "Attribute19": {f"A19{i}" for i in range(1, 3)},
    "Attribute20": {f"A20{i}" for i in range(1, 3)},
}
_INTEGER_ATTRS = {"Attribute2", "Attribute5", "Attribute8", "Attribute11",
                  "Attribute13", "Attribute16", "Attribute18"}
_ATTRS = tuple(f"Attribute{i}" for i in range(1, 21))


def load_german_credit(path) -> Dataset:
    """Load the UCI-format German Credit file (A-coded, 21 fields/line)."""
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()

    raw: list[list] = []
    outcome: list[str] = []
    n_parsed = 0
    for lineno, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            raise ParseError(f"line {lineno}: blank line")
        if len(fields) != 21:
            raise ParseError(f"line {lineno}: expected 21 fields, got {len(fields)}")
        rec = []
        for attr, value in zip(_ATTRS, fields[:20]):
            if attr in _INTEGER_ATTRS:
                try:
                    rec.append(int(value))
                except ValueError:
                    raise ParseError(f"line {lineno}: non-integer value {value!r} for {attr}") from None
            else:
                if value not in _CODE_DOMAINS[attr]:
                    raise ParseError(f"line {lineno}: unknown code {value!r} for {attr}")
                rec.append(value)
        if fields[20] not in ("1", "2"):
            raise ParseError(f"line {lineno}: label must be 1 or 2, got {fields[20]!r}")
        outcome.append(GOOD if fields[20] == "1" else BAD)
        raw.append(rec)
        n_parsed += 1
    if n_parsed == 0:
        raise ParseError(f"{path}: empty file")

    columns = [
        Column(attr, INTEGER if attr in _INTEGER_ATTRS else CATEGORICAL,
               tuple(rec[i] for rec in raw))
        for i, attr in enumerate(_ATTRS)
    ]
    columns.append(Column("outcome", CATEGORICAL, tuple(outcome)))
    return Dataset(columns=tuple(columns), outcome="outcome")


def load_csv(path, outcome_column: str, good_value: str = GOOD,
             bad_value: str = BAD) -> Dataset:
    """Load a generic labelled CSV (header row, comma separated).

    Column types are inferred: integer if every value parses as int,
    categorical otherwise.  Outcome values are mapped onto good/bad.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        rows = list(reader)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    if outcome_column not in header:
        raise ParseError(f"{path}: outcome column {outcome_column!r} not in header")
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")

    columns = []
    for i, name in enumerate(header):
        values = [row[i] for row in rows]
        if name == outcome_column:
            mapped = []
            for lineno, v in enumerate(values, start=2):
                if v == good_value:
                    mapped.append(GOOD)
                elif v == bad_value:
                    mapped.append(BAD)
                else:
                    raise ParseError(f"line {lineno}: outcome value {v!r} is neither "
                                     f"{good_value!r} nor {bad_value!r}")
            columns.append(Column(name, CATEGORICAL, tuple(mapped)))
            continue
        try:
            columns.append(Column(name, INTEGER, tuple(int(v) for v in values)))
        except ValueError:
            columns.append(Column(name, CATEGORICAL, tuple(values)))
    return Dataset(columns=tuple(columns), outcome=outcome_column)


# --- Sensitive features ----------------------------------------------------

_FEMALE_CODES = {"A92", "A95"}
_MALE_CODES = {"A91", "A93", "A94"}

GENDER = SensitiveSpec("gender", "gender", ("male", "female"))
AGE_GROUP = SensitiveSpec("age_group", "age_group", ("[0-27]", "[27-37]", "[37-47]", "[>47]"))
FOREIGN = SensitiveSpec("foreign", "foreign", ("foreign", "domestic"))

BUILTIN_SENSITIVE = {s.name: s for s in (GENDER, AGE_GROUP, FOREIGN)}


def age_bracket(age: int) -> str:
    # Shared printed endpoints are lower-inclusive (27 -> [27-37], 37 -> [37-47]);
    # [>47] starts at 48, so [37-47] covers ages 37..47.
    if age < 27:
        return "[0-27]"
    if age < 37:
        return "[27-37]"
    if age < 48:
        return "[37-47]"
    return "[>47]"


def derive_sensitive_features(d: Dataset) -> Dataset:
    """Add gender / age_group / foreign columns derived from the raw attributes.

    Idempotent: re-deriving replaces the columns with identical values.
    """
    for src in ("Attribute9", "Attribute13", "Attribute20"):
        if not d.has_column(src):
            raise ValueError(f"cannot derive sensitive features: missing column {src!r}")

    genders = []
    for code in d.column("Attribute9").values:
        if code in _FEMALE_CODES:
            genders.append("female")
        elif code in _MALE_CODES:
            genders.append("male")
        else:
            raise ValueError(f"unmappable personal-status code {code!r}")
    ages = [age_bracket(int(a)) for a in d.column("Attribute13").values]
    foreign = []
    for code in d.column("Attribute20").values:
        if code == "A201":
            foreign.append("foreign")
        elif code == "A202":
            foreign.append("domestic")
        else:
            raise ValueError(f"unmappable foreign-worker code {code!r}")

    return d.with_columns([
        Column("gender", DERIVED, tuple(genders)),
        Column("age_group", DERIVED, tuple(ages)),
        Column("foreign", DERIVED, tuple(foreign)),
    ])


def sensitive_spec_for(d: Dataset, name: str) -> SensitiveSpec:
    """Resolve a sensitive feature by name: builtin or any categorical column."""
    if name in BUILTIN_SENSITIVE:
        return BUILTIN_SENSITIVE[name]
    if d.has_column(name):
        classes = tuple(sorted(set(d.column(name).values)))
        return SensitiveSpec(name, name, classes)
    raise ValueError(f"unknown sensitive feature {name!r}")


# --- Partitions and distributions ------------------------------------------

def partition(d: Dataset, feature: SensitiveSpec,
              conditions=()) -> FeaturePartition:
    """Partition the rows matching `conditions` by sensitive class."""
    if not d.has_column(feature.column):
        raise ValueError(f"sensitive column {feature.column!r} not in dataset")
    conditions = tuple((str(c), v) for c, v in conditions)
    for col, value in conditions:
        column = d.column(col)  # raises on unknown column
        if value not in set(column.values):
            raise ValueError(f"value {value!r} never occurs in column {col!r}")

    labels = d.column(feature.column).values
    cells: dict = {c: [] for c in feature.classes}
    for i in range(d.size):
        if all(d.column(col).values[i] == value for col, value in conditions):
            label = labels[i]
            if label not in cells:
                raise ValueError(f"class label {label!r} outside declared classes "
                                 f"of {feature.name!r}")
            cells[label].append(i)
    return FeaturePartition(feature=feature,
                            cells={c: tuple(rows) for c, rows in cells.items()},
                            conditions=conditions)


def outcome_support(d: Dataset, outcome: str) -> tuple[str, ...]:
    """The ordered label domain of an outcome column over the whole dataset."""
    return tuple(sorted(set(d.column(outcome).values)))


def label_distribution(d: Dataset, rows, outcome: str) -> ProbabilityDistribution:
    """Empirical outcome distribution over a row-index set.

    The support is the outcome domain of the full dataset, so distributions
    of different cells are always comparable.  An empty row set raises
    EmptyClassError (a signal for the caller, not a crash).
    """
    rows = tuple(rows)
    if not rows:
        raise EmptyClassError(f"empty row set for outcome {outcome!r}")
    support = outcome_support(d, outcome)
    values = d.column(outcome).values
    counts = [0] * len(support)
    index = {label: i for i, label in enumerate(support)}
    for r in rows:
        counts[index[values[r]]] += 1
    return ProbabilityDistribution.from_counts(support, counts)

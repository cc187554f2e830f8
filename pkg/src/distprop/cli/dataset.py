"""CSV ingestion into typed columns with explicit missing-value masks."""

import csv
from dataclasses import dataclass

import numpy as np

from distprop.errors import DomainError

MISSING = frozenset({"", "NA"})


@dataclass
class Column:
    name: str
    raw: list  # str, or None where missing
    numeric: np.ndarray = None  # float values with NaN where missing, None if categorical

    @property
    def kind(self):
        return "numeric" if self.numeric is not None else "categorical"

    @property
    def missing(self):
        return np.array([v is None for v in self.raw], dtype=bool)

    def levels(self, mask=None):
        vals = self.raw if mask is None else [v for v, k in zip(self.raw, mask) if k]
        return sorted({v for v in vals if v is not None})


@dataclass
class Dataset:
    columns: dict
    n_rows: int

    @property
    def names(self):
        return list(self.columns)

    def __getitem__(self, name):
        try:
            return self.columns[name]
        except KeyError:
            raise DomainError(f"unknown column {name!r}") from None

    def complete_mask(self, names):
        keep = np.ones(self.n_rows, dtype=bool)
        for name in names:
            keep &= ~self[name].missing
        return keep


def _to_numeric(raw):
    out = np.empty(len(raw))
    for i, v in enumerate(raw):
        if v is None:
            out[i] = np.nan
            continue
        try:
            out[i] = float(v)
        except ValueError:
            return None
    return out


def from_rows(header, rows):
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise DomainError("duplicate column names in header")
    cols = {h: [] for h in header}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DomainError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        for h, v in zip(header, row):
            v = v.strip()
            cols[h].append(None if v in MISSING else v)
    n = len(next(iter(cols.values()))) if cols else 0
    return Dataset(
        columns={h: Column(h, raw, _to_numeric(raw)) for h, raw in cols.items()},
        n_rows=n,
    )


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty file") from None
        return from_rows(header, [r for r in reader if r])

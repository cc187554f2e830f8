"""Model formulas of the form ``response ~ term + term``."""

import re
from dataclasses import dataclass

import numpy as np

from distprop.errors import DistPropError, DomainError
from distprop.fitting import Factor

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)|(?P<op>[~+])|(?P<bad>\S))")


class FormulaError(DistPropError, ValueError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} at byte {offset}"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Formula:
    response: str
    terms: tuple


def _tokens(text):
    pos = 0
    raw = text.encode("utf-8")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = len(text[: m.start(m.lastgroup)].encode("utf-8"))
        if m.lastgroup == "bad":
            raise FormulaError(f"unexpected character {m.group('bad')!r}", start)
        yield m.lastgroup, m.group(m.lastgroup), start
        pos = m.end()
    yield "end", "", len(raw)


def parse_formula(text):
    if not text or not text.strip():
        raise FormulaError("empty formula", 0)
    toks = list(_tokens(text))
    i = 0

    def expect(kind, what):
        nonlocal i
        k, v, off = toks[i]
        if k != kind or (kind == "op" and v != what):
            found = "end of input" if k == "end" else repr(v)
            raise FormulaError(f"expected {what}, found {found}", off)
        i += 1
        return v, off

    response, _ = expect("ident", "identifier")
    expect("op", "~")
    terms = []
    while True:
        name, off = expect("ident", "identifier")
        if name == response:
            raise FormulaError(f"response {name!r} used as a term", off)
        if name in terms:
            raise FormulaError(f"duplicate term {name!r}", off)
        terms.append(name)
        if toks[i][0] == "end":
            break
        expect("op", "+")
    return Formula(response=response, terms=tuple(terms))


def build_design(data, formula, categorical=(), reference=None):
    """Design matrix with intercept and reference-coded dummies.

    Rows missing any used column are dropped first. Returns
    ``(X, y, labels, factors, n_deleted)``.
    """
    reference = reference or {}
    used = [formula.response, *formula.terms]
    for name in used:
        data[name]
    keep = data.complete_mask(used)
    y_col = data[formula.response]
    if y_col.numeric is None:
        raise DomainError(f"response {formula.response!r} is not numeric")
    y = y_col.numeric[keep]
    n = int(keep.sum())
    cols = [np.ones(n)]
    labels = ["(Intercept)"]
    factors = []
    for name in formula.terms:
        col = data[name]
        if col.numeric is not None and name not in categorical:
            cols.append(col.numeric[keep])
            labels.append(name)
            continue
        levels = col.levels(keep)
        ref = reference.get(name, levels[0] if levels else None)
        if ref not in levels:
            raise DomainError(f"reference level {ref!r} not present in {name!r}")
        others = tuple(lev for lev in levels if lev != ref)
        raw = [v for v, k in zip(col.raw, keep) if k]
        dummy_labels = []
        for lev in others:
            cols.append(np.array([1.0 if v == lev else 0.0 for v in raw]))
            dummy_labels.append(f"{name}{lev}")
        labels.extend(dummy_labels)
        factors.append(Factor(name=name, reference=ref, levels=others, columns=tuple(dummy_labels)))
    X = np.column_stack(cols)
    return X, y, labels, factors, int(data.n_rows - n)

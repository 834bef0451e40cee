"""Row-filter DSL: AND/OR trees of equality and inequality predicates.

Grammar (keywords case-insensitive, AND binds tighter than OR)::

    expr    := term ("or" term)*
    term    := factor ("and" factor)*
    factor  := "(" expr ")" | ident op literal
    op      := "==" | "!=" | "<" | "<=" | ">" | ">="
    literal := number | quoted string

A predicate over a missing cell evaluates false, so rows missing a
referenced cell never satisfy that predicate; this keeps the distributive
identities result(Or(a,b)) == result(a) | result(b) and
result(And(a,b)) == result(a) & result(b) exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CATEGORICAL, NUMERIC, Dataset
from .errors import FilterError

OPS = ("==", "!=", "<", "<=", ">", ">=")
_ORDERING_OPS = {"<", "<=", ">", ">="}


@dataclass(frozen=True)
class Pred:
    column: str
    op: str
    value: float | str

    def __post_init__(self):
        if self.op not in OPS:
            raise FilterError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise FilterError("And requires at least 2 children")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise FilterError("Or requires at least 2 children")


FilterExpr = Pred | And | Or


# --------------------------------------------------------------------------
# Lexer / parser
# --------------------------------------------------------------------------

_OP_CHARS = set("<>=!")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def tokens(self):
        """Yield (kind, value, offset) triples; kind in
        ident/op/number/string/lparen/rparen/end."""
        text = self.text
        n = len(text)
        while True:
            while self.pos < n and text[self.pos].isspace():
                self.pos += 1
            if self.pos >= n:
                yield ("end", "", self.pos)
                return
            start = self.pos
            ch = text[start]
            if ch == "(":
                self.pos += 1
                yield ("lparen", "(", start)
            elif ch == ")":
                self.pos += 1
                yield ("rparen", ")", start)
            elif ch in _OP_CHARS:
                while self.pos < n and text[self.pos] in _OP_CHARS:
                    self.pos += 1
                op = text[start : self.pos]
                if op not in OPS:
                    raise FilterError(f"syntax error at offset {start}: bad operator {op!r}", start)
                yield ("op", op, start)
            elif ch == '"':
                self.pos += 1
                out = []
                while self.pos < n and text[self.pos] != '"':
                    if text[self.pos] == "\\" and self.pos + 1 < n:
                        self.pos += 1
                    out.append(text[self.pos])
                    self.pos += 1
                if self.pos >= n:
                    raise FilterError(f"syntax error at offset {start}: unterminated string", start)
                self.pos += 1
                yield ("string", "".join(out), start)
            elif ch.isdigit() or ch == "." or (ch in "+-" and start + 1 < n and (text[start + 1].isdigit() or text[start + 1] == ".")):
                self.pos += 1
                while self.pos < n and (text[self.pos].isdigit() or text[self.pos] in ".eE"
                                        or (text[self.pos] in "+-" and text[self.pos - 1] in "eE")):
                    self.pos += 1
                lit = text[start : self.pos]
                try:
                    yield ("number", float(lit), start)
                except ValueError:
                    raise FilterError(f"syntax error at offset {start}: bad number {lit!r}", start) from None
            elif ch.isalpha() or ch == "_":
                while self.pos < n and (text[self.pos].isalnum() or text[self.pos] == "_"):
                    self.pos += 1
                yield ("ident", text[start : self.pos], start)
            else:
                raise FilterError(f"syntax error at offset {start}: unexpected {ch!r}", start)


class _Parser:
    def __init__(self, text: str, dataset: Dataset | None):
        self.toks = list(_Lexer(text).tokens())
        self.i = 0
        self.dataset = dataset

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        if tok[0] != "end":
            self.i += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise FilterError(f"syntax error at offset {tok[2]}: expected {kind}", tok[2])
        return self.advance()

    def keyword(self) -> str | None:
        tok = self.peek()
        if tok[0] == "ident" and tok[1].lower() in ("and", "or"):
            return tok[1].lower()
        return None

    def parse(self) -> FilterExpr:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise FilterError(f"syntax error at offset {tok[2]}: unexpected trailing input", tok[2])
        return node

    def expr(self) -> FilterExpr:
        terms = [self.term()]
        while self.keyword() == "or":
            self.advance()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def term(self) -> FilterExpr:
        factors = [self.factor()]
        while self.keyword() == "and":
            self.advance()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else And(tuple(factors))

    def factor(self) -> FilterExpr:
        tok = self.peek()
        if tok[0] == "lparen":
            self.advance()
            node = self.expr()
            self.expect("rparen")
            return node
        if tok[0] != "ident" or self.keyword():
            raise FilterError(f"syntax error at offset {tok[2]}: expected predicate", tok[2])
        col = self.advance()[1]
        op_tok = self.peek()
        if op_tok[0] != "op":
            raise FilterError(f"syntax error at offset {op_tok[2]}: expected comparison operator", op_tok[2])
        op = self.advance()[1]
        lit_tok = self.peek()
        if lit_tok[0] not in ("number", "string"):
            raise FilterError(f"syntax error at offset {lit_tok[2]}: expected literal", lit_tok[2])
        value = self.advance()[1]
        self.validate(col, op, value, tok[2])
        return Pred(col, op, value)

    def validate(self, col: str, op: str, value, offset: int):
        if self.dataset is None:
            return
        if not self.dataset.has_column(col):
            raise FilterError(f"unknown column {col!r}", offset)
        kind = self.dataset.column(col).kind
        if kind == CATEGORICAL and op in _ORDERING_OPS:
            raise FilterError(f"ordering operator {op!r} on categorical column {col!r}", offset)
        if kind == NUMERIC and isinstance(value, str):
            raise FilterError(f"string literal compared to numeric column {col!r}", offset)


def parse_filter(text: str, dataset: Dataset | None = None) -> FilterExpr:
    """Parse a filter string; validates columns/ops when a dataset is given."""
    return _Parser(text, dataset).parse()


def print_filter(expr: FilterExpr) -> str:
    """Canonical text form with explicit parentheses; parse(print(e)) == e."""
    if isinstance(expr, Pred):
        if isinstance(expr.value, str):
            lit = '"' + expr.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        else:
            lit = repr(float(expr.value)) if float(expr.value) != int(expr.value) else str(int(expr.value))
        return f"{expr.column} {expr.op} {lit}"
    if isinstance(expr, And):
        return "(" + " and ".join(print_filter(c) for c in expr.children) + ")"
    return "(" + " or ".join(print_filter(c) for c in expr.children) + ")"


def filter_columns(expr: FilterExpr) -> set[str]:
    if isinstance(expr, Pred):
        return {expr.column}
    out: set[str] = set()
    for c in expr.children:
        out |= filter_columns(c)
    return out


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _eval_pred(dataset: Dataset, pred: Pred) -> np.ndarray:
    col = dataset.column(pred.column)
    miss = col.missing
    if col.kind == NUMERIC:
        if isinstance(pred.value, str):
            raise FilterError(f"string literal compared to numeric column {pred.column!r}")
        v = float(pred.value)
        vals = col.values
        with np.errstate(invalid="ignore"):
            if pred.op == "==":
                out = vals == v
            elif pred.op == "!=":
                out = vals != v
            elif pred.op == "<":
                out = vals < v
            elif pred.op == "<=":
                out = vals <= v
            elif pred.op == ">":
                out = vals > v
            else:
                out = vals >= v
    else:
        if pred.op in _ORDERING_OPS:
            raise FilterError(f"ordering operator {pred.op!r} on categorical column {pred.column!r}")
        target = str(pred.value)
        eq = np.array([v == target for v in col.values], dtype=bool)
        out = eq if pred.op == "==" else ~eq
    return out & ~miss


def _eval(dataset: Dataset, expr: FilterExpr) -> np.ndarray:
    if isinstance(expr, Pred):
        return _eval_pred(dataset, expr)
    parts = [_eval(dataset, c) for c in expr.children]
    out = parts[0].copy()
    for p in parts[1:]:
        if isinstance(expr, And):
            out &= p
        else:
            out |= p
    return out


def apply_filter(dataset: Dataset, rows, expr: FilterExpr) -> frozenset[int]:
    """Subset of ``rows`` whose cells satisfy ``expr``.

    Rows outside the dataset are an error; rows whose referenced cell is
    missing fail the predicate touching it.
    """
    row_set = frozenset(int(r) for r in rows)
    for r in row_set:
        if r < 0 or r >= dataset.n_rows:
            raise FilterError(f"row id {r} out of range")
    mask = _eval(dataset, expr)
    hits = np.flatnonzero(mask)
    return frozenset(int(r) for r in hits if r in row_set)

"""Text command language: the typed stand-in for spoken view/analysis control.

parse_command turns a sentence like "apply kmeans clustering with 3 clusters
to solution 2" into a Command; print_command emits the canonical sentence,
and parse(print(c)) == c for every command. Deictic screen references
("that screen") are rejected with a typed error; "this data point" is kept
in ForwardPerturb and resolved against the client's selection when the
command becomes a session event.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import CommandError
from .filters import FilterExpr, parse_filter, print_filter

VIEW_KINDS = (
    "table",
    "projection",
    "clustering",
    "distribution",
    "correlation",
    "feature_selection",
)
CLUSTER_ALGOS = ("kmeans", "agglomerative")
PROJECTION_ALGOS = ("pca", "cmds")
METRIC_NAMES = ("euclidean", "manhattan", "cosine", "correlation")

_WORD_NUMBERS = {
    "two": 2, "three": 3, "four": 4, "five": 5, "six": 6,
    "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}


@dataclass(frozen=True)
class ShowView:
    kind: str
    slots: tuple[int, ...]


@dataclass(frozen=True)
class LoadViewOnScreens:
    kind: str
    slots: tuple[int, ...]


@dataclass(frozen=True)
class ExtendView:
    kind: str
    n: int


@dataclass(frozen=True)
class ApplyClustering:
    algorithm: str
    k: int
    solution: int


@dataclass(frozen=True)
class ApplyProjection:
    algorithm: str
    dims: int
    solution: int
    metric: str | None = None


@dataclass(frozen=True)
class ForwardPerturb:
    feature: str
    delta: float


@dataclass(frozen=True)
class FilterWhere:
    solution: int
    expr: FilterExpr


Command = (
    ShowView
    | LoadViewOnScreens
    | ExtendView
    | ApplyClustering
    | ApplyProjection
    | ForwardPerturb
    | FilterWhere
)


def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _suggestions(word: str, known: tuple[str, ...]) -> list[str]:
    return [k for k in known if edit_distance(word.lower(), k) <= 2]


_TOKEN_RE = re.compile(
    r"\s*([A-Za-z_][A-Za-z0-9_]*|[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?|\S)"
)


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                break
            self.toks.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self) -> tuple[str, int]:
        if self.i < len(self.toks):
            return self.toks[self.i]
        return ("", len(self.text))

    def next(self) -> tuple[str, int]:
        tok = self.peek()
        if tok[0]:
            self.i += 1
        return tok

    def expect_word(self, *words: str) -> str:
        tok, off = self.next()
        if tok.lower() not in words:
            raise CommandError(
                f"syntax error at offset {off}: expected {' or '.join(words)!r}", off
            )
        return tok.lower()

    def accept_word(self, *words: str) -> bool:
        tok, _ = self.peek()
        if tok.lower() in words:
            self.i += 1
            return True
        return False

    def expect_end(self):
        tok, off = self.peek()
        if tok:
            raise CommandError(f"syntax error at offset {off}: unexpected {tok!r}", off)

    def number(self, what: str, allow_words: bool = True, allow_float: bool = False) -> float:
        tok, off = self.next()
        low = tok.lower()
        if allow_words and low in _WORD_NUMBERS:
            return float(_WORD_NUMBERS[low])
        try:
            value = float(tok)
        except ValueError:
            if low in ("that", "this"):
                raise CommandError(
                    "deictic reference unsupported; name a screen number", off
                ) from None
            raise CommandError(
                f"syntax error at offset {off}: expected {what}", off
            ) from None
        if not allow_float and value != int(value):
            raise CommandError(f"syntax error at offset {off}: expected an integer {what}", off)
        return value

    def ident(self, what: str) -> tuple[str, int]:
        tok, off = self.next()
        if not tok or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            raise CommandError(f"syntax error at offset {off}: expected {what}", off)
        return tok, off


def _check_deictic_screen(toks: _Tokens):
    tok, off = toks.peek()
    if tok.lower() in ("that", "this"):
        raise CommandError("deictic reference unsupported; name a screen number", off)


def _view_kind(toks: _Tokens) -> str:
    tok, off = toks.next()
    # allow "feature selection" as two words
    kind = tok.lower()
    if kind == "feature" and toks.accept_word("selection"):
        kind = "feature_selection"
    if kind not in VIEW_KINDS:
        sugg = _suggestions(kind, VIEW_KINDS)
        raise CommandError(
            f"unknown view kind {tok!r} at offset {off}"
            + (f"; did you mean {', '.join(sugg)}?" if sugg else ""),
            off,
            sugg,
        )
    return kind


def _screen_list(toks: _Tokens) -> tuple[int, ...]:
    _check_deictic_screen(toks)
    slots = [int(toks.number("screen number"))]
    while toks.accept_word("and") or toks.accept_word(","):
        _check_deictic_screen(toks)
        slots.append(int(toks.number("screen number")))
    return tuple(slots)


def parse_command(text: str) -> Command:
    """Parse one command sentence (case-insensitive). Raises CommandError
    with a byte offset on any malformed input; never crashes."""
    if not isinstance(text, str):
        raise CommandError("command must be text")
    toks = _Tokens(text)
    verb_tok, off = toks.next()
    verb = verb_tok.lower()

    if verb == "show":
        kind = _view_kind(toks)
        toks.expect_word("view")
        toks.expect_word("on")
        _check_deictic_screen(toks)
        word = toks.expect_word("screen", "screens")
        if word == "screen":
            toks.accept_word("number")
            _check_deictic_screen(toks)
            slots = (int(toks.number("screen number")),)
        else:
            slots = _screen_list(toks)
        toks.expect_end()
        return ShowView(kind, slots)

    if verb == "load":
        kind = _view_kind(toks)
        toks.expect_word("view")
        toks.expect_word("on")
        _check_deictic_screen(toks)
        word = toks.expect_word("screens", "screen")
        if word == "screen":
            toks.accept_word("number")
            _check_deictic_screen(toks)
            slots = (int(toks.number("screen number")),)
        else:
            slots = _screen_list(toks)
        toks.expect_end()
        return LoadViewOnScreens(kind, slots)

    if verb == "extend":
        kind = _view_kind(toks)
        toks.accept_word("view")
        toks.expect_word("to")
        n = int(toks.number("screen count"))
        toks.expect_word("screens", "screen")
        toks.expect_end()
        return ExtendView(kind, n)

    if verb == "apply":
        algo_tok, algo_off = toks.ident("algorithm name")
        algo = algo_tok.lower()
        what = toks.expect_word("clustering", "projection")
        if what == "clustering":
            if algo not in CLUSTER_ALGOS:
                sugg = _suggestions(algo, CLUSTER_ALGOS)
                raise CommandError(
                    f"unknown clustering algorithm {algo_tok!r}"
                    + (f"; did you mean {', '.join(sugg)}?" if sugg else ""),
                    algo_off,
                    sugg,
                )
            toks.expect_word("with")
            k = int(toks.number("cluster count"))
            toks.expect_word("clusters", "cluster")
            toks.expect_word("to")
            toks.expect_word("solution")
            sol = int(toks.number("solution id", allow_words=False))
            toks.expect_end()
            return ApplyClustering(algo, k, sol)
        if algo not in PROJECTION_ALGOS:
            sugg = _suggestions(algo, PROJECTION_ALGOS)
            raise CommandError(
                f"unknown projection algorithm {algo_tok!r}"
                + (f"; did you mean {', '.join(sugg)}?" if sugg else ""),
                algo_off,
                sugg,
            )
        dims = 2
        metric = None
        if toks.accept_word("in"):
            dims = int(toks.number("dimension count"))
            toks.expect_word("dimensions", "dimension")
        if toks.accept_word("with"):
            mtok, moff = toks.ident("metric name")
            metric = mtok.lower()
            if metric not in METRIC_NAMES:
                sugg = _suggestions(metric, METRIC_NAMES)
                raise CommandError(
                    f"unknown metric {mtok!r}"
                    + (f"; did you mean {', '.join(sugg)}?" if sugg else ""),
                    moff,
                    sugg,
                )
            toks.expect_word("metric")
        toks.expect_word("to")
        toks.expect_word("solution")
        sol = int(toks.number("solution id", allow_words=False))
        toks.expect_end()
        return ApplyProjection(algo, dims, sol, metric)

    if verb == "try":
        direction = toks.expect_word("increasing", "decreasing")
        toks.expect_word("the")
        feature, _ = toks.ident("feature name")
        toks.expect_word("value")
        toks.expect_word("of")
        toks.expect_word("this", "that")
        toks.expect_word("data")
        toks.expect_word("point")
        toks.expect_word("by")
        amount = toks.number("amount", allow_words=True, allow_float=True)
        toks.expect_end()
        delta = amount if direction == "increasing" else -amount
        return ForwardPerturb(feature, float(delta))

    if verb == "filter":
        toks.expect_word("solution")
        sol = int(toks.number("solution id", allow_words=False))
        tok, where_off = toks.next()
        if tok.lower() != "where":
            raise CommandError(f"syntax error at offset {where_off}: expected 'where'", where_off)
        rest = text[where_off + len(tok):]
        if not rest.strip():
            raise CommandError("empty filter expression", where_off + len(tok))
        try:
            expr = parse_filter(rest)
        except Exception as exc:
            offset = where_off + len(tok) + getattr(exc, "offset", 0)
            raise CommandError(f"bad filter expression: {exc}", offset) from exc
        return FilterWhere(sol, expr)

    known_verbs = ("show", "load", "extend", "apply", "try", "filter")
    sugg = _suggestions(verb, known_verbs)
    raise CommandError(
        f"unknown command {verb_tok!r} at offset {off}"
        + (f"; did you mean {', '.join(sugg)}?" if sugg else ""),
        off,
        sugg,
    )


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v) == int(v) else repr(float(v))


def print_command(cmd: Command) -> str:
    """Canonical sentence; parse_command(print_command(c)) == c."""
    if isinstance(cmd, ShowView):
        return "show " + _kind_text(cmd.kind) + " view on " + _screens_text(cmd.slots)
    if isinstance(cmd, LoadViewOnScreens):
        return "load " + _kind_text(cmd.kind) + " view on " + _screens_text(cmd.slots)
    if isinstance(cmd, ExtendView):
        return f"extend {_kind_text(cmd.kind)} view to {cmd.n} screens"
    if isinstance(cmd, ApplyClustering):
        return (
            f"apply {cmd.algorithm} clustering with {cmd.k} clusters "
            f"to solution {cmd.solution}"
        )
    if isinstance(cmd, ApplyProjection):
        metric = f"with {cmd.metric} metric " if cmd.metric else ""
        return (
            f"apply {cmd.algorithm} projection in {cmd.dims} dimensions "
            f"{metric}to solution {cmd.solution}"
        )
    if isinstance(cmd, ForwardPerturb):
        word = "increasing" if cmd.delta >= 0 else "decreasing"
        return (
            f"try {word} the {cmd.feature} value of this data point "
            f"by {_fmt_num(abs(cmd.delta))}"
        )
    if isinstance(cmd, FilterWhere):
        return f"filter solution {cmd.solution} where {print_filter(cmd.expr)}"
    raise CommandError(f"not a command: {cmd!r}")


def _kind_text(kind: str) -> str:
    return "feature selection" if kind == "feature_selection" else kind


def _screens_text(slots: tuple[int, ...]) -> str:
    if len(slots) == 1:
        return f"screen number {slots[0]}"
    return "screens " + " and ".join(str(s) for s in slots)

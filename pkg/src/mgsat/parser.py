"""Agenda-driven chart parser for Minimalist Grammars with head movement.

Items follow Harkema's chain representation extended with Stabler's
(specifier, head, complement) split of the main chain so that a selecting
head can raise the head of its complement.  Spans are half-open token
intervals; ``None`` stands for the empty string, which concatenates with
anything.  The Shortest Move Constraint keeps the item set finite.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .corpus import AnnotatedSentence
from .derivation import DerivationTree, Leaf, Merge, Move, Node, RelationSet
from .mg import Covert, Feature, HeadMove, Kind, LexicalItem, Lexicon

Span = tuple[int, int] | None

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class Bounds:
    max_phrasal_moves: int = 3
    max_head_moves: int = 1
    max_feats: int = 3
    covert_budget: int = 1
    covert_root: bool = False  # when set, only covert complementizers may carry C


class RelationMode(enum.Enum):
    """How annotated relations are matched against a derivation.

    LOCAL: ``arg(a, p)`` needs an external merge between the heads of a and
    p in either direction; ``agree(x, y)`` needs any merge between them.
    STRICT: ``arg(a, p)`` needs a's phrase selected by p's projection and
    ``agree(x, y)`` needs x's phrase to move into y's projection.
    """

    LOCAL = "local"
    STRICT = "strict"


def concat(a: Span, b: Span) -> Span | bool:
    if a is None:
        return b
    if b is None:
        return a
    if a[1] != b[0]:
        return False
    return (a[0], b[1])


def concat_all(*spans: Span) -> Span | bool:
    out: Span = None
    for s in spans:
        out = concat(out, s)
        if out is False:
            return False
    return out


@dataclass(frozen=True)
class ChainItem:
    span: Span
    feats: tuple[Feature, ...]


@dataclass(frozen=True)
class Expression:
    feats: tuple[Feature, ...]
    spec: Span
    head: Span
    comp: Span
    movers: tuple[ChainItem, ...]  # sorted by first licensee category
    lexical: bool
    covert: tuple[Covert, ...] = ()
    head_moves: int = 0
    moves: int = 0

    @property
    def main(self) -> ChainItem:
        return ChainItem(concat_all(self.spec, self.head, self.comp), self.feats)


def _smc(movers: Iterable[ChainItem]) -> tuple[ChainItem, ...] | None:
    seen = {}
    for m in movers:
        cat = m.feats[0].cat
        if cat in seen:
            return None
        seen[cat] = m
    return tuple(seen[c] for c in sorted(seen))


@dataclass
class _Entry:
    expr: Expression
    # each way of deriving expr: ("leaf", Leaf) | ("merge", sel, arg) | ("move", body, licensee cat)
    ways: list = field(default_factory=list)


class ChartParser:
    """One parser instance per sentence; owns its chart."""

    def __init__(self, lexicon: Lexicon, bounds: Bounds = Bounds()):
        self.lexicon = lexicon
        self.bounds = bounds

    # rules ---------------------------------------------------------------
    def _merge(self, x: Expression, y: Expression) -> Expression | None:
        if not x.feats or not y.feats:
            return None
        f, g = x.feats[0], y.feats[0]
        if f.kind is not Kind.SELECTOR or g.kind is not Kind.SELECTEE or f.cat != g.cat:
            return None
        b = self.bounds
        covert = x.covert + y.covert
        if len(covert) > b.covert_budget:
            return None
        hm = f.head_move is not HeadMove.NONE
        head_moves = x.head_moves + y.head_moves + hm
        if head_moves > b.max_head_moves:
            return None
        moves = x.moves + y.moves
        rest = y.feats[1:]
        new_movers = list(x.movers) + list(y.movers)
        spec, head, comp = x.spec, x.head, x.comp
        if rest:
            if rest[0].kind is not Kind.LICENSEE or hm:
                return None
            flat = concat_all(y.spec, y.head, y.comp)
            if flat is False:
                return None
            new_movers.append(ChainItem(flat, rest))
        elif x.lexical:
            if hm:
                if f.head_move is HeadMove.LEFT:
                    head = concat(y.head, x.head)
                else:
                    head = concat(x.head, y.head)
                comp = concat(y.spec, y.comp)
            else:
                comp = concat_all(y.spec, y.head, y.comp)
        else:
            if hm:
                return None
            spec = concat_all(y.spec, y.head, y.comp, x.spec)
        if head is False or comp is False or spec is False:
            return None
        movers = _smc(new_movers)
        if movers is None or len(movers) > b.max_phrasal_moves:
            return None
        return Expression(x.feats[1:], spec, head, comp, movers, False, tuple(sorted(covert, key=lambda c: c.value)),
                          head_moves, moves)

    def _move(self, x: Expression) -> Iterator[tuple[Expression, str]]:
        if not x.feats or x.feats[0].kind is not Kind.LICENSOR:
            return
        if x.moves + 1 > self.bounds.max_phrasal_moves:
            return
        f = x.feats[0]
        for i, m in enumerate(x.movers):
            if m.feats[0].cat != f.cat:
                continue
            others = x.movers[:i] + x.movers[i + 1:]
            spec = x.spec
            if len(m.feats) == 1:
                spec = concat(m.span, x.spec)
                if spec is False:
                    continue
                movers = others
            else:
                movers = _smc(others + (ChainItem(m.span, m.feats[1:]),))
                if movers is None:
                    continue
            yield (Expression(x.feats[1:], spec, x.head, x.comp, movers, False, x.covert,
                              x.head_moves, x.moves + 1), f.cat)

    # chart ---------------------------------------------------------------
    def _axioms(self, tokens: tuple[str, ...]) -> Iterator[tuple[Expression, Leaf]]:
        for item in self.lexicon.sorted():
            if len(item.budget_feats) > self.bounds.max_feats:
                continue
            if item.phon.is_overt:
                if self.bounds.covert_root and item.has_complete:
                    continue
                for i, tok in enumerate(tokens):
                    if tok == item.phon.token:
                        yield Expression(item.feats, None, (i, i + 1), None, (), True), Leaf(item, i)
            elif self.bounds.covert_budget > 0:
                yield Expression(item.feats, None, None, None, (), True, (item.phon.covert,)), Leaf(item, None)

    def chart(self, tokens: tuple[str, ...]) -> dict[Expression, _Entry]:
        chart: dict[Expression, _Entry] = {}
        agenda: deque[Expression] = deque()

        def add(expr: Expression, way) -> None:
            entry = chart.get(expr)
            if entry is None:
                chart[expr] = entry = _Entry(expr)
                agenda.append(expr)
            entry.ways.append(way)

        for expr, leaf in self._axioms(tokens):
            add(expr, ("leaf", leaf))
        while agenda:
            x = agenda.popleft()
            for new, cat in self._move(x):
                add(new, ("move", x, cat))
            for y in list(chart):
                r = self._merge(x, y)
                if r is not None:
                    add(r, ("merge", x, y))
                if y is not x:
                    r = self._merge(y, x)
                    if r is not None:
                        add(r, ("merge", y, x))
        return chart

    def goals(self, chart: dict[Expression, _Entry], n: int, sentence_type: str | None) -> list[Expression]:
        want = None if sentence_type is None else Covert.DECL if sentence_type == "decl" else Covert.INTR
        out = []
        for expr in chart:
            if expr.feats != (Feature(Kind.COMPLETE),) or expr.movers:
                continue
            if expr.main.span != (0, n):
                continue
            if want is not None and expr.covert != (want,):
                continue
            out.append(expr)
        return out

    def _trees(self, chart, expr: Expression) -> Iterator[tuple[Node, dict[str, Node]]]:
        """Yield (node, movers by first licensee category) for each derivation."""
        for way in chart[expr].ways:
            if way[0] == "leaf":
                yield way[1], {}
            elif way[0] == "merge":
                _, x, y = way
                for nx, mx in self._trees(chart, x):
                    for ny, my in self._trees(chart, y):
                        node = Merge(nx, ny)
                        movers = {**mx, **my}
                        if len(y.feats) > 1:
                            movers[y.feats[1].cat] = ny
                        yield node, movers
            else:
                _, x, cat = way
                for nx, mx in self._trees(chart, x):
                    mover = mx[cat]
                    node = Move(nx, mover)
                    movers = dict(mx)
                    del movers[cat]
                    # the mover keeps going if it has another licensee
                    entry = next(m for m in x.movers if m.feats[0].cat == cat)
                    if len(entry.feats) > 1:
                        movers[entry.feats[1].cat] = mover
                    yield node, movers

    def parse(self, tokens, sentence_type: str | None = None, cap: int = DEFAULT_CAP) -> list[DerivationTree]:
        tokens = tuple(t.lower() for t in tokens)
        chart = self.chart(tokens)
        out: list[DerivationTree] = []
        seen = set()
        for goal in self.goals(chart, len(tokens), sentence_type):
            for node, _ in self._trees(chart, goal):
                tree = DerivationTree(node)
                if tree in seen:
                    continue
                seen.add(tree)
                out.append(tree)
                if len(out) >= cap:
                    return out
        return out


def parse(lexicon: Lexicon, tokens, sentence_type: str | None = None, bounds: Bounds = Bounds(),
          cap: int = DEFAULT_CAP) -> list[DerivationTree]:
    """All derivations (up to ``cap``) of ``tokens`` whose root is complete."""
    return ChartParser(lexicon, bounds).parse(tokens, sentence_type, cap)


def extract_relations(tree: DerivationTree) -> RelationSet:
    tree.check()
    return tree.relations()


def relations_satisfied(sentence: AnnotatedSentence, rels: RelationSet,
                        mode: RelationMode = RelationMode.STRICT) -> bool:
    if rels.sentence_type != sentence.type:
        return False
    merged = rels.args | {(b, a) for a, b in rels.args}
    moved = rels.agrees | {(b, a) for a, b in rels.agrees}
    for kind, a, b in sentence.relation_positions():
        if mode is RelationMode.STRICT:
            ok = (a, b) in (rels.args if kind == "arg" else rels.agrees)
        elif kind == "arg":
            ok = (a, b) in merged
        else:
            ok = (a, b) in merged or (a, b) in moved
        if not ok:
            return False
    return True


def validating_parses(lexicon: Lexicon, sentence: AnnotatedSentence, bounds: Bounds = Bounds(),
                      mode: RelationMode = RelationMode.STRICT, check_relations: bool = True,
                      cap: int = DEFAULT_CAP) -> list[DerivationTree]:
    trees = parse(lexicon, sentence.tokens, sentence.type, bounds, cap)
    if not check_relations:
        return trees
    return [t for t in trees if relations_satisfied(sentence, extract_relations(t), mode)]


def validate(lexicon: Lexicon, sentence: AnnotatedSentence, bounds: Bounds = Bounds(),
             mode: RelationMode = RelationMode.STRICT, check_relations: bool = True,
             cap: int = DEFAULT_CAP) -> bool:
    """True iff some derivation of the sentence carries its annotated relations."""
    trees = parse(lexicon, sentence.tokens, sentence.type, bounds, cap)
    if not check_relations:
        return bool(trees)
    return any(relations_satisfied(sentence, extract_relations(t), mode) for t in trees)

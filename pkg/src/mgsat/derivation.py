"""Derivation trees: the record of external and internal merges.

``Merge`` nodes are external merges (selector projects), ``Move`` nodes are
internal merges whose ``mover`` is a reference to a subtree already inside
``body``.  The surface string is recovered by lifting the derived tree:
complements go right of the head, specifiers left, a moved phrase is spoken
only at its last landing site and a raised head sits next to its host.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union

from .mg import Feature, HeadMove, Kind, LexicalItem, PhoneticForm


class DerivationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Leaf:
    item: LexicalItem
    position: int | None  # token index; None for covert items

    @property
    def consumed(self) -> int:
        return 0

    def __repr__(self) -> str:
        pos = "" if self.position is None else f"@{self.position}"
        return f"Leaf({self.item}{pos})"


@dataclass(frozen=True, eq=False)
class Merge:
    selector: "Node"
    arg: "Node"
    consumed: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "consumed", self.selector.consumed + 1)

    @property
    def feature(self) -> Feature:
        return head_of(self.selector).item.feats[self.selector.consumed]

    @property
    def head_move(self) -> HeadMove:
        return self.feature.head_move


@dataclass(frozen=True, eq=False)
class Move:
    body: "Node"
    mover: "Node"
    consumed: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "consumed", self.body.consumed + 1)

    @property
    def feature(self) -> Feature:
        return head_of(self.body).item.feats[self.body.consumed]


Node = Union[Leaf, Merge, Move]


def head_of(node: Node) -> Leaf:
    while not isinstance(node, Leaf):
        node = node.selector if isinstance(node, Merge) else node.body
    return node


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, Merge):
        return (node.selector, node.arg)
    if isinstance(node, Move):
        return (node.body,)
    return ()


def postorder(node: Node) -> Iterator[Node]:
    for c in children(node):
        yield from postorder(c)
    yield node


class EventKind(enum.Enum):
    MERGE = "merge"
    MOVE = "move"
    HEAD_MOVE = "head-move"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    host: Leaf
    other: Leaf
    feature: Feature

    def describe(self) -> str:
        if self.kind is EventKind.HEAD_MOVE:
            return f"head-move {self.other.item.phon} -> {self.host.item.phon}"
        return f"{self.kind.value} {self.host.item.phon} + {self.other.item.phon} ({self.feature})"


@dataclass(frozen=True)
class RelationSet:
    """Relations established by merge, over overt token positions.

    ``args`` holds (argument head, selecting head) pairs from external
    merge; ``agrees`` holds (mover head, attracting head) pairs from
    internal merge.
    """

    args: frozenset[tuple[int, int]] = frozenset()
    agrees: frozenset[tuple[int, int]] = frozenset()
    sentence_type: str | None = None


class DerivationTree:
    def __init__(self, root: Node):
        self.root = root
        self._nodes = list(postorder(root))
        moves: dict[int, list[Move]] = {}
        for n in self._nodes:
            if isinstance(n, Move):
                moves.setdefault(id(n.mover), []).append(n)
        self._moves_of = moves

    # structure -----------------------------------------------------------
    @property
    def nodes(self) -> list[Node]:
        return list(self._nodes)

    def leaves(self) -> list[Leaf]:
        return [n for n in self._nodes if isinstance(n, Leaf)]

    def remaining(self, node: Node | None = None) -> tuple[Feature, ...]:
        node = self.root if node is None else node
        return head_of(node).item.feats[node.consumed:]

    def is_mover(self, node: Node) -> bool:
        return id(node) in self._moves_of

    def final_landing(self, node: Node) -> Move | None:
        moves = self._moves_of.get(id(node))
        return moves[-1] if moves else None

    def move_links(self) -> list[tuple[Move, Node]]:
        return [(n, n.mover) for n in self._nodes if isinstance(n, Move)]

    def head_moves(self) -> list[tuple[Leaf, Leaf, HeadMove]]:
        return [(head_of(n.selector), head_of(n.arg), n.head_move)
                for n in self._nodes if isinstance(n, Merge) and n.head_move is not HeadMove.NONE]

    def events(self) -> list[Event]:
        """Merge, move and head-movement events in bottom-up order."""
        out = []
        for n in self._nodes:
            if isinstance(n, Merge):
                host, other = head_of(n.selector), head_of(n.arg)
                out.append(Event(EventKind.MERGE, host, other, n.feature))
                if n.head_move is not HeadMove.NONE:
                    out.append(Event(EventKind.HEAD_MOVE, host, other, n.feature))
            elif isinstance(n, Move):
                out.append(Event(EventKind.MOVE, head_of(n.body), head_of(n.mover), n.feature))
        return out

    def covert_forms(self) -> list[PhoneticForm]:
        return [l.item.phon for l in self.leaves() if not l.item.phon.is_overt]

    def check(self) -> None:
        """Raise DerivationError unless every feature is consumed in order."""
        used_selectee: set[int] = set()
        licensee_count: dict[int, int] = {}
        for n in self._nodes:
            if isinstance(n, Leaf):
                continue
            f = n.feature
            if isinstance(n, Merge):
                arg_feats = self.remaining(n.arg)
                if not arg_feats or not _matches(f, arg_feats[0], Kind.SELECTOR, Kind.SELECTEE):
                    raise DerivationError(f"bad external merge at {f}")
                if id(n.arg) in used_selectee:
                    raise DerivationError("phrase selected twice")
                used_selectee.add(id(n.arg))
                rest = arg_feats[1:]
                if rest and rest[0].kind is not Kind.LICENSEE:
                    raise DerivationError("argument retains non-licensee features")
                if rest and not self.is_mover(n.arg):
                    raise DerivationError("argument with licensees never moves")
                if n.head_move is not HeadMove.NONE and (n.selector.consumed != 0 or rest):
                    raise DerivationError("head movement only out of an unmoved complement")
            else:
                k = licensee_count.get(id(n.mover), 0)
                mfeats = self.remaining(n.mover)[1 + k:]
                if not mfeats or not _matches(f, mfeats[0], Kind.LICENSOR, Kind.LICENSEE):
                    raise DerivationError(f"bad internal merge at {f}")
                licensee_count[id(n.mover)] = k + 1
        for mid, moves in self._moves_of.items():
            mover = moves[0].mover
            if len(self.remaining(mover)) - 1 != len(moves):
                raise DerivationError("mover keeps unchecked licensees")
        if self.remaining() != (Feature(Kind.COMPLETE),):
            raise DerivationError("root does not end in C")

    # surface -------------------------------------------------------------
    def _parts(self, node: Node) -> tuple[list[Leaf], list[Leaf], list[Leaf]]:
        if isinstance(node, Leaf):
            return [], [node], []
        if isinstance(node, Move):
            s, h, c = self._parts(node.body)
            if self.final_landing(node.mover) is node:
                s = self._flat(node.mover) + s
            return s, h, c
        s1, h1, c1 = self._parts(node.selector)
        if self.is_mover(node.arg):
            return s1, h1, c1
        if node.selector.consumed == 0:
            if node.head_move is HeadMove.NONE:
                return s1, h1, c1 + self._flat(node.arg)
            s2, h2, c2 = self._parts(node.arg)
            h = h2 + h1 if node.head_move is HeadMove.LEFT else h1 + h2
            return s1, h, c1 + s2 + c2
        return self._flat(node.arg) + s1, h1, c1

    def _flat(self, node: Node) -> list[Leaf]:
        s, h, c = self._parts(node)
        return s + h + c

    def linearize(self) -> list[Leaf]:
        return self._flat(self.root)

    def surface(self) -> list[PhoneticForm]:
        return [leaf.item.phon for leaf in self.linearize()]

    def overt_string(self) -> str:
        return " ".join(p.token for p in self.surface() if p.is_overt)

    # relations -----------------------------------------------------------
    def relations(self) -> RelationSet:
        args, agrees = set(), set()
        for ev in self.events():
            if ev.host.position is None or ev.other.position is None:
                continue
            if ev.kind is EventKind.MERGE:
                args.add((ev.other.position, ev.host.position))
            elif ev.kind is EventKind.MOVE:
                agrees.add((ev.other.position, ev.host.position))
        types = {p.covert.name.lower() for p in self.covert_forms()}
        return RelationSet(frozenset(args), frozenset(agrees), types.pop() if len(types) == 1 else None)

    def feature_count(self) -> int:
        """Feature instances carried by the leaves, C included."""
        return sum(len(l.item.feats) for l in self.leaves())

    # identity ------------------------------------------------------------
    def signature(self):
        def sig(n: Node):
            if isinstance(n, Leaf):
                return ("leaf", str(n.item), n.position)
            if isinstance(n, Merge):
                return ("merge", sig(n.selector), sig(n.arg))
            return ("move", sig(n.body), sig(n.mover))
        return sig(self.root)

    def __eq__(self, other) -> bool:
        return isinstance(other, DerivationTree) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    # rendering -----------------------------------------------------------
    def _label(self, node: Node) -> str:
        leaf = head_of(node)
        feats = leaf.item.feats
        k = node.consumed
        done = ",".join(map(str, feats[:k]))
        todo = ",".join(map(str, feats[k:]))
        return f"{leaf.item.phon}::{done}*{todo}" if k else f"{leaf.item.phon}::{todo}"

    def render(self) -> str:
        """Indented text, consumed features left of ``*``."""
        lines: list[str] = []

        def walk(n: Node, depth: int, tag: str):
            pad = "  " * depth
            if isinstance(n, Leaf):
                pos = "" if n.position is None else f"  [{n.position}]"
                lines.append(f"{pad}{tag}{n.item}{pos}")
            elif isinstance(n, Merge):
                hm = {HeadMove.LEFT: " (head-move left)", HeadMove.RIGHT: " (head-move right)"}.get(n.head_move, "")
                lines.append(f"{pad}{tag}merge {self._label(n)}{hm}")
                walk(n.selector, depth + 1, "")
                walk(n.arg, depth + 1, "")
            else:
                lines.append(f"{pad}{tag}move {self._label(n)} <- {head_of(n.mover).item.phon}")
                walk(n.body, depth + 1, "")
        walk(self.root, 0, "")
        return "\n".join(lines)

    def to_dot(self, name: str = "derivation") -> str:
        ids = {id(n): f"n{i}" for i, n in enumerate(self._nodes)}
        out = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
        for n in self._nodes:
            label = str(n.item) if isinstance(n, Leaf) else self._label(n)
            out.append(f'  {ids[id(n)]} [label="{label}"];')
            for c in children(n):
                out.append(f"  {ids[id(n)]} -> {ids[id(c)]};")
            if isinstance(n, Move):
                out.append(f"  {ids[id(n)]} -> {ids[id(n.mover)]} [style=dashed];")
        out.append("}")
        return "\n".join(out) + "\n"

    def __repr__(self) -> str:
        return f"DerivationTree({self.overt_string()!r})"


def _matches(a: Feature, b: Feature, ka: Kind, kb: Kind) -> bool:
    return a.kind is ka and b.kind is kb and a.cat == b.cat

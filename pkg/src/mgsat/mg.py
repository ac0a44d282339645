"""Minimalist Grammar value types and the lexicon text format.

A lexical item pairs a phonetic form with a feature sequence.  Features are
written ``=x1`` (selector), ``<=x1`` / ``=>x1`` (selector triggering left /
right head movement), ``~x1`` (selectee), ``+l`` (licensor), ``-l``
(licensee) and ``C`` (completion).  Items are serialized one per line as
``phon::f1,f2,...``; the covert complementizers are spelled ``eps_decl`` and
``eps_intr``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

DEFAULT_CATEGORIES = 5
DEFAULT_LICENSING = ("l", "r")
DEFAULT_MAX_FEATS = 3


class LexiconError(ValueError):
    """Raised for malformed lexicon text or items violating MG invariants."""


class Kind(enum.Enum):
    SELECTOR = "="
    SELECTEE = "~"
    LICENSOR = "+"
    LICENSEE = "-"
    COMPLETE = "C"

    @property
    def positive(self) -> bool:
        return self in (Kind.SELECTOR, Kind.LICENSOR)


class HeadMove(enum.Enum):
    NONE = ""
    LEFT = "<"
    RIGHT = ">"


def category_name(index: int) -> str:
    return f"x{index}"


def category_index(name: str) -> int:
    m = re.fullmatch(r"x(\d+)", name)
    if m is None:
        raise LexiconError(f"not a selection category: {name!r}")
    return int(m.group(1))


@dataclass(frozen=True)
class Feature:
    kind: Kind
    cat: str | None = None
    head_move: HeadMove = HeadMove.NONE

    def __post_init__(self):
        if self.kind is Kind.COMPLETE:
            if self.cat is not None:
                raise LexiconError("the completion feature carries no category")
        elif not self.cat:
            raise LexiconError(f"{self.kind.name.lower()} feature needs a category")
        elif not re.fullmatch(r"\w+", self.cat):
            raise LexiconError(f"bad category name {self.cat!r}")
        if self.head_move is not HeadMove.NONE and self.kind is not Kind.SELECTOR:
            raise LexiconError("only selectors may trigger head movement")

    @classmethod
    def parse(cls, text: str) -> "Feature":
        text = text.strip()
        if text == "C":
            return cls(Kind.COMPLETE)
        for prefix, hm in (("<=", HeadMove.LEFT), ("=>", HeadMove.RIGHT)):
            if text.startswith(prefix):
                return cls(Kind.SELECTOR, text[2:], hm)
        if text[:1] in "=~+-" and len(text) > 1:
            return cls(Kind(text[0]), text[1:])
        raise LexiconError(f"unrecognised feature {text!r}")

    def __str__(self) -> str:
        if self.kind is Kind.COMPLETE:
            return "C"
        if self.kind is Kind.SELECTOR:
            if self.head_move is HeadMove.LEFT:
                return f"<={self.cat}"
            if self.head_move is HeadMove.RIGHT:
                return f"=>{self.cat}"
        return f"{self.kind.value}{self.cat}"

    def sort_key(self) -> tuple:
        order = {Kind.SELECTOR: 0, Kind.LICENSOR: 1, Kind.SELECTEE: 2, Kind.LICENSEE: 3, Kind.COMPLETE: 4}
        hm = {HeadMove.NONE: 0, HeadMove.LEFT: 1, HeadMove.RIGHT: 2}
        return (order[self.kind], self.cat or "", hm[self.head_move])


def sel(cat: str, head_move: HeadMove = HeadMove.NONE) -> Feature:
    return Feature(Kind.SELECTOR, cat, head_move)


def selectee(cat: str) -> Feature:
    return Feature(Kind.SELECTEE, cat)


def lic(cat: str) -> Feature:
    return Feature(Kind.LICENSOR, cat)


def licensee(cat: str) -> Feature:
    return Feature(Kind.LICENSEE, cat)


COMPLETE = Feature(Kind.COMPLETE)


def check_external_merge(a: Feature, b: Feature) -> bool:
    """True iff ``a`` selects ``b``: a selector/selectee pair on one category."""
    return a.kind is Kind.SELECTOR and b.kind is Kind.SELECTEE and a.cat == b.cat


def check_internal_merge(a: Feature, b: Feature) -> bool:
    """True iff ``a`` attracts ``b``: a licensor/licensee pair on one category."""
    return a.kind is Kind.LICENSOR and b.kind is Kind.LICENSEE and a.cat == b.cat


class Covert(enum.Enum):
    DECL = "eps_decl"
    INTR = "eps_intr"


@dataclass(frozen=True)
class PhoneticForm:
    """Either an overt token or one of the two covert complementizers."""

    token: str | None = None
    covert: Covert | None = None

    def __post_init__(self):
        if (self.token is None) == (self.covert is None):
            raise LexiconError("a phonetic form is either overt or covert")
        if self.token is not None:
            if not self.token or re.search(r"\s|::", self.token) or self.token != self.token.lower():
                raise LexiconError(f"bad overt token {self.token!r}")

    @classmethod
    def overt(cls, token: str) -> "PhoneticForm":
        return cls(token=token)

    @classmethod
    def parse(cls, text: str) -> "PhoneticForm":
        text = text.strip()
        for c in Covert:
            if text == c.value:
                return cls(covert=c)
        return cls(token=text.lower())

    @property
    def is_overt(self) -> bool:
        return self.token is not None

    def __str__(self) -> str:
        return self.token if self.token is not None else self.covert.value


DECL = PhoneticForm(covert=Covert.DECL)
INTR = PhoneticForm(covert=Covert.INTR)


@dataclass(frozen=True)
class LexicalItem:
    phon: PhoneticForm
    feats: tuple[Feature, ...]

    def __post_init__(self):
        object.__setattr__(self, "feats", tuple(self.feats))
        validate_feature_sequence(self.feats)

    @classmethod
    def parse(cls, text: str) -> "LexicalItem":
        if "::" not in text:
            raise LexiconError(f"missing '::' in {text!r}")
        phon, _, feats = text.partition("::")
        if not feats.strip():
            raise LexiconError(f"no features in {text!r}")
        return cls(PhoneticForm.parse(phon), tuple(Feature.parse(f) for f in feats.split(",")))

    @property
    def has_complete(self) -> bool:
        return bool(self.feats) and self.feats[-1].kind is Kind.COMPLETE

    @property
    def budget_feats(self) -> tuple[Feature, ...]:
        """Features counted against the per-item bound (everything but C)."""
        return self.feats[:-1] if self.has_complete else self.feats

    def __str__(self) -> str:
        return f"{self.phon}::{','.join(map(str, self.feats))}"

    def sort_key(self) -> tuple:
        return (str(self.phon), tuple(f.sort_key() for f in self.feats))


def validate_feature_sequence(feats: tuple[Feature, ...]) -> None:
    """Enforce positives, then at most one selectee, then licensees, then C."""
    if not feats:
        raise LexiconError("a lexical item needs at least one feature")
    stage = 0  # 0 positives, 1 after selectee, 2 after C
    for f in feats:
        if stage == 2:
            raise LexiconError("no feature may follow C")
        if f.kind is Kind.COMPLETE:
            stage = 2
        elif f.kind.positive:
            if stage != 0:
                raise LexiconError(f"{f} follows the selectee")
        elif f.kind is Kind.SELECTEE:
            if stage != 0:
                raise LexiconError("at most one selectee per item")
            stage = 1
        elif f.kind is Kind.LICENSEE and stage != 1:
            raise LexiconError(f"licensee {f} must follow a selectee")


class Lexicon(frozenset):
    """A finite set of lexical items."""

    def __new__(cls, items: Iterable[LexicalItem] = ()):
        return super().__new__(cls, items)

    def sorted(self) -> list[LexicalItem]:
        return sorted(self, key=LexicalItem.sort_key)

    def by_phon(self, phon: PhoneticForm) -> list[LexicalItem]:
        return [it for it in self.sorted() if it.phon == phon]

    def __repr__(self) -> str:
        return f"Lexicon({len(self)} items)"


def check_bounds(item: LexicalItem, categories: int = DEFAULT_CATEGORIES,
                 licensing: tuple[str, ...] | None = DEFAULT_LICENSING,
                 max_feats: int = DEFAULT_MAX_FEATS) -> None:
    if len(item.budget_feats) > max_feats:
        raise LexiconError(f"{item} has more than {max_feats} features")
    for f in item.feats:
        if f.kind in (Kind.SELECTOR, Kind.SELECTEE):
            if category_index(f.cat) >= categories:
                raise LexiconError(f"unknown category {f.cat!r} in {item}")
        elif f.kind in (Kind.LICENSOR, Kind.LICENSEE):
            if licensing is not None and f.cat not in licensing:
                raise LexiconError(f"unknown licensing category {f.cat!r} in {item}")


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line


def parse_lexicon_text(text: str, categories: int = DEFAULT_CATEGORIES,
                       licensing: tuple[str, ...] | None = DEFAULT_LICENSING,
                       max_feats: int | None = None) -> Lexicon:
    """Parse ``phon::f1,f2,...`` lines; ``#`` lines are comments.

    Errors carry the 1-based line number.  ``licensing=None`` accepts any
    licensing category name.
    """
    items = []
    for no, line in _lines(text):
        try:
            item = LexicalItem.parse(line)
            check_bounds(item, categories, licensing, max_feats if max_feats is not None else 10**6)
        except LexiconError as exc:
            raise LexiconError(f"line {no}: {exc}") from None
        items.append(item)
    return Lexicon(items)


def print_lexicon_text(lex: Iterable[LexicalItem]) -> str:
    items = sorted(set(lex), key=LexicalItem.sort_key)
    return "".join(f"{it}\n" for it in items)

"""Annotated sentences and the line-delimited JSON corpus format.

Each corpus line is a record::

    {"text": "John has eaten pizza", "type": "decl",
     "relations": [{"kind": "agree", "a": "john", "b": "has"}, ...]}
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .mg import DECL, INTR, PhoneticForm

SENTENCE_TYPES = ("decl", "intr")
RELATION_KINDS = ("agree", "arg")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Relation:
    kind: str  # "agree" | "arg"
    a: str
    b: str

    def __str__(self) -> str:
        return f"{self.kind}({self.a}, {self.b})"


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[str, ...]
    type: str
    relations: tuple[Relation, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(t.lower() for t in self.tokens))
        if not self.tokens:
            raise CorpusError("empty sentence")
        if self.type not in SENTENCE_TYPES:
            raise CorpusError(f"sentence type must be decl or intr, got {self.type!r}")
        rels = tuple(Relation(r.kind, r.a.lower(), r.b.lower()) for r in self.relations)
        for r in rels:
            if r.kind not in RELATION_KINDS:
                raise CorpusError(f"unknown relation kind {r.kind!r}")
            for tok in (r.a, r.b):
                if tok not in self.tokens:
                    raise CorpusError(f"relation token {tok!r} not in sentence {self.text!r}")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def from_text(cls, text: str, type: str, relations=(), name: str = "") -> "AnnotatedSentence":
        rels = tuple(r if isinstance(r, Relation) else Relation(*r) for r in relations)
        return cls(tuple(_tokenize(text)), type, rels, name)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def covert(self) -> PhoneticForm:
        return DECL if self.type == "decl" else INTR

    def position(self, token: str) -> int:
        """Index of ``token``; annotation tokens are unique within a sentence."""
        hits = [i for i, t in enumerate(self.tokens) if t == token]
        if not hits:
            raise CorpusError(f"{token!r} not in {self.text!r}")
        return hits[0]

    def relation_positions(self) -> list[tuple[str, int, int]]:
        return [(r.kind, self.position(r.a), self.position(r.b)) for r in self.relations]

    def to_record(self) -> dict:
        return {"text": self.text, "type": self.type,
                "relations": [{"kind": r.kind, "a": r.a, "b": r.b} for r in self.relations]}


def _tokenize(text: str) -> list[str]:
    return [t.strip(".?!,").lower() for t in text.split() if t.strip(".?!,")]


def parse_corpus(text: str) -> list[AnnotatedSentence]:
    out = []
    for no, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            rec = json.loads(line)
            rels = [Relation(r["kind"], r["a"], r["b"]) for r in rec.get("relations", [])]
            out.append(AnnotatedSentence.from_text(rec["text"], rec["type"], rels, rec.get("name", f"I{len(out) + 1}")))
        except (json.JSONDecodeError, KeyError, TypeError, CorpusError) as exc:
            raise CorpusError(f"line {no}: {exc.__class__.__name__}: {exc}") from None
    return out


def load_corpus(path: str | Path) -> list[AnnotatedSentence]:
    return parse_corpus(Path(path).read_text(encoding="utf-8"))


def dump_corpus(sentences) -> str:
    return "".join(json.dumps(s.to_record()) + "\n" for s in sentences)


def _data(name: str) -> str:
    return resources.files("mgsat").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def reference_corpus() -> list[AnnotatedSentence]:
    """The eleven annotated sentences used in the inference experiment."""
    return parse_corpus(_data("corpus.jsonl"))


def published_lexicon(name: str):
    """Lexicon ``"A"``, ``"B"`` or ``"C"`` as printed with the experiment."""
    from .mg import parse_lexicon_text
    return parse_lexicon_text(_data(f"lexicon_{name.lower()}.mg"))


def published_lexicon_text(name: str) -> str:
    return _data(f"lexicon_{name.lower()}.mg")

import json

import pytest

from mgsat.corpus import AnnotatedSentence, CorpusError, Relation, dump_corpus, parse_corpus, reference_corpus


def test_reference_corpus_shape(corpus):
    assert len(corpus) == 11
    assert [s.name for s in corpus] == [f"I{i}" for i in range(1, 12)]
    assert [s.name for s in corpus if s.type == "decl"] == ["I1", "I5", "I9"]
    assert corpus[6].text == "what was sally eating" and corpus[6].type == "intr"


def test_tokens_lowercased():
    s = AnnotatedSentence.from_text("John has eaten pizza.", "decl", [("agree", "John", "has")])
    assert s.tokens == ("john", "has", "eaten", "pizza")
    assert s.relations == (Relation("agree", "john", "has"),)
    assert s.relation_positions() == [("agree", 0, 1)]


@pytest.mark.parametrize("kwargs, message", [
    (dict(type="question"), "sentence type"),
    (dict(relations=[("arg", "mary", "eaten")]), "not in sentence"),
    (dict(relations=[("binds", "john", "eaten")]), "relation kind"),
])
def test_bad_sentences(kwargs, message):
    args = dict(text="john has eaten pizza", type="decl", relations=())
    args.update(kwargs)
    with pytest.raises(CorpusError, match=message):
        AnnotatedSentence.from_text(**args)


def test_round_trip(corpus):
    assert parse_corpus(dump_corpus(corpus)) == corpus


@pytest.mark.parametrize("text, line", [
    ('{"text": "a b", "type": "decl"}\n{"text": "a"', 2),
    ('\n\n{"type": "decl"}', 3),
    ('{"text": "a b", "type": "decl", "relations": [{"kind": "arg", "a": "a", "b": "c"}]}', 1),
])
def test_malformed_corpus_has_line_numbers(text, line):
    with pytest.raises(CorpusError, match=f"line {line}:"):
        parse_corpus(text)


def test_comments_and_blank_lines():
    text = "# header\n\n" + json.dumps({"text": "pizza was eaten", "type": "decl"}) + "\n"
    [s] = parse_corpus(text)
    assert s.name == "I1" and s.relations == ()

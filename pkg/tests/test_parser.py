import pytest

from mgsat.corpus import AnnotatedSentence, published_lexicon
from mgsat.derivation import DerivationError, DerivationTree, EventKind, Leaf, Merge
from mgsat.mg import LexicalItem, Lexicon, parse_lexicon_text
from mgsat.parser import Bounds, RelationMode, extract_relations, parse, relations_satisfied, validate

WH_EVENTS = ["merge eating + what (=x0)", "merge eating + sally (=x0)", "merge was + eating (=x4)",
        "move was + sally (+l)", "merge eps_intr + was (<=x2)", "head-move was -> eps_intr",
        "move eps_intr + what (+r)"]


def named(tree, rels):
    toks = [l.item.phon.token for l in sorted((l for l in tree.leaves() if l.position is not None),
                                              key=lambda l: l.position)]
    return ({(toks[a], toks[b]) for a, b in rels.args}, {(toks[a], toks[b]) for a, b in rels.agrees})


def test_lexicon_c_parses_i1(lex_c, by_name):
    assert parse(lex_c, by_name["I1"].tokens, "decl")


def test_wh_question_derivation(lex_c, by_name):
    trees = parse(lex_c, by_name["I7"].tokens, "intr")
    assert [e.describe() for e in trees[0].events()] == WH_EVENTS or \
        any([e.describe() for e in t.events()] == WH_EVENTS for t in trees)
    wh = next(t for t in trees if [e.describe() for e in t.events()] == WH_EVENTS)
    args, agrees = named(wh, extract_relations(wh))
    assert {("what", "eating"), ("sally", "eating")} <= args
    assert agrees == {("sally", "was")}
    assert extract_relations(wh).sentence_type == "intr"
    assert wh.overt_string() == "what was sally eating"


def test_empty_lexicon_parses_nothing(by_name):
    assert parse(Lexicon(), by_name["I1"].tokens, "decl") == []
    assert not validate(Lexicon(), by_name["I1"])


def test_lexicon_b_parses_i7_without_local_aux_verb_merge(lex_b, by_name):
    trees = parse(lex_b, by_name["I7"].tokens, "intr")
    assert trees
    def merges_was_eating(t):
        return any(e.kind is EventKind.MERGE and {str(e.host.item.phon), str(e.other.item.phon)} == {"was", "eating"}
                   for e in t.events())
    assert any(not merges_was_eating(t) for t in trees)


def test_i9_relations(lex_c, by_name):
    trees = parse(lex_c, by_name["I9"].tokens, "decl")
    assert trees
    args, agrees = named(trees[0], extract_relations(trees[0]))
    assert ("pizza", "eaten") in args and ("pizza", "was") in agrees


def test_single_leaf_tree_has_no_relations():
    leaf = Leaf(LexicalItem.parse("eps_decl::C"), None)
    rels = DerivationTree(leaf).relations()
    assert rels.args == frozenset() and rels.agrees == frozenset()


def test_complement_linearizes_right():
    lex = parse_lexicon_text("pizza::~x0\neaten::=x0,C")
    [tree] = parse(lex, ("eaten", "pizza"))
    assert tree.overt_string() == "eaten pizza"
    assert parse(lex, ("pizza", "eaten")) == []


def test_i10_yield_matches_tokens(lex_c, by_name):
    for tree in parse(lex_c, by_name["I10"].tokens, "intr"):
        assert tuple(tree.overt_string().split()) == by_name["I10"].tokens


def test_lexicon_c_validates_every_sentence(lex_c, corpus):
    assert all(validate(lex_c, s) for s in corpus)


def test_parse_soundness(lex_c, lex_a, corpus):
    for lex in (lex_c, lex_a):
        for s in corpus:
            for tree in parse(lex, s.tokens, s.type):
                tree.check()
                assert tuple(tree.overt_string().split()) == s.tokens
                assert len(tree.head_moves()) <= 1
                assert sum(e.kind is EventKind.MOVE for e in tree.events()) <= 3


def test_wrong_order_and_type(lex_c):
    assert parse(lex_c, ("pizza", "eaten", "was"), "decl") == []
    assert parse(lex_c, ("john", "has", "eaten", "pizza"), "intr") == []


def test_bounds_limit_movement(lex_c, by_name):
    assert parse(lex_c, by_name["I7"].tokens, "intr", Bounds(max_head_moves=0)) == []
    assert parse(lex_c, by_name["I7"].tokens, "intr", Bounds(max_phrasal_moves=1)) == []


def test_covert_root_restriction():
    rooted = Bounds(covert_root=True)
    lex = parse_lexicon_text("pizza::~x0\neaten::=x0,C")
    assert parse(lex, ("eaten", "pizza"), bounds=rooted) == []
    lex = parse_lexicon_text("pizza::~x0\neaten::=x0,~x1\neps_decl::=x1,C")
    assert len(parse(lex, ("eaten", "pizza"), "decl", rooted)) == 1


def test_relation_modes(lex_c, by_name):
    s = by_name["I7"]
    flipped = AnnotatedSentence(s.tokens, s.type, tuple(type(r)(r.kind, r.b, r.a) for r in s.relations))
    assert validate(lex_c, flipped, mode=RelationMode.LOCAL)
    assert not validate(lex_c, flipped, mode=RelationMode.STRICT)
    assert validate(lex_c, s, mode=RelationMode.STRICT)


def test_relations_require_type(lex_c, by_name):
    tree = parse(lex_c, by_name["I7"].tokens, "intr")[0]
    s = by_name["I7"]
    assert not relations_satisfied(AnnotatedSentence(s.tokens, "decl", s.relations), tree.relations())


def test_check_rejects_mismatched_merge():
    a = Leaf(LexicalItem.parse("eaten::=x0,C"), 0)
    b = Leaf(LexicalItem.parse("pizza::~x1"), 1)
    with pytest.raises(DerivationError):
        DerivationTree(Merge(a, b)).check()


def test_dot_output(lex_c, by_name):
    tree = parse(lex_c, by_name["I7"].tokens, "intr")[0]
    dot = tree.to_dot()
    assert dot.startswith("digraph") and dot.count("->") >= len(tree.nodes) - 1
    assert "style=dashed" in dot


def test_parse_cap(lex_c, by_name):
    assert len(parse(lex_c, by_name["I7"].tokens, "intr", cap=1)) == 1

import pytest

from mgsat.corpus import AnnotatedSentence, CorpusError, published_lexicon
from mgsat.encoder import EncoderConfig, EncodingError, InferenceState, encode_corpus
from mgsat.mg import Lexicon, parse_lexicon_text
from mgsat.parser import parse, validate
from mgsat.sat import enumerate_models

WH_EVENTS = ["merge eating + what (=x0)", "merge eating + sally (=x0)", "merge was + eating (=x4)",
        "move was + sally (+l)", "merge eps_intr + was (<=x2)", "head-move was -> eps_intr",
        "move eps_intr + what (+r)"]


def state_for(*sentences, **cfg):
    return encode_corpus(sentences, EncoderConfig(**cfg))


def test_single_sentence_is_sat_and_decodes(by_name):
    st = state_for(by_name["I1"])
    assert st.solve([st.usage_guard()]) is True
    lex = st.decode_lexicon()
    assert validate(lex, by_name["I1"])
    tree = st.decode_parse(0)
    tree.check()
    assert tree.overt_string() == "john has eaten pizza"


def test_empty_state_decodes_empty_lexicon():
    st = InferenceState(EncoderConfig())
    assert st.solve() is True
    assert st.decode_lexicon() == Lexicon()


def test_contradiction_without_covert_budget(by_name):
    st = state_for(by_name["I1"], covert_budget=0)
    assert st.solve() is False


def test_pizza_only_lexicon_is_rejected(by_name):
    st = state_for(by_name["I1"])
    assert st.assert_lexicon(parse_lexicon_text("pizza::~x0")) is False
    assert st.solve() is True  # the guard is retractable


def test_lexicon_c_on_prefix(by_name, lex_c):
    st = state_for(by_name["I1"], by_name["I7"], by_name["I9"])
    assert st.assert_lexicon(lex_c) is True


def test_broken_lexicon_c_on_prefix(by_name, lex_c):
    st = state_for(by_name["I9"])
    broken = Lexicon(it for it in lex_c if str(it) != "was::=x4,+l,~x2")
    assert len(broken) == 14
    assert st.assert_lexicon(broken) is False
    assert st.assert_lexicon(lex_c) is True


def test_wh_question_decoding(by_name, lex_c):
    st = state_for(by_name["I7"])
    assert st.assert_lexicon(lex_c) is True
    events = [[e.describe() for e in tree.events()] for tree in _trees(st, lex_c)]
    assert WH_EVENTS in events
    # the only other derivation merges the two verb arguments in the opposite order
    assert all(sorted(ev) == sorted(WH_EVENTS) for ev in events)


def test_relation_axioms_filter(by_name, lex_a):
    s = by_name["I1"]
    assert validate(lex_a, s, check_relations=False) and not validate(lex_a, s)
    assert state_for(s).assert_lexicon(lex_a) is False
    assert state_for(s, disabled=frozenset({"relations"})).assert_lexicon(lex_a) is True
    assert state_for(s, disabled=frozenset({"relations:I1"})).assert_lexicon(lex_a) is True
    assert state_for(s, disabled=frozenset({"relations:I2"})).assert_lexicon(lex_a) is False


def test_category_renaming(by_name, lex_c):
    swap = {"x0": "x3", "x3": "x0"}
    text = "".join(f"{it}\n" for it in lex_c)
    renamed = parse_lexicon_text(text.replace("x0", "@").replace("x3", "x0").replace("@", "x3"))
    st = state_for(by_name["I7"])
    assert st.assert_lexicon(lex_c) is True
    assert st.assert_lexicon(renamed) is True
    assert swap  # documents the permutation used


def test_monotonicity(by_name, lex_c):
    st = state_for(by_name["I9"])
    assert st.solve() is True
    st.add_sentence(by_name["I7"])
    assert st.solve() is True
    # adding sentences only removes lexicons: the broken lexicon stays rejected
    broken = Lexicon(it for it in lex_c if str(it) != "was::=x4,+l,~x2")
    assert st.assert_lexicon(broken) is False


def test_encoding_errors(by_name):
    with pytest.raises(EncodingError, match="leaves"):
        state_for(by_name["I1"], max_leaves=4)
    st = InferenceState(EncoderConfig())
    with pytest.raises(EncodingError):
        st.lexicon_guard(parse_lexicon_text("pizza::=x0,=x1,=x2,~x3"))
    with pytest.raises(EncodingError):
        st.lexicon_guard(parse_lexicon_text("pizza::~x7", categories=8))
    with pytest.raises(EncodingError):
        InferenceState(EncoderConfig(max_items=1)).lexicon_guard(parse_lexicon_text("a::~x0\nb::~x0"))
    bad = object.__new__(AnnotatedSentence)
    object.__setattr__(bad, "tokens", ("a", "b"))
    object.__setattr__(bad, "type", "decl")
    object.__setattr__(bad, "relations", (type(by_name["I1"].relations[0])("arg", "a", "z"),))
    object.__setattr__(bad, "name", "bad")
    with pytest.raises(CorpusError):
        st.add_sentence(bad)


def test_manifest_lists_groups(by_name):
    st = state_for(by_name["I9"])
    st.sync()
    m = st.manifest()
    assert {"lexicon", "tree", "movement", "linearization", "relations"} <= set(m["groups"])
    assert m["sentences"] == ["pizza was eaten"]


def _trees(st, lex, cap=200):
    g = st.problem.literal(st.lexicon_guard(lex))
    st.sync()
    inst = st.instances[-1]
    proj = [v for t in ("arg", "mv", "kind", "label") for cells in inst.tables[t].cells.values() for v in cells]
    proj += [v for c in inst.choice for cells in c.cells.values() for v in cells]
    models = enumerate_models(st.solver, proj, limit=cap, assumptions=[g], full=True)
    return [st.decode_parse(len(st.instances) - 1, m) for m in models]


@pytest.mark.parametrize("name", ["I1", "I3", "I7", "I9", "I10", "I11"])
@pytest.mark.parametrize("lexicon", ["c", "b_repaired"])
def test_encoder_and_parser_agree(by_name, name, lexicon):
    """Axiomatic and chart semantics yield the same derivations for a fixed lexicon."""
    lex = published_lexicon(lexicon)
    s = by_name[name]
    st = state_for(s, disabled=frozenset({"relations"}))
    encoded = {t.signature() for t in _trees(st, lex)}
    parsed = {t.signature() for t in parse(lex, s.tokens, s.type)}
    assert encoded == parsed and parsed


def test_covert_root_option(by_name):
    # "was" carries C and the complementizer sits in a specifier
    lex = parse_lexicon_text("pizza::~x0,-l\neaten::=x0,~x1\nwas::=x1,=x2,+l,C\neps_decl::~x2")
    s = by_name["I9"]
    assert validate(lex, s)
    assert state_for(s).assert_lexicon(lex) is True
    assert state_for(s, covert_root=True).assert_lexicon(lex) is False

"""Two lexicons, one question.

Lexicon C derives "what was sally eating" the textbook way: the auxiliary
selects the verb phrase, the subject raises to it, the auxiliary head-moves
to the interrogative complementizer and the wh-word fronts last.  Lexicon B
also derives the string, but nowhere does "was" merge with "eating".  The
annotations are what tell the two apart.

    python demos/01_two_analyses.py
"""
from mgsat.corpus import published_lexicon, reference_corpus
from mgsat.parser import RelationMode, parse, validate

sentence = reference_corpus()[6]
print(f"sentence: {sentence.text!r}  ({sentence.type})")
print("annotations:", ", ".join(map(str, sentence.relations)))

for name in ("c", "b"):
    lex = published_lexicon(name)
    trees = parse(lex, sentence.tokens, sentence.type)
    print(f"\n=== lexicon {name.upper()}: {len(trees)} derivation(s)")
    tree = trees[0]
    print(tree.render())
    print("events, bottom-up:")
    for ev in tree.events():
        print("   ", ev.describe())
    for mode in RelationMode:
        print(f"validates under the {mode.value} relation reading: {validate(lex, sentence, mode=mode)}")

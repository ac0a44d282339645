"""Switch constraint groups off and see what the learner does instead.

Dropping the sentence-type axioms or the relation axioms can only make the
optimum cheaper, because fewer lexicons are ruled out.  This script runs the
ablation on the three declaratives and prints the lexicon each side
settles on.

    python demos/03_what_the_annotations_buy.py
"""
from mgsat.config import Config
from mgsat.corpus import reference_corpus
from mgsat.inference import ablate

corpus = reference_corpus()
declaratives = [s for s in corpus if s.type == "decl"]
print("corpus:", "; ".join(s.text for s in declaratives))

for group in ("relations", "sentence-type", "head-movement"):
    report = ablate(declaratives, group, Config())
    print(f"\n=== without {group}")
    for side in ("baseline", "ablated"):
        r = report[side]
        if r["status"] != "sat":
            print(f"  {side}: {r['message']}")
            continue
        print(f"  {side}: {r['values']}")
        for line in r["lexicon"]:
            print("     ", line)

"""Watch the optimal lexicon grow as sentences arrive.

For each prefix of the corpus the script asks the solver for the smallest
lexicon (fewest entries, then fewest features, then most distinct
selectors) and prints how the optimum moves.  The last row is the full
experiment on its own; the whole loop takes a couple of minutes.

    python demos/02_learning_curve.py
"""
import time

from mgsat.config import Config
from mgsat.corpus import reference_corpus
from mgsat.mg import print_lexicon_text

from mgsat.inference import run

corpus = reference_corpus()
print(f"{'prefix':>6}  {'items':>5}  {'lex feats':>9}  {'parse feats':>11}  {'distinct sel':>12}  seconds")
for k in range(1, len(corpus) + 1):
    t = time.perf_counter()
    result = run(corpus[:k], Config())
    s = result.summary()
    print(f"{k:>6}  {s['items']:>5}  {s['lexFeats']:>9}  {s['parseFeats']:>11}  {s['distinctSel']:>12}  "
          f"{time.perf_counter() - t:7.1f}   + {corpus[k - 1].text!r}")

print("\nfinal lexicon:")
print(print_lexicon_text(result.samples[0].lexicon), end="")
print("\nits derivation of the wh-question:")
print(result.samples[0].derivations[6].render())

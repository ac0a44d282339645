"""How the relation annotations are read changes the answer.

Under the strict (directional) reading, arg(a, p) needs a's phrase to be
selected by p and agree(x, y) needs x's phrase to move into y's projection.
The symmetric reading accepts a merge in either direction.  The symmetric
reading admits a smaller lexicon for the full corpus.  The strict
optimum is found in seconds; the symmetric one takes several minutes, so it
runs only with --symmetric.

    python demos/04_relation_readings.py [--symmetric]
"""
import sys
import time

from mgsat.config import Config
from mgsat.corpus import reference_corpus
from mgsat.inference import run
from mgsat.mg import print_lexicon_text

corpus = reference_corpus()
modes = ["strict", "local"] if "--symmetric" in sys.argv else ["strict"]
for mode in modes:
    t = time.perf_counter()
    result = run(corpus, Config(relation_mode=mode, cost=("entries",)))
    print(f"=== {mode} reading: {result.values['entries']} entries ({time.perf_counter() - t:.0f}s)")
    print(print_lexicon_text(result.samples[0].lexicon))

"""The acquisition driver: consume sentences, optimize, sample, validate."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .config import OBJECTIVES, Config
from .corpus import AnnotatedSentence
from .derivation import DerivationTree
from .encoder import GROUPS, EncodingError, InferenceState
from .ir import Formula, Or
from .mg import Kind, Lexicon, print_lexicon_text
from .parser import validate
from .sat import Objective, OptimizeError, optimize

__all__ = ["CostSpec", "InferenceState", "InconsistentCorpus", "InferenceResult", "Sample", "build_state",
           "run", "sample_lexicons", "ablate"]


class InconsistentCorpus(RuntimeError):
    """Raised when adding a sentence leaves no lexicon within the bounds."""

    def __init__(self, index: int, sentence: AnnotatedSentence | None):
        self.index, self.sentence = index, sentence
        where = f"sentence {index + 1} ({sentence.text!r})" if sentence else "the corpus"
        super().__init__(f"corpus inconsistent under bounds: unsatisfiable after {where}")


@dataclass(frozen=True)
class CostSpec:
    """Objective names applied in strict lexicographic order."""

    order: tuple[str, ...] = ("entries", "features", "distinct_selectors")

    def __post_init__(self):
        bad = [o for o in self.order if o not in OBJECTIVES]
        if bad:
            raise ValueError(f"unknown objective(s) {bad}")


@dataclass
class Sample:
    lexicon: Lexicon
    derivations: list[DerivationTree]
    values: dict[str, int]
    validated: list[bool]

    @property
    def valid(self) -> bool:
        return all(self.validated)


@dataclass
class InferenceResult:
    config: Config
    cost: CostSpec
    sentences: list[AnnotatedSentence]
    values: dict[str, int]
    optimal: bool
    samples: list[Sample]
    history: dict[str, list[int]]
    timing: dict[str, float] = field(default_factory=dict)
    state: InferenceState | None = field(default=None, repr=False)

    def summary(self) -> dict:
        """Headline metrics of the first sample (empty when nothing was sampled)."""
        if not self.samples:
            return {}
        v = self.samples[0].values
        return {"items": v["entries"], "lexFeats": v["lexicon_features"], "parseFeats": v["parse_features"],
                "distinctSel": v["distinct_selectors"]}

    def report(self) -> dict:
        """Deterministic summary (no wall-clock data)."""
        return {
            "config": self.config.to_dict(),
            "cost": list(self.cost.order),
            "corpus": [s.text for s in self.sentences],
            "values": self.values,
            "optimal": self.optimal,
            "history": self.history,
            "summary": self.summary(),
            "samples": [{
                "items": len(s.lexicon),
                "values": s.values,
                "lexicon": print_lexicon_text(s.lexicon).splitlines(),
                "validated": s.validated,
            } for s in self.samples],
        }


def build_state(corpus: Sequence[AnnotatedSentence], config: Config = Config(), check_each: bool = True,
                log: Callable[[str], None] | None = None) -> InferenceState:
    """Consume the corpus one sentence at a time; raise at the first UNSAT prefix."""
    if not corpus:
        raise ValueError("corpus is empty")
    state = InferenceState(config.encoder(), seed=config.seed)
    for i, s in enumerate(corpus):
        state.add_sentence(s)
        if check_each:
            r = state.solve(conflict_budget=config.conflict_budget)
            if r is False:
                raise InconsistentCorpus(i, s)
            if log:
                log(f"consumed {s.name or s.text}: {'sat' if r else 'unknown'}")
    return state


def objective_literals(state: InferenceState, name: str) -> list[Formula]:
    if name == "entries":
        return state.entry_literals()
    if name == "lexicon_features":
        return state.lexicon_feature_literals()
    if name == "parse_features":
        return state.parse_feature_literals()
    if name == "features":
        return state.lexicon_feature_literals() + state.parse_feature_literals()
    if name == "distinct_selectors":
        return state.distinct_selector_literals()
    raise ValueError(f"unknown objective {name!r}")


def objective_values(state: InferenceState, model, names: Sequence[str]) -> dict[str, int]:
    p = state.problem
    out = {}
    for name in names:
        if name == "distinct_selectors":
            lex = state.decode_lexicon(model)
            out[name] = len({f.cat for it in lex for f in it.feats if f.kind is Kind.SELECTOR})
        else:
            out[name] = sum(p.evaluate(l, model) for l in objective_literals(state, name))
    return out


def sample_lexicons(state: InferenceState, n: int, assumptions: Sequence = (),
                    conflict_budget: int | None = None) -> list[tuple[Lexicon, list[bool]]]:
    """Up to ``n`` pairwise distinct lexicons (by printed form) with their models."""
    usage = state.usage_guard()
    act = state.guard("sampling")
    lits = [usage, act, *assumptions]
    out, seen = [], set()
    while len(out) < n:
        r = state.solve(lits, conflict_budget)
        if not r:
            break
        model = list(state.solver.model)
        lex = state.decode_lexicon(model)
        key = print_lexicon_text(lex)
        if key in seen:  # cannot happen while the blocking clause is exact; guard against loops
            raise EncodingError("sampling produced a repeated lexicon")
        seen.add(key)
        out.append((lex, model))
        state.problem.add(Or(~act, state.lexicon_differs(lex)), "guards")
    state.problem.add(~act, "guards")
    return out


def run(corpus: Sequence[AnnotatedSentence], config: Config = Config(), cost: CostSpec | None = None,
        samples: int | None = None, log: Callable[[str], None] | None = None,
        state: InferenceState | None = None) -> InferenceResult:
    """Build the final state, optimize lexicographically and sample optimal lexicons."""
    cost = cost or CostSpec(config.cost)
    samples = config.samples if samples is None else samples
    t0 = time.perf_counter()
    if state is None:
        state = build_state(corpus, config, log=log)
    t1 = time.perf_counter()
    usage = state.usage_guard()
    p = state.problem
    objectives = [Objective([p.literal(l) for l in objective_literals(state, name)], OBJECTIVES[name], name)
                  for name in cost.order]
    state.sync()
    try:
        res = optimize(state.solver, objectives, config.conflict_budget, [p.literal(usage)], log)
    except OptimizeError:
        raise InconsistentCorpus(len(state.sentences) - 1, None) from None
    t2 = time.perf_counter()
    values = dict(zip(cost.order, res.values))
    history = {name: trace for name, trace in zip(cost.order, res.history)}
    drawn = sample_lexicons(state, samples, res.bounds, config.conflict_budget) if res.model else []
    out = []
    for lex, model in drawn:
        trees = [state.decode_parse(i, model) for i in range(len(state.instances))]
        ok = [validate(lex, s, config.bounds(), config.mode, cap=config.parse_cap) for s in state.sentences]
        out.append(Sample(lex, trees, objective_values(state, model, list(OBJECTIVES)), ok))
    t3 = time.perf_counter()
    timing = {"encode": t1 - t0, "optimize": t2 - t1, "sample": t3 - t2}
    return InferenceResult(config, cost, list(state.sentences), values, res.optimal, out, history, timing, state)


def ablate(corpus: Sequence[AnnotatedSentence], group: str, config: Config = Config(),
           cost: CostSpec | None = None, log: Callable[[str], None] | None = None) -> dict:
    """Compare optimal values with and without one axiom group."""
    if group.split(":", 1)[0] not in GROUPS:
        raise ValueError(f"unknown axiom group {group!r}; choose from {list(GROUPS)}")

    def one(cfg: Config) -> dict:
        try:
            r = run(corpus, cfg.replace(samples=1), cost, log=log)
        except InconsistentCorpus as e:
            return {"status": "unsat", "message": str(e)}
        s = r.samples[0] if r.samples else None
        return {"status": "sat", "values": r.values, "optimal": r.optimal,
                "lexicon": print_lexicon_text(s.lexicon).splitlines() if s else [],
                "validated": s.validated if s else []}

    base = one(config)
    ablated = one(config.replace(disabled=tuple(sorted(set(config.disabled) | {group}))))
    return {"group": group, "baseline": base, "ablated": ablated}

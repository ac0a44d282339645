"""Compile bounded MG derivations and a shared lexicon into the constraint IR.

Each sentence gets a parse instance over its leaves (one per token plus one
covert complementizer).  A leaf's features occupy up to ``max_feats`` cells;
the projection of a leaf is tracked cell by cell (Graf's slices), so every
interior node of the derivation tree is a pair (leaf, cell) and its head is
that leaf.  Selector cells name the leaf whose maximal projection they
merge (``arg``), licensor cells name the leaf whose phrase they attract
(``mv``).  Pending movers are tracked per stage of each projection, which
gives the Shortest Move Constraint directly, and linearization is computed
from (specifier, head, complement) span variables per leaf.

Lexicon slots are allocated per word occurrence: the t-th occurrence of a
word may use slots 0..t of that word's block, and slot k may only be chosen
once slot k-1 has been chosen by an earlier occurrence.  This removes the
slot-permutation symmetry without excluding any lexicon.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .corpus import AnnotatedSentence, CorpusError
from .derivation import DerivationTree, Leaf, Merge, Move, Node
from .ir import BOOL, FALSE, And, Atom, Formula, IRError, Not, Or, Problem, Sort
from .mg import (DECL, INTR, Covert, Feature, HeadMove, Kind, LexicalItem, Lexicon, LexiconError,
                 PhoneticForm, category_index, category_name)
from .parser import RelationMode
from .sat import Solver

KINDS = ("none", "sel", "sel_left", "sel_right", "lic", "selectee", "licensee")
EMPTY, SEL, SELL, SELR, LIC, SLE, LEE = range(7)
SELECTORS = (SEL, SELL, SELR)

GROUPS = ("lexicon", "choice", "tree", "features", "movement", "smc", "head-movement",
          "completion", "linearization", "sentence-type", "relations", "bounds", "symmetry")


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class EncoderConfig:
    categories: int = 5
    licensing: tuple[str, ...] = ("l", "r")
    max_feats: int = 3
    max_phrasal_moves: int = 3
    max_head_moves: int = 1
    covert_budget: int = 1
    covert_root: bool = False
    max_leaves: int = 8
    max_items: int = 24
    relation_mode: RelationMode = RelationMode.STRICT
    disabled: frozenset = frozenset()
    symmetry_breaking: bool = False
    universal_categories: bool = False

    def __post_init__(self):
        object.__setattr__(self, "disabled", frozenset(self.disabled))
        unknown = {g for g in self.disabled if g.split(":", 1)[0] not in GROUPS}
        if unknown:
            raise EncodingError(f"unknown axiom group(s): {sorted(unknown)}")
        if self.universal_categories:
            raise NotImplementedError("universal category axioms are not implemented")
        for name in ("categories", "max_feats", "max_leaves", "max_items"):
            if getattr(self, name) < 1:
                raise EncodingError(f"{name} must be positive")


@dataclass
class Slot:
    index: int  # global
    phon: PhoneticForm
    rank: int  # position inside its word block
    kind: object
    label: object
    comp: Atom
    used: Atom
    choosers: list[Atom] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"{self.phon}#{self.rank}"


class LexiconModel:
    """Slots with feature grids shared by all parse instances."""

    def __init__(self, state: "InferenceState"):
        self.state = state
        self.slots: list[Slot] = []
        self.blocks: dict[PhoneticForm, list[Slot]] = {}
        self.occurrences: dict[PhoneticForm, int] = {}

    def new_slot(self, phon: PhoneticForm) -> Slot:
        st = self.state
        p = st.problem
        block = self.blocks.setdefault(phon, [])
        idx = len(self.slots)
        name = f"slot{idx}"
        slot = Slot(idx, phon, len(block),
                    p.table(f"{name}_kind", (st.cell,), st.kind_sort),
                    p.table(f"{name}_label", (st.cell,), st.label_sort),
                    p.boolean(f"{name}_C"), p.boolean(f"{name}_used"))
        self.slots.append(slot)
        block.append(slot)
        st._grid_axioms(slot.kind, slot.label, (), "lexicon")
        add = st.add
        F = st.config.max_feats
        for j in range(F):
            add(Or(slot.used, slot.kind.eq(j, EMPTY)), "lexicon")
            if j:
                add(~slot.kind.eq(j, SELL), "lexicon")
                add(~slot.kind.eq(j, SELR), "lexicon")
        add(Or(slot.used, ~slot.comp), "lexicon")
        if self.state.config.covert_root and phon.is_overt:
            add(~slot.comp, "completion")
        add(Or(~slot.used, ~slot.kind.eq(0, EMPTY), slot.comp), "lexicon")
        return slot

    def chosen(self, model) -> list[Slot]:
        p = self.state.problem
        return [s for s in self.slots if any(p.holds(a, model) for a in s.choosers)]

    def item(self, slot: Slot, model) -> LexicalItem:
        p = self.state.problem
        feats = []
        for j in range(self.state.config.max_feats):
            k = p.value(slot.kind[j], model)
            if k == EMPTY:
                break
            feats.append(self.state.feature(k, p.value(slot.label[j], model)))
        if p.holds(slot.comp, model):
            feats.append(Feature(Kind.COMPLETE))
        return LexicalItem(slot.phon, tuple(feats))


@dataclass
class ParseInstance:
    index: int
    sentence: AnnotatedSentence
    leaves: list[PhoneticForm]
    choice: list[object]  # per leaf: table over its candidate slots
    options: list[list[Slot]]
    tables: dict[str, object]

    @property
    def n(self) -> int:
        return len(self.sentence.tokens)


class InferenceState:
    """The acquisition state: a shared lexicon model plus one parse per sentence."""

    def __init__(self, config: EncoderConfig = EncoderConfig(), seed: int = 0):
        self.config = config
        self.problem = Problem()
        self.solver = Solver(seed=seed)
        self.solver.var_source = self.problem._new_var
        self._fed = 0
        p = self.problem
        F = config.max_feats
        self.cell = p.sort("Cell", [f"c{j}" for j in range(F)])
        self.cell_none = p.sort("CellOrNone", [f"c{j}" for j in range(F)] + ["none"])
        self.kind_sort = p.sort("Kind", KINDS)
        labels = [category_name(c) for c in range(config.categories)] + list(config.licensing)
        self.label_sort = p.sort("Label", labels)
        self.sel_labels = list(range(config.categories))
        self.lic_labels = list(range(config.categories, len(labels)))
        self.lexicon = LexiconModel(self)
        self.instances: list[ParseInstance] = []
        self.sentences: list[AnnotatedSentence] = []
        self._sorts: dict[str, Sort] = {}
        self._guards = 0
        self._current = None

    # plumbing ------------------------------------------------------------
    def add(self, f: Formula, group: str) -> None:
        """Add an axiom; groups can be disabled globally or per sentence ("group:name")."""
        off = self.config.disabled
        if group in off or f"{group}:{self._current}" in off:
            return
        self.problem.add(f, group)

    def shared_sort(self, name: str, elements) -> Sort:
        s = self._sorts.get(name)
        if s is None:
            s = self._sorts[name] = self.problem.sort(name, elements)
        return s

    def sync(self) -> Solver:
        """Ground pending IR and feed new clauses to the incremental solver."""
        cnf = self.problem.ground()
        self.solver.ensure_vars(cnf.nvars)
        for c in cnf.clauses[self._fed:]:
            self.solver.add_clause(c)
        self._fed = len(cnf.clauses)
        return self.solver

    def guard(self, name: str) -> Atom:
        self._guards += 1
        return self.problem.boolean(f"guard{self._guards}_{name}")

    def feature(self, kind: int, label: int) -> Feature:
        name = self.label_sort.elements[label]
        if kind == SEL:
            return Feature(Kind.SELECTOR, name)
        if kind == SELL:
            return Feature(Kind.SELECTOR, name, HeadMove.LEFT)
        if kind == SELR:
            return Feature(Kind.SELECTOR, name, HeadMove.RIGHT)
        if kind == LIC:
            return Feature(Kind.LICENSOR, name)
        if kind == SLE:
            return Feature(Kind.SELECTEE, name)
        return Feature(Kind.LICENSEE, name)

    def code(self, f: Feature) -> tuple[int, int]:
        """(kind, label) codes of a feature; raises for out-of-bounds categories."""
        if f.kind in (Kind.SELECTOR, Kind.SELECTEE):
            c = category_index(f.cat)
            if c >= self.config.categories:
                raise LexiconError(f"category {f.cat} exceeds the inventory of {self.config.categories}")
            if f.kind is Kind.SELECTEE:
                return SLE, c
            return {HeadMove.NONE: SEL, HeadMove.LEFT: SELL, HeadMove.RIGHT: SELR}[f.head_move], c
        if f.cat not in self.config.licensing:
            raise LexiconError(f"licensing category {f.cat} not in {self.config.licensing}")
        label = self.config.categories + self.config.licensing.index(f.cat)
        return (LIC if f.kind is Kind.LICENSOR else LEE), label

    def _grid_axioms(self, kind, label, prefix: tuple, group: str) -> None:
        """Canonical feature order and kind/label agreement for one grid."""
        F = self.config.max_feats
        add = self.add
        for j in range(F):
            a = prefix + (j,)
            for k in SELECTORS + (SLE,):
                add(Or(~kind.eq(a, k), *(label.eq(a, c) for c in self.sel_labels)), group)
            for k in (LIC, LEE):
                add(Or(~kind.eq(a, k), *(label.eq(a, c) for c in self.lic_labels)), group)
            add(Or(~kind.eq(a, EMPTY), label.eq(a, 0)), group)
            if j + 1 < F:
                add(Or(~kind.eq(a, EMPTY), kind.eq(prefix + (j + 1,), EMPTY)), group)
            if j == 0:
                add(~kind.eq(a, LEE), group)
            else:
                prev = prefix + (j - 1,)
                add(Or(~kind.eq(a, LEE), kind.eq(prev, SLE), kind.eq(prev, LEE)), group)
            for j2 in range(j + 1, F):
                add(Or(~kind.eq(a, SLE), kind.eq(prefix + (j2,), LEE), kind.eq(prefix + (j2,), EMPTY)), group)

    # the transition function ---------------------------------------------
    def add_sentence(self, s: AnnotatedSentence) -> ParseInstance:
        cfg = self.config
        n = len(s.tokens)
        L = n + min(cfg.covert_budget, 1)
        if L > cfg.max_leaves:
            raise EncodingError(f"{s.text!r} needs {L} leaves, budget is {cfg.max_leaves}")
        for r in s.relations:
            for tok in (r.a, r.b):
                if tok not in s.tokens:
                    raise CorpusError(f"annotation token {tok!r} not in {s.text!r}")
        i = len(self.instances)
        self._current = s.name or f"S{i + 1}"
        p = self.problem
        F = cfg.max_feats
        pre = f"I{i}_"
        leaves = [PhoneticForm.overt(t) for t in s.tokens]
        if L > n:
            leaves.append(s.covert)

        # lexical choice --------------------------------------------------
        choice, options = [], []
        for l, phon in enumerate(leaves):
            if l < n:
                forms = [phon]
            elif {"sentence-type", f"sentence-type:{self._current}"} & cfg.disabled:
                forms = [DECL, INTR]
            else:
                forms = [phon]
            opts = []
            for form in forms:
                t = self.lexicon.occurrences.get(form, 0)
                self.lexicon.occurrences[form] = t + 1
                block = self.lexicon.blocks.get(form, [])
                while len(block) <= t:
                    self.lexicon.new_slot(form)
                    block = self.lexicon.blocks[form]
                opts.extend(block[: t + 1])
            sort = p.sort(f"{pre}opts{l}", [o.name for o in opts])
            choice.append(p.table(f"{pre}slot{l}", (), sort))
            options.append(opts)

        leaf_sort = self.shared_sort(f"Leaf{L}", [f"l{j}" for j in range(L)])
        leaf_none = self.shared_sort(f"LeafOrNone{L}", [f"l{j}" for j in range(L)] + ["none"])
        rank_sort = leaf_sort
        NONE = L
        spans = [None] + [(a, b) for a in range(n + 1) for b in range(a + 1, n + 1)]
        span_sort = self.shared_sort(f"Span{n}", ["empty"] + [f"s{a}_{b}" for a, b in spans[1:]])
        sp_index = {sp: k for k, sp in enumerate(spans)}
        stage = self.shared_sort(f"Stage{F + 1}", [f"t{j}" for j in range(F + 1)])
        cell, cell_none = self.cell, self.cell_none

        T = lambda name, dom, cod: p.table(pre + name, dom, cod)
        kind = T("kind", (leaf_sort, cell), self.kind_sort)
        label = T("label", (leaf_sort, cell), self.label_sort)
        comp = T("C", (leaf_sort,), BOOL)
        sidx = T("sidx", (leaf_sort,), cell_none)
        moves = T("moves", (leaf_sort,), BOOL)
        hm = T("hm", (leaf_sort,), BOOL)
        hmc = T("hm_comp", (leaf_sort,), BOOL)
        arg = T("arg", (leaf_sort, cell), leaf_none)
        mv = T("mv", (leaf_sort, cell), leaf_none)
        rank = T("rank", (leaf_sort,), rank_sort)
        pend = T("pend", (leaf_sort, stage, leaf_sort, cell), BOOL)
        att = T("att", (leaf_sort, cell, leaf_sort, cell), BOOL)
        S = T("spec", (leaf_sort, stage), span_sort)
        H = T("head", (leaf_sort,), span_sort)
        C = T("comp", (leaf_sort,), span_sort)
        head_in = T("head_in", (leaf_sort,), span_sort)
        comp_in = T("comp_in", (leaf_sort,), span_sort)
        spec_in = T("spec_in", (leaf_sort, cell), span_sort)
        sh = T("sh", (leaf_sort,), span_sort)
        sc = T("sc", (leaf_sort,), span_sort)
        flat = T("flat", (leaf_sort,), span_sort)
        tables = dict(kind=kind, label=label, comp=comp, sidx=sidx, moves=moves, hm=hm, arg=arg, mv=mv,
                      rank=rank, pend=pend, att=att, spec=S, head=H, compspan=C, flat=flat)
        inst = ParseInstance(i, s, leaves, choice, options, tables)
        add = self.add
        leaves_r = range(L)
        cells = range(F)

        # leaf features come from the chosen slot
        for l in leaves_r:
            for k, slot in enumerate(options[l]):
                pick = choice[l].eq((), k)
                slot.choosers.append(pick)
                add(Or(~pick, slot.used), "choice")
                if slot.rank > 0:
                    earlier = [a for a in self.lexicon.blocks[slot.phon][slot.rank - 1].choosers if a is not pick]
                    add(Or(~pick, *earlier), "choice")
                for j in cells:
                    for v in range(len(KINDS)):
                        add(Or(~pick, ~slot.kind.eq(j, v), kind.eq((l, j), v)), "choice")
                    for v in range(self.label_sort.size):
                        add(Or(~pick, ~slot.label.eq(j, v), label.eq((l, j), v)), "choice")
                add(Or(~pick, ~slot.comp, comp[l].holds), "choice")
                add(Or(~pick, slot.comp, ~comp[l].holds), "choice")
            self._grid_axioms(kind, label, (l,), "choice")

        # (a) tree shape: selectee index, one root, each argument selected once, acyclic
        for m in leaves_r:
            for q in cells:
                add(Or(~sidx.eq(m, q), kind.eq((m, q), SLE)), "tree")
                add(Or(~kind.eq((m, q), SLE), sidx.eq(m, q)), "tree")
            for q in cells:
                add(Or(~sidx.eq(m, "none"), ~kind.eq((m, q), SLE)), "tree")
            picks = [arg.eq((l, j), m) for l in leaves_r for j in cells if l != m]
            add(Or(sidx.eq(m, "none"), *picks), "tree")
            for a_ in range(len(picks)):
                for b_ in range(a_ + 1, len(picks)):
                    add(Or(~picks[a_], ~picks[b_]), "tree")
            for pk in picks:
                add(Or(~pk, ~sidx.eq(m, "none")), "tree")
        roots = [sidx.eq(m, "none") for m in leaves_r]
        add(Or(*roots), "tree")
        for a_ in range(L):
            for b_ in range(a_ + 1, L):
                add(Or(~roots[a_], ~roots[b_]), "tree")
        for l in leaves_r:
            for j in cells:
                add(~arg.eq((l, j), l), "tree")
                for k in SELECTORS:
                    add(Or(~kind.eq((l, j), k), ~arg.eq((l, j), NONE)), "tree")
                add(Or(arg.eq((l, j), NONE), *(kind.eq((l, j), k) for k in SELECTORS)), "tree")
                for m in leaves_r:
                    if m == l:
                        continue
                    for a_ in range(L):
                        add(Or(~arg.eq((l, j), m), ~rank.eq(l, a_), *(rank.eq(m, b) for b in range(a_))), "tree")

        # (c) feature matching for external merge
        for l in leaves_r:
            for j in cells:
                for m in leaves_r:
                    if m == l:
                        continue
                    for q in cells:
                        for c in self.sel_labels:
                            add(Or(~arg.eq((l, j), m), ~sidx.eq(m, q), ~label.eq((l, j), c), label.eq((m, q), c)),
                                "features")

        # movement: licensees, pending movers and attraction
        for x in leaves_r:
            add(Or(~moves[x].holds, *(kind.eq((x, q), LEE) for q in cells)), "movement")
            for q in cells:
                add(Or(~kind.eq((x, q), LEE), moves[x].holds), "movement")
        qs = range(1, F)
        for l in leaves_r:
            for x in leaves_r:
                for q in cells:
                    add(~pend[(l, 0, x, q)].holds, "movement")
                    if x == l or q == 0:
                        for t in range(F + 1):
                            add(~pend[(l, t, x, q)].holds, "movement")
                        for j in cells:
                            add(~att[(l, j, x, q)].holds, "movement")
            for j in cells:
                atts = [att[(l, j, x, q)].holds for x in leaves_r if x != l for q in qs]
                add(Or(~kind.eq((l, j), LIC), *atts), "movement")
                for a_ in range(len(atts)):
                    for b_ in range(a_ + 1, len(atts)):
                        add(Or(~atts[a_], ~atts[b_]), "movement")
                add(Or(kind.eq((l, j), LIC), mv.eq((l, j), NONE)), "movement")
                add(Or(~kind.eq((l, j), LIC), ~mv.eq((l, j), NONE)), "movement")
                for x in leaves_r:
                    if x == l:
                        add(~mv.eq((l, j), x), "movement")
                        continue
                    add(Or(~mv.eq((l, j), x), *(att[(l, j, x, q)].holds for q in qs)), "movement")
                    for q in qs:
                        a = att[(l, j, x, q)].holds
                        add(Or(~a, mv.eq((l, j), x)), "movement")
                        add(Or(~a, pend[(l, j, x, q)].holds), "movement")
                        add(Or(~a, kind.eq((l, j), LIC)), "movement")
                        add(Or(~a, kind.eq((x, q), LEE)), "movement")
                        for c in self.lic_labels:
                            add(Or(~a, ~label.eq((l, j), c), label.eq((x, q), c)), "movement")
                # next stage of the pending set
                for x in leaves_r:
                    if x == l:
                        continue
                    for q in qs:
                        nxt = pend[(l, j + 1, x, q)].holds
                        cur = pend[(l, j, x, q)].holds
                        a = att[(l, j, x, q)].holds
                        terms = [(cur, ~a)]
                        for m in leaves_r:
                            if m != l and m != x:
                                terms.append((arg.eq((l, j), m), pend[(m, F, x, q)].holds))
                        terms.append((arg.eq((l, j), x), sidx.eq(x, q - 1), kind.eq((x, q), LEE)))
                        terms.append((att[(l, j, x, q - 1)].holds, kind.eq((x, q), LEE)))
                        for term in terms:
                            add(Or(*(~t for t in term), nxt), "movement")
                        add(Or(~nxt, *(And(*term) for term in terms)), "movement")

        # (e) shortest move constraint
        for l in leaves_r:
            for t in range(1, F + 1):
                for c in self.lic_labels:
                    hits = []
                    for x in leaves_r:
                        for q in qs:
                            if x != l:
                                hits.append(And(pend[(l, t, x, q)].holds, label.eq((x, q), c)))
                    for a_ in range(len(hits)):
                        for b_ in range(a_ + 1, len(hits)):
                            add(Or(Not(hits[a_]), Not(hits[b_])), "smc")

        # (d) head movement
        for l in leaves_r:
            add(Or(~hm[l].holds, kind.eq((l, 0), SELL), kind.eq((l, 0), SELR)), "head-movement")
            add(Or(hm[l].holds, ~kind.eq((l, 0), SELL)), "head-movement")
            add(Or(hm[l].holds, ~kind.eq((l, 0), SELR)), "head-movement")
            for j in cells[1:]:
                add(~kind.eq((l, j), SELL), "head-movement")
                add(~kind.eq((l, j), SELR), "head-movement")
            for m in leaves_r:
                if m != l:
                    add(Or(~hm[l].holds, ~arg.eq((l, 0), m), ~moves[m].holds), "head-movement")

        # (f) completion: the root carries C and no pending movers
        for m in leaves_r:
            add(Or(~sidx.eq(m, "none"), comp[m].holds), "completion")
            add(Or(sidx.eq(m, "none"), ~comp[m].holds), "completion")
            for x in leaves_r:
                for q in qs:
                    if x != m:
                        add(Or(~sidx.eq(m, "none"), ~pend[(m, F, x, q)].holds), "completion")

        # (g) linearization
        def concat_rule(cond: list, r, a, b) -> None:
            """r = a . b under cond; a/b are (table, args) or a constant span."""
            avals = [(sp_index[a[1]], None)] if a[0] == "const" else [(v, a[0].eq(a[1], v)) for v in range(len(spans))]
            bvals = [(sp_index[b[1]], None)] if b[0] == "const" else [(v, b[0].eq(b[1], v)) for v in range(len(spans))]
            for va, la in avals:
                for vb, lb in bvals:
                    res = _concat(spans[va], spans[vb])
                    lits = [~c for c in cond] + [~x for x in (la, lb) if x is not None]
                    if res is False:
                        add(Or(*lits), "linearization")
                    else:
                        add(Or(*lits, r[0].eq(r[1], sp_index[res])), "linearization")

        def copy_rule(cond: list, r, a) -> None:
            for v in range(len(spans)):
                add(Or(*(~c for c in cond), ~a[0].eq(a[1], v), r[0].eq(r[1], v)), "linearization")

        def const_rule(cond: list, r, span) -> None:
            add(Or(*(~c for c in cond), r[0].eq(r[1], sp_index[span])), "linearization")

        for l in leaves_r:
            tok = (l, l + 1) if l < n else None
            const_rule([], (S, (l, 0)), None)
            const_rule([], (S, (l, 1)), None)
            others = [m for m in leaves_r if m != l]
            # raised head and complement
            const_rule([~hm[l].holds], (head_in, l), None)
            for m in others:
                copy_rule([hm[l].holds, arg.eq((l, 0), m)], (head_in, l), (H, m))
                copy_rule([kind.eq((l, 0), SEL), arg.eq((l, 0), m), ~moves[m].holds], (comp_in, l), (flat, m))
                copy_rule([hm[l].holds, arg.eq((l, 0), m)], (comp_in, l), (sc, m))
                add(Or(~hm[l].holds, ~arg.eq((l, 0), m), hmc[m].holds), "linearization")
                const_rule([arg.eq((l, 0), m), moves[m].holds], (comp_in, l), None)
            const_rule([arg.eq((l, 0), NONE)], (comp_in, l), None)
            copy_rule([], (C, l), (comp_in, l))
            const_rule([~hm[l].holds], (H, l), tok)
            concat_rule([kind.eq((l, 0), SELL)], (H, l), (head_in, l), ("const", tok))
            concat_rule([kind.eq((l, 0), SELR)], (H, l), ("const", tok), (head_in, l))
            # specifiers from later merges and final landings
            for j in cells[1:]:
                for m in others:
                    copy_rule([arg.eq((l, j), m), ~moves[m].holds], (spec_in, (l, j)), (flat, m))
                    const_rule([arg.eq((l, j), m), moves[m].holds], (spec_in, (l, j)), None)
                    for q in qs:
                        a = att[(l, j, m, q)].holds
                        if q + 1 < F:
                            copy_rule([a, ~kind.eq((m, q + 1), LEE)], (spec_in, (l, j)), (flat, m))
                            const_rule([a, kind.eq((m, q + 1), LEE)], (spec_in, (l, j)), None)
                        else:
                            copy_rule([a], (spec_in, (l, j)), (flat, m))
                const_rule([arg.eq((l, j), NONE), ~kind.eq((l, j), LIC)], (spec_in, (l, j)), None)
                concat_rule([], (S, (l, j + 1)), (spec_in, (l, j)), (S, (l, j)))
            const_rule([], (spec_in, (l, 0)), None)
            # a head-moved complement is split up, so it never needs a flat span
            add(Or(~hmc[l].holds, *(And(hm[k].holds, arg.eq((k, 0), l)) for k in others)), "linearization")
            concat_rule([~hmc[l].holds], (sh, l), (S, (l, F)), (H, l))
            concat_rule([~hmc[l].holds], (flat, l), (sh, l), (C, l))
            # spec and complement of a head-moved complement must be adjacent
            concat_rule([hmc[l].holds], (sc, l), (S, (l, F)), (C, l))
            # the root spans the sentence
            const_rule([sidx.eq(l, "none")], (flat, l), (0, n))

        # (h) sentence type: a covert complementizer leaf must exist
        if L == n:
            add(FALSE, "sentence-type")

        # (i) annotated relations
        for kind_, a_tok, b_tok in s.relation_positions():
            add(Or(*self._relation(inst, kind_, a_tok, b_tok)), "relations")

        # bounds
        if "bounds" not in cfg.disabled and f"bounds:{self._current}" not in cfg.disabled:
            p.add_card([kind.eq((l, j), LIC) for l in leaves_r for j in cells], cfg.max_phrasal_moves, "<=", "bounds")
            p.add_card([hm[l].holds for l in leaves_r], cfg.max_head_moves, "<=", "bounds")
            if len(self.lexicon.slots) > cfg.max_items:
                p.add_card([sl.used for sl in self.lexicon.slots], cfg.max_items, "<=", "bounds")
        if cfg.symmetry_breaking:
            self._category_symmetry(inst)

        self.instances.append(inst)
        self.sentences.append(s)
        self._current = None
        return inst

    def _relation(self, inst: ParseInstance, kind_: str, a: int, b: int) -> list[Formula]:
        arg, mv = inst.tables["arg"], inst.tables["mv"]
        F = self.config.max_feats
        sel_ab = [arg.eq((b, j), a) for j in range(F)]
        sel_ba = [arg.eq((a, j), b) for j in range(F)]
        mv_ab = [mv.eq((b, j), a) for j in range(F)]
        mv_ba = [mv.eq((a, j), b) for j in range(F)]
        if self.config.relation_mode is RelationMode.STRICT:
            return sel_ab if kind_ == "arg" else mv_ab
        if kind_ == "arg":
            return sel_ab + sel_ba
        return sel_ab + sel_ba + mv_ab + mv_ba

    def _category_symmetry(self, inst: ParseInstance) -> None:
        """Selection categories in use form a prefix x0..xk (sound up to renaming)."""
        p = self.problem
        if not hasattr(self, "_catused"):
            self._catused = [p.boolean(f"catused{c}") for c in self.sel_labels]
            for c in self.sel_labels[1:]:
                self.add(Or(~self._catused[c], self._catused[c - 1]), "symmetry")
        kind, label = inst.tables["kind"], inst.tables["label"]
        for l in range(len(inst.leaves)):
            for j in range(self.config.max_feats):
                for c in self.sel_labels:
                    for k in SELECTORS + (SLE,):
                        self.add(Or(~kind.eq((l, j), k), ~label.eq((l, j), c), self._catused[c]), "symmetry")

    # queries -------------------------------------------------------------
    def usage_guard(self) -> Atom:
        """Guard literal making ``used`` exact for the sentences seen so far."""
        g = self.guard("usage")
        for slot in self.lexicon.slots:
            self.problem.add(Or(~g, ~slot.used, *slot.choosers), "guards")
        return g

    def lexicon_guard(self, lex: Lexicon) -> Atom:
        """Guard literal restricting every used slot to an item of ``lex``."""
        cfg = self.config
        for item in lex:
            if len(item.budget_feats) > cfg.max_feats:
                raise EncodingError(f"{item} exceeds {cfg.max_feats} features")
            try:
                for f in item.budget_feats:
                    self.code(f)
            except LexiconError as e:
                raise EncodingError(str(e)) from None
        if len(lex) > cfg.max_items:
            raise EncodingError(f"lexicon has {len(lex)} items, more than max_items={cfg.max_items}")
        g = self.guard("lexicon")
        for slot in self.lexicon.slots:
            alts = [self._match(slot, it) for it in lex if it.phon == slot.phon]
            self.problem.add(Or(~g, ~slot.used, *alts), "guards")
        return g

    def solve(self, assumptions: Iterable = (), conflict_budget: int | None = None) -> bool | None:
        solver = self.sync()
        lits = [a if isinstance(a, int) else self.problem.literal(a) for a in assumptions]
        return solver.solve(lits, conflict_budget)

    def assert_lexicon(self, lex: Lexicon, conflict_budget: int | None = None) -> bool | None:
        return self.solve([self.lexicon_guard(lex)], conflict_budget)

    # decoding ------------------------------------------------------------
    def decode_lexicon(self, model=None) -> Lexicon:
        model = self.solver.model if model is None else model
        return Lexicon(self.lexicon.item(s, model) for s in self.lexicon.chosen(model))

    def leaf_item(self, inst: ParseInstance, l: int, model) -> LexicalItem:
        k = self.problem.value(inst.choice[l][()], model)
        return self.lexicon.item(inst.options[l][k], model)

    def decode_parse(self, index: int, model=None) -> DerivationTree:
        model = self.solver.model if model is None else model
        inst = self.instances[index]
        p = self.problem
        L, n, F = len(inst.leaves), inst.n, self.config.max_feats
        arg, mv, sidx = inst.tables["arg"], inst.tables["mv"], inst.tables["sidx"]
        items = [self.leaf_item(inst, l, model) for l in range(L)]
        built: dict[int, Node] = {}

        def build(l: int, depth: int = 0) -> Node:
            if depth > L:
                raise EncodingError("cyclic selection in model")
            node: Node = Leaf(items[l], l if l < n else None)
            for j, f in enumerate(items[l].budget_feats):
                if f.kind is Kind.SELECTOR:
                    m = p.value(arg[(l, j)], model)
                    node = Merge(node, build(m, depth + 1))
                elif f.kind is Kind.LICENSOR:
                    x = p.value(mv[(l, j)], model)
                    node = Move(node, built[x])
                else:
                    break
            built[l] = node
            return node

        roots = [l for l in range(L) if p.value(sidx[l], model) == F]
        if len(roots) != 1:
            raise EncodingError(f"model has {len(roots)} roots")
        return DerivationTree(build(roots[0]))

    # objectives ----------------------------------------------------------
    def entry_literals(self) -> list[Formula]:
        return [s.used for s in self.lexicon.slots]

    def lexicon_feature_literals(self) -> list[Formula]:
        return [~s.kind.eq(j, EMPTY) for s in self.lexicon.slots for j in range(self.config.max_feats)]

    def parse_feature_literals(self) -> list[Formula]:
        out = []
        for inst in self.instances:
            kind, comp = inst.tables["kind"], inst.tables["comp"]
            for l in range(len(inst.leaves)):
                out += [~kind.eq((l, j), EMPTY) for j in range(self.config.max_feats)]
                out.append(comp[l].holds)
        return out

    def distinct_selector_literals(self) -> list[Formula]:
        """One fresh literal per selection category, true only if some used item selects it.

        The literals are upper-bounded by the slots that exist now, so build
        them after the last sentence has been added.
        """
        self._objective_batch = getattr(self, "_objective_batch", 0) + 1
        out = []
        for c in self.sel_labels:
            d = self.problem.boolean(f"selects{self._objective_batch}_{category_name(c)}")
            witnesses = [And(s.kind.eq(j, k), s.label.eq(j, c), s.used)
                         for s in self.lexicon.slots for j in range(self.config.max_feats) for k in SELECTORS]
            self.problem.add(Or(~d, *witnesses), "objectives")
            out.append(d)
        return out

    def _match(self, slot: Slot, item: LexicalItem) -> Formula:
        cache = self.__dict__.setdefault("_matches", {})
        key = (slot.index, str(item))
        if key not in cache:
            codes = [self.code(f) for f in item.budget_feats]
            F = self.config.max_feats
            conj = [slot.kind.eq(j, codes[j][0]) if j < len(codes) else slot.kind.eq(j, EMPTY) for j in range(F)]
            conj += [slot.label.eq(j, codes[j][1]) for j in range(len(codes))]
            conj.append(slot.comp if item.has_complete else ~slot.comp)
            cache[key] = And(*conj)
        return cache[key]

    def lexicon_differs(self, lex: Lexicon) -> Formula:
        """True iff the used slots do not spell exactly ``lex`` (needs the usage guard)."""
        alts = []
        for slot in self.lexicon.slots:
            same = [self._match(slot, it) for it in lex if it.phon == slot.phon]
            alts.append(And(slot.used, Not(Or(*same))) if same else slot.used)
        for it in lex:
            holders = [And(sl.used, self._match(sl, it)) for sl in self.lexicon.blocks.get(it.phon, [])]
            alts.append(Not(Or(*holders)))
        return Or(*alts)

    def manifest(self) -> dict:
        cnf = self.problem.cnf
        return {"groups": {g: r for g, r in cnf.groups.items()}, "nvars": cnf.nvars, "nclauses": len(cnf.clauses),
                "sentences": [s.text for s in self.sentences], "disabled": sorted(self.config.disabled)}


def _concat(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a[1] != b[0]:
        return False
    return (a[0], b[1])


def encode_sentence(state: InferenceState, s: AnnotatedSentence) -> InferenceState:
    state.add_sentence(s)
    return state


def encode_corpus(sentences: Iterable[AnnotatedSentence], config: EncoderConfig = EncoderConfig(),
                  seed: int = 0) -> InferenceState:
    state = InferenceState(config, seed)
    for s in sentences:
        state.add_sentence(s)
    return state

"""Command-line entry point: parse, validate, infer, ablate, export.

Exit codes: 0 success, 1 negative answer (no parse, failed validation,
inconsistent corpus), 2 malformed input or usage, 3 self-check failure.
Built-in data is addressed with ``@``: ``@corpus`` for the corpus and
``@a``, ``@b``, ``@b_repaired``, ``@c`` for the published lexicons.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from .config import Config, ConfigError
from .corpus import AnnotatedSentence, CorpusError, load_corpus, parse_corpus, published_lexicon_text, reference_corpus
from .encoder import GROUPS, EncodingError, encode_corpus
from .inference import InconsistentCorpus, ablate, run
from .ir import IRError, export_smtlib
from .mg import Lexicon, LexiconError, parse_lexicon_text, print_lexicon_text
from .parser import extract_relations, parse, relations_satisfied, validate

OK, NEGATIVE, BAD_INPUT, SELF_CHECK = 0, 1, 2, 3


class InputError(Exception):
    pass


# loading ---------------------------------------------------------------

def read_lexicon(ref: str, cfg: Config) -> Lexicon:
    try:
        text = published_lexicon_text(ref[1:]) if ref.startswith("@") else Path(ref).read_text(encoding="utf-8")
    except (OSError, FileNotFoundError) as e:
        raise InputError(f"{ref}: {e.strerror or e}") from None
    try:
        return parse_lexicon_text(text, cfg.categories, cfg.licensing)
    except LexiconError as e:
        raise InputError(f"{ref}: {e}") from None


def read_corpus(ref: str, upto: int | None = None) -> list[AnnotatedSentence]:
    if ref == "@corpus":
        corpus = reference_corpus()
    else:
        try:
            corpus = load_corpus(ref)
        except OSError as e:
            raise InputError(f"{ref}: {e.strerror or e}") from None
        except CorpusError as e:
            raise InputError(f"{ref}: {e}") from None
    if upto is not None:
        if not 1 <= upto <= len(corpus):
            raise InputError(f"--upto must be between 1 and {len(corpus)}")
        corpus = corpus[:upto]
    return corpus


def build_config(args) -> Config:
    cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
    changes = {}
    for f in dataclasses.fields(Config):
        if f.name == "extra":
            continue
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name in ("licensing", "cost"):
            v = tuple(x for x in v.split(",") if x)
        if f.name == "disabled":
            v = tuple(sorted(set(cfg.disabled) | set(v)))
        changes[f.name] = v
    return cfg.replace(**changes)


def add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (defaults in parentheses)")
    g.add_argument("--config", help="JSON file with Config fields; flags override it")
    g.add_argument("--categories", type=int, help="selection categories x0..xK-1 (5)")
    g.add_argument("--licensing", help="comma-separated licensing categories (l,r)")
    g.add_argument("--max-feats", dest="max_feats", type=int, help="features per item, C excluded (3)")
    g.add_argument("--max-phrasal-moves", dest="max_phrasal_moves", type=int, help="per derivation (3)")
    g.add_argument("--max-head-moves", dest="max_head_moves", type=int, help="per derivation (1)")
    g.add_argument("--covert-budget", dest="covert_budget", type=int, help="covert leaves per sentence (1)")
    g.add_argument("--covert-root", dest="covert_root", action="store_const", const=True,
                   help="only covert complementizers may carry C")
    g.add_argument("--max-leaves", dest="max_leaves", type=int, help="leaf budget per sentence (8)")
    g.add_argument("--max-items", dest="max_items", type=int, help="lexicon size ceiling (24)")
    g.add_argument("--relation-mode", dest="relation_mode", choices=["local", "strict"],
                   help="strict: directional arg/agree; local: a merge either way (strict)")
    g.add_argument("--cost", help="comma-separated objectives in priority order "
                                  "(entries,features,distinct_selectors)")
    g.add_argument("--disable", dest="disabled", action="append", metavar="GROUP",
                   help=f"drop an axiom group, optionally GROUP:SENTENCE; one of {', '.join(GROUPS)}")
    g.add_argument("--symmetry-breaking", dest="symmetry_breaking", action="store_const", const=True,
                   help="order selection categories by first use")
    g.add_argument("--samples", type=int, help="optimal lexicons to sample (1)")
    g.add_argument("--conflict-budget", dest="conflict_budget", type=int, help="per solver call (none)")
    g.add_argument("--parse-cap", dest="parse_cap", type=int, help="derivations per sentence (10000)")
    g.add_argument("--seed", type=int, help="solver seed (0)")


def log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# subcommands -----------------------------------------------------------

def cmd_parse(args) -> int:
    cfg = build_config(args)
    lex = read_lexicon(args.lexicon, cfg)
    tokens = args.sentence.lower().split()
    trees = parse(lex, tokens, args.type, cfg.bounds(), cfg.parse_cap)
    if not trees:
        print(f"no parse for {' '.join(tokens)!r}")
        return NEGATIVE
    for k, tree in enumerate(trees, 1):
        rels = extract_relations(tree)
        print(f"# derivation {k}")
        print(tree.render())
        for a, b in sorted(rels.args):
            print(f"arg({tokens[a]}, {tokens[b]})")
        for x, y in sorted(rels.agrees):
            print(f"agree({tokens[x]}, {tokens[y]})")
        print(f"type: {rels.sentence_type}")
        if args.dot:
            path = Path(args.dot) / f"derivation{k}.dot"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(tree.to_dot())
    return OK


def cmd_validate(args) -> int:
    cfg = build_config(args)
    lex = read_lexicon(args.lexicon, cfg)
    corpus = read_corpus(args.corpus, args.upto)
    failed = 0
    for s in corpus:
        ok = validate(lex, s, cfg.bounds(), cfg.mode, not args.no_relations, cfg.parse_cap)
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {s.name or ''} {s.text}".replace("  ", " "))
    print(f"{len(corpus) - failed}/{len(corpus)} validated")
    return OK if not failed else NEGATIVE


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_infer(args) -> int:
    cfg = build_config(args)
    corpus = read_corpus(args.corpus, args.upto)
    out = Path(args.out)
    try:
        result = run(corpus, cfg, log=log if args.verbose else None)
    except InconsistentCorpus as e:
        print(str(e), file=sys.stderr)
        return NEGATIVE
    report = result.report()
    for k, sample in enumerate(result.samples, 1):
        _write(out / f"lexicon{k}.mg", print_lexicon_text(sample.lexicon))
        lines = []
        for s, tree in zip(result.sentences, sample.derivations):
            lines += [f"# {s.name or ''} {s.text}".replace("  ", " "), tree.render(), ""]
            if args.dot:
                _write(out / f"lexicon{k}_{s.name or result.sentences.index(s) + 1}.dot", tree.to_dot())
        _write(out / f"derivations{k}.txt", "\n".join(lines))
    _write(out / "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write(out / "timing.json", json.dumps(result.timing, indent=2, sort_keys=True) + "\n")
    print(json.dumps(report["values"], sort_keys=True))
    # self-check: every emitted lexicon file must validate the corpus again
    for k in range(1, len(result.samples) + 1):
        lex = read_lexicon(str(out / f"lexicon{k}.mg"), cfg)
        bad = [s.text for s in corpus if not validate(lex, s, cfg.bounds(), cfg.mode, cap=cfg.parse_cap)]
        if bad:
            print(f"self-check failed for lexicon{k}.mg on {bad}", file=sys.stderr)
            return SELF_CHECK
    if not result.optimal:
        print("solver budget exhausted: values are not proven optimal", file=sys.stderr)
    return OK


def cmd_ablate(args) -> int:
    cfg = build_config(args)
    corpus = read_corpus(args.corpus, args.upto)
    report = ablate(corpus, args.group, cfg, log=log if args.verbose else None)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_export(args) -> int:
    cfg = build_config(args)
    corpus = read_corpus(args.corpus, args.upto)
    t = time.perf_counter()
    state = encode_corpus(corpus, cfg.encoder(), cfg.seed)
    extra = []
    if args.lexicon:
        g = state.lexicon_guard(read_lexicon(args.lexicon, cfg))
        extra.append(f"(assert {g.table.name})")
    cnf = state.problem.ground()
    out = Path(args.out)
    smt = export_smtlib(state.problem, extra)
    _write(out / "problem.smt2", smt)
    dimacs = cnf.to_dimacs()
    if args.lexicon:
        dimacs = dimacs.replace(f"p cnf {cnf.nvars} {len(cnf.clauses)}",
                                f"p cnf {cnf.nvars} {len(cnf.clauses) + 1}", 1)
        dimacs += f"{state.problem.literal(g)} 0\n"
    _write(out / "problem.cnf", dimacs)
    _write(out / "problem.map.json", cnf.sidecar() + "\n")
    manifest = state.manifest()
    manifest["config"] = cfg.to_dict()
    _write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    log(f"exported {len(corpus)} sentences: {cnf.nvars} vars, {len(cnf.clauses)} clauses, "
        f"{len(smt)} bytes SMT-LIB in {time.perf_counter() - t:.1f}s")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mgsat", description="Minimalist grammar parsing and lexicon inference")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print every derivation of a sentence")
    p.add_argument("lexicon")
    p.add_argument("sentence")
    p.add_argument("--type", choices=["decl", "intr"], help="require this covert complementizer")
    p.add_argument("--dot", metavar="DIR", help="also write one DOT file per derivation")
    add_config_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("validate", help="check a lexicon against an annotated corpus")
    p.add_argument("lexicon")
    p.add_argument("corpus")
    p.add_argument("--upto", type=int, metavar="N", help="only the first N sentences")
    p.add_argument("--no-relations", action="store_true", help="only require some parse")
    add_config_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", help="infer optimal lexicons from a corpus")
    p.add_argument("corpus")
    p.add_argument("--upto", type=int, metavar="N", help="only the first N sentences")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--dot", action="store_true", help="write derivations as DOT too")
    p.add_argument("-v", "--verbose", action="store_true")
    add_config_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("ablate", help="compare optima with one axiom group removed")
    p.add_argument("corpus")
    p.add_argument("--upto", type=int, metavar="N", help="only the first N sentences")
    p.add_argument("--group", required=True, help="GROUP or GROUP:SENTENCE")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("-v", "--verbose", action="store_true")
    add_config_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("export", help="write the encoded state as SMT-LIB2 and DIMACS")
    p.add_argument("corpus")
    p.add_argument("--upto", type=int, metavar="N", help="only the first N sentences")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--lexicon", help="also pin the lexicon model to this lexicon")
    add_config_flags(p)
    p.set_defaults(func=cmd_export)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ConfigError, EncodingError, IRError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

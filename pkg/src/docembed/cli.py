"""Command line front end: ``docembed {stats,embed,eval,bench,weights-plot}``.

Option values come from command-line flags, then an optional ``--config``
file of ``key=value`` lines (keys are flag names without the leading
dashes), then built-in defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .common_component import first_principal_component, remove_common_component, write_component
from .corpus import CorpusStats, TokenizerConfig, build_corpus_stats, doc_term_stats, read_documents, tokenize
from .embedder import EmbeddingForm, build_corpus_center, embed_batch, read_embeddings, write_embeddings, write_skip_report
from .evaluation import UndefinedAUCError, read_pairs, roc_auc, score_pairs, write_scored
from .harness import load_grouped_corpus, parse_variations, run_k_sweep, run_pair_groups
from .vectors import load_vectors, normalize_store
from .weighting import WeightScheme, emit_weight_curves, write_curves_csv

EXIT_ERROR = 1
EXIT_UNDEFINED_AUC = 3

DEFAULTS = {
    "form": "sum",
    "scheme": "idf",
    "a": 1e-4,
    "t": 1e-5,
    "seed": 0,
    "format": "word2vec-text",
    "threads": os.cpu_count() or 1,
    "k": "1",
    "docs_per_group": 250,
    "variations": "table1",
    "split": "non-alphanumeric",
    "min_token_len": 1,
    "no_lowercase": False,
    "pca": False,
    "pca_center": False,
    "idf_scaled": False,
    "oov_in_denominator": False,
    "grid": "logspace:1e-6:1e-1:100",
    "schemes": "idf,sif,subsample",
}

_TYPES = {
    "a": float, "t": float, "seed": int, "threads": int, "docs_per_group": int,
    "pair_budget": int, "min_token_len": int, "center_threshold": float,
}
_FLAGS = {"pca", "pca_center", "idf_scaled", "oov_in_denominator", "no_lowercase"}


class CliError(Exception):
    pass


def _add_common(p):
    p.add_argument("--config", help="key=value file supplying defaults for any flag")
    p.add_argument("--threads", type=int, help="worker threads (default: available cores)")
    p.add_argument("--no-lowercase", action="store_const", const=True, help="keep token case")
    p.add_argument("--split", choices=["non-alphanumeric", "whitespace"], help="token split policy")
    p.add_argument("--min-token-len", type=int, help="drop shorter tokens")


def _add_embedding(p):
    p.add_argument("--vectors", help="word vector file")
    p.add_argument("--format", choices=["word2vec-text", "glove-text"])
    p.add_argument("--stats", help="corpus stats file (computed from --corpus if omitted)")
    p.add_argument("--a", type=float, help="SIF parameter (default 1e-4)")
    p.add_argument("--t", type=float, help="subsampling threshold (default 1e-5)")
    p.add_argument("--idf-scaled", action="store_const", const=True, help="use 0-1 rescaled idf")
    p.add_argument("--pca-center", action="store_const", const=True,
                   help="mean-center before extracting the principal component")
    p.add_argument("--oov-in-denominator", action="store_const", const=True,
                   help="count out-of-vocabulary tokens in the document length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="docembed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="count a corpus and write a stats file")
    _add_common(p)
    p.add_argument("--corpus", help="docs-per-line file or directory of .txt files")
    p.add_argument("--out", help="stats file to write")

    p = sub.add_parser("embed", help="embed the documents of a corpus")
    _add_common(p)
    _add_embedding(p)
    p.add_argument("--corpus", help="docs-per-line file or directory of .txt files")
    p.add_argument("--form", choices=["sum", "center", "delta"])
    p.add_argument("--scheme", choices=["idf", "sif", "subsample", "unit"])
    p.add_argument("--center-threshold", type=float, help="center form: only words with tf_ic above this")
    p.add_argument("--pca", action="store_const", const=True, help="remove the first principal component")
    p.add_argument("--out", help="embeddings file; sidecars <out>.skipped.csv and <out>.pc")

    p = sub.add_parser("eval", help="score labeled pairs and report ROC AUC")
    _add_common(p)
    p.add_argument("--embeddings", help="embeddings file written by 'embed'")
    p.add_argument("--pairs", help="CSV doc_a,doc_b,label")
    p.add_argument("--out", help="scored CSV to write")

    p = sub.add_parser("bench", help="run the variation matrix on a grouped corpus")
    _add_common(p)
    _add_embedding(p)
    p.add_argument("--corpus", help="<group>/<doc>.txt directory or group<TAB>doc<TAB>text TSV")
    p.add_argument("--pairs", help="labeled pairs; rows become groups instead of k")
    p.add_argument("--k", help="reviews per document: '5', '1,2,4' or '1-20'")
    p.add_argument("--docs-per-group", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--pair-budget", type=int)
    p.add_argument("--variations", help="'table1', 'all' or comma list like idf-delta-pca,unit-sum")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("weights-plot", help="weight-function curves as CSV")
    _add_common(p)
    p.add_argument("--stats", help="corpus stats file")
    p.add_argument("--a", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--grid", help="comma list of tf values or logspace:LO:HI:N")
    p.add_argument("--schemes", help="comma list from idf,sif,subsample,unit")
    p.add_argument("--out", help="CSV file (default: standard output)")
    return parser


def _read_config(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key in _FLAGS:
                out[key] = value.lower() in ("1", "true", "yes", "on")
            elif key in _TYPES:
                try:
                    out[key] = _TYPES[key](value)
                except ValueError:
                    raise CliError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
            else:
                out[key] = value
    return out


class Config:
    """Resolved options: flag, then config file, then default."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file = _read_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None):
        value = self._args.get(key)
        if value is not None:
            return value
        if key in self._file:
            return self._file[key]
        return DEFAULTS.get(key, default)

    def path(self, key, must_exist=True) -> Path:
        value = self.get(key)
        if value is None:
            raise CliError(f"--{key.replace('_', '-')} is required")
        p = Path(value)
        if must_exist and not p.exists():
            raise CliError(f"--{key.replace('_', '-')}: no such file or directory: {p}")
        return p

    @property
    def tokenizer(self) -> TokenizerConfig:
        return TokenizerConfig(
            lowercase=not self.get("no_lowercase"),
            split_policy=self.get("split"),
            min_token_len=int(self.get("min_token_len")),
        )

    def scheme(self, kind=None) -> WeightScheme:
        return WeightScheme(
            kind or self.get("scheme"), a=float(self.get("a")), t=float(self.get("t")),
            scaled=bool(self.get("idf_scaled")),
        )


def _load_store(cfg: Config):
    return normalize_store(load_vectors(cfg.path("vectors"), format=cfg.get("format")))


def _info(msg):
    print(msg, file=sys.stderr)


def cmd_stats(cfg: Config) -> int:
    corpus = cfg.path("corpus")
    out = cfg.path("out", must_exist=False)
    tok = cfg.tokenizer
    stats = build_corpus_stats(tokenize(text, tok) for _, text in read_documents(corpus))
    stats.save(out)
    print(f"D={stats.doc_count} N_c={stats.total_tokens} |V|={stats.vocabulary_size}")
    return 0


def cmd_embed(cfg: Config) -> int:
    corpus_path = cfg.path("corpus")
    out = cfg.path("out", must_exist=False)
    store = _load_store(cfg)
    tok = cfg.tokenizer
    docs = [(doc_id, tokenize(text, tok)) for doc_id, text in read_documents(corpus_path)]
    if cfg.get("stats"):
        stats = CorpusStats.load(cfg.path("stats"))
    else:
        stats = build_corpus_stats(tokens for _, tokens in docs)
    oov = bool(cfg.get("oov_in_denominator"))
    doc_stats = [doc_term_stats(tokens, stats, store, doc_id, oov) for doc_id, tokens in docs]
    form = EmbeddingForm(cfg.get("form"), cfg.get("center_threshold"))
    scheme = cfg.scheme()
    center = None
    if form.kind == "center":
        center = build_corpus_center(store, stats, scheme, form.center_threshold)
    batch = embed_batch(doc_stats, form, scheme, store, stats, center, cfg.get("threads"))
    embeddings = batch.embeddings
    if cfg.get("pca"):
        if len(embeddings) < 2:
            raise CliError("--pca needs at least 2 embedded documents")
        pc = first_principal_component([e.vector for e in embeddings], center=bool(cfg.get("pca_center")))
        embeddings = remove_common_component(embeddings, pc)
        with open(f"{out}.pc", "w", encoding="utf-8", newline="\n") as fh:
            write_component(pc, fh)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        write_embeddings(embeddings, fh)
    with open(f"{out}.skipped.csv", "w", encoding="utf-8", newline="\n") as fh:
        write_skip_report(batch.skipped, fh)
    _info(f"embedded {len(embeddings)} documents, skipped {len(batch.skipped)}")
    return 0


def cmd_eval(cfg: Config) -> int:
    embeddings = read_embeddings(cfg.path("embeddings"))
    pairs = read_pairs(cfg.path("pairs"))
    scored = score_pairs(embeddings, pairs)
    if cfg.get("out"):
        with open(cfg.path("out", must_exist=False), "w", encoding="utf-8", newline="\n") as fh:
            write_scored(scored, fh)
    try:
        result = roc_auc(scored)
    except UndefinedAUCError as exc:
        print(f"docembed: undefined AUC: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED_AUC
    print(f"auc: {result.auc:.4f}")
    print(f"positives: {result.positives}")
    print(f"negatives: {result.negatives}")
    print(f"skipped_pairs: {result.skipped_pairs}")
    return 0


def parse_ks(text) -> list[int]:
    ks = []
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            ks.extend(range(int(lo), int(hi) + 1))
        elif part:
            ks.append(int(part))
    if not ks or any(k < 1 for k in ks):
        raise CliError(f"bad --k value {text!r}")
    return ks


def cmd_bench(cfg: Config) -> int:
    corpus = load_grouped_corpus(cfg.path("corpus"))
    out = cfg.path("out", must_exist=False)
    store = _load_store(cfg)
    variations = parse_variations(
        cfg.get("variations"), float(cfg.get("a")), float(cfg.get("t")), bool(cfg.get("idf_scaled"))
    )
    common = dict(
        tokenizer=cfg.tokenizer, threads=int(cfg.get("threads")), pca_center=bool(cfg.get("pca_center"))
    )
    if cfg.get("pairs"):
        table = run_pair_groups(corpus, read_pairs(cfg.path("pairs")), store, variations, **common)
    else:
        stats = CorpusStats.load(cfg.path("stats")) if cfg.get("stats") else None
        table = run_k_sweep(
            corpus, parse_ks(cfg.get("k")), int(cfg.get("docs_per_group")), store, variations,
            corpus_stats=stats, seed=int(cfg.get("seed")), pair_budget=cfg.get("pair_budget"), **common,
        )
    out.mkdir(parents=True, exist_ok=True)
    for name, text in [
        ("results.csv", table.to_csv()),
        ("results.md", table.to_markdown()),
        ("lengths.csv", table.lengths_csv()),
        ("lengths.md", table.lengths_markdown()),
    ]:
        (out / name).write_text(text, encoding="utf-8")
    for (key, col), msg in table.errors().items():
        _info(f"{table.key_name}={key} {col}: {msg}")
    sys.stdout.write(table.to_markdown())
    return 0


def parse_grid(text) -> list[float]:
    text = str(text).strip()
    if not text:
        return []
    if text.startswith("logspace:"):
        _, lo, hi, n = text.split(":")
        return [float(x) for x in np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n))]
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_weights_plot(cfg: Config) -> int:
    stats = CorpusStats.load(cfg.path("stats"))
    schemes = [cfg.scheme(s.strip()) for s in cfg.get("schemes").split(",") if s.strip()]
    rows = emit_weight_curves(stats, schemes, parse_grid(cfg.get("grid")))
    if cfg.get("out"):
        with open(cfg.path("out", must_exist=False), "w", encoding="utf-8", newline="\n") as fh:
            write_curves_csv(rows, fh)
    else:
        write_curves_csv(rows, sys.stdout)
    return 0


COMMANDS = {
    "stats": cmd_stats,
    "embed": cmd_embed,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "weights-plot": cmd_weights_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = Config(args)
        return COMMANDS[args.command](cfg)
    except (CliError, OSError, KeyError, ValueError, RuntimeError) as exc:
        print(f"docembed {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

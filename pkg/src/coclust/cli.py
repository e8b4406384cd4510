"""Command-line interface.

    coclust register --name N --desc D --keywords K
    coclust visit ID
    coclust query "TEXT" [--policy priority|fifo|lru] [--page P] [--json]
    coclust ingest --docs DIR [--weighting tf|tfidf] [--stopwords FILE] [--strict]
    coclust cluster --c C [--tu X] [--tv Y] [--e E] [--seed S] [--max-iters M] [--json]
    coclust trace --out PATH

State lives in ``--data-dir`` (default ``$COCLUST_DATA_DIR`` or ``./.coclust``).
Exit status is 0 on success, 1 on a library error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import store
from .coclustering import FccStfConfig, export_trace, run_fcc_stf
from .corpus import Document, Vocabulary, build_correlation_matrix, load_stopwords
from .errors import CoclustError
from .search_index import FRAME_CAPACITY, ReplacementPolicy


def _emit(out, text=""):
    out.write(text + "\n")


def _describe(entry) -> str:
    link = entry.link
    return f"[{link.id}] {link.name} (visits {link.visit_count}, match {entry.match_level}) - {link.description}"


def render_frames(result) -> str:
    lines = [f"query: {' '.join(result.query_terms)}"]
    for k in range(FRAME_CAPACITY):
        if k < len(result.high_frames):
            lines.append(f"frame {k + 1}: {_describe(result.high_frames[k])}")
        else:
            lines.append(f"frame {k + 1}: (empty)")
    lines.append(f"frame 6 (ZERO priority): {len(result.zero_frame)} page(s)")
    lines.extend(f"  {_describe(e)}" for e in result.zero_frame)
    lines.append(f"total matches: {result.total_matches}")
    return "\n".join(lines)


def cmd_register(args, out):
    path = args.data_dir / store.LINKS_FILE
    index = store.load_or_create_store(path)
    link_id = index.register_link(args.name, args.desc, args.keywords)
    store.save_store(path, index)
    _emit(out, str(link_id))


def cmd_visit(args, out):
    path = args.data_dir / store.LINKS_FILE
    index = store.load_or_create_store(path)
    count = index.record_visit(args.id)
    store.save_store(path, index)
    _emit(out, str(count))


def cmd_query(args, out):
    index = store.load_or_create_store(args.data_dir / store.LINKS_FILE)
    result = index.query(args.text, ReplacementPolicy(args.policy), page=args.page)
    if args.json:
        _emit(out, json.dumps(result.to_dict(), indent=2))
    else:
        _emit(out, render_frames(result))


def cmd_ingest(args, out):
    docs_dir = Path(args.docs)
    if not docs_dir.is_dir():
        raise CoclustError(f"{docs_dir} is not a directory")
    files = sorted(p for p in docs_dir.iterdir() if p.is_file() and p.suffix == ".txt")
    if not files:
        raise CoclustError(f"no .txt documents in {docs_dir}")
    stoplist = load_stopwords(args.stopwords) if args.stopwords else None
    docs = [Document(i, p.read_text("utf-8")) for i, p in enumerate(files)]
    vocab = Vocabulary.from_documents(docs, stoplist)
    if not len(vocab):
        raise CoclustError("documents contain no terms after normalization")
    matrix = build_correlation_matrix(docs, vocab, args.weighting, stoplist, strict=args.strict)
    store.save_matrix(args.data_dir / store.MATRIX_FILE, matrix)
    store.atomic_write(args.data_dir / store.VOCAB_FILE, ("\n".join(vocab.terms) + "\n").encode("utf-8"))
    store.atomic_write(args.data_dir / store.DOCS_FILE, ("\n".join(p.name for p in files) + "\n").encode("utf-8"))
    _emit(out, f"ingested {matrix.n_docs} documents, {matrix.n_terms} terms ({args.weighting})")


def cmd_cluster(args, out):
    matrix = store.load_matrix(args.data_dir / store.MATRIX_FILE)
    config = FccStfConfig(C=args.c, Tu=args.tu, Tv=args.tv, E=args.e, max_iters=args.max_iters, seed=args.seed)
    result = run_fcc_stf(config, matrix)
    store.save_memberships(args.data_dir / store.U_FILE, result.U)
    store.save_memberships(args.data_dir / store.V_FILE, result.V)
    store.atomic_write(args.data_dir / store.TRACE_FILE, export_trace(result))
    summary = result.summary()
    if args.json:
        _emit(out, json.dumps(summary, indent=2))
        return
    status = "converged" if result.converged else "not converged"
    _emit(out, f"{status} after {result.iterations_run} iteration(s)")
    _emit(out, f"J = {summary['J']:.6f}, max |dU| = {summary['max_delta_u']:.3e}")
    _emit(out, f"document memberships: min {result.U.min():.6f}, max {result.U.max():.6f}")
    _emit(out, "document clusters: " + " ".join(str(c) for c in summary["doc_clusters"]))


def cmd_trace(args, out):
    src = args.data_dir / store.TRACE_FILE
    if not src.exists():
        raise CoclustError(f"no trace in {args.data_dir}; run 'cluster' first")
    store.atomic_write(args.out, src.read_bytes())
    _emit(out, f"wrote {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coclust", description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", type=Path, default=None, help="state directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("register", help="register a link")
    p.add_argument("--name", required=True)
    p.add_argument("--desc", required=True)
    p.add_argument("--keywords", required=True, help="comma-separated keywords")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("visit", help="record a visit to a link")
    p.add_argument("id", type=int)
    p.set_defaults(func=cmd_visit)

    p = sub.add_parser("query", help="search registered links")
    p.add_argument("text")
    p.add_argument("--policy", choices=[p.value for p in ReplacementPolicy], default="priority")
    p.add_argument("--page", type=int, default=0, help="offset into high-priority results, in pages of five")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("ingest", help="build the document-term matrix from a directory of .txt files")
    p.add_argument("--docs", required=True)
    p.add_argument("--weighting", choices=["tf", "tfidf"], default="tf")
    p.add_argument("--stopwords", help="stop-word file overriding the built-in list")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("cluster", help="run FCC_STF on the ingested matrix")
    p.add_argument("--c", type=int, required=True, help="number of co-clusters")
    p.add_argument("--tu", type=float, default=1.0)
    p.add_argument("--tv", type=float, default=1.0)
    p.add_argument("--e", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("trace", help="write the last run's (iteration, J, v_cj) CSV")
    p.add_argument("--out", required=True, type=Path)
    p.set_defaults(func=cmd_trace)
    return parser


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.data_dir = store.data_dir(args.data_dir)
    try:
        args.func(args, out)
    except (CoclustError, ValueError, OSError) as exc:
        err.write(f"coclust {args.command}: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

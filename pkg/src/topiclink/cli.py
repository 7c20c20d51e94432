"""Batch entry points wiring the pipeline end to end.

Stages write their artifacts into one bundle directory, so the
expensive steps are reusable: ingest -> hierarchy -> propmatrix -> fit
-> evaluate -> predict/serve. Each stage echoes the fully-resolved
configuration into the bundle manifest and derives its seeds from the
configured base seed, so rerunning with the same inputs reproduces the
bundle checksum exactly.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .config import RunConfig, load_config_file, resolve_config
from .corpus import build_tfidf, load_corpus
from .errors import BundleLockedError, DependencyError, TopicLinkError
from .evaluate import cross_validate, mask_links, rank_candidates, separation_stats
from .hierarchy import build_hierarchy
from .linkmodels import fit_with_config
from .propmatrix import build_property_matrix
from .seeding import derive_seed
from .service import run_service, unknown_cell_predictions
from .store import ModelBundle, SearchQuery, load_bundle, save_bundle, search
from .synth import write_corpus


@contextmanager
def bundle_lock(path):
    """Advisory lock so two invocations cannot write one bundle at once."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    lock_path = path / ".lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise BundleLockedError(
            f"bundle {path} is locked by another invocation ({lock_path})"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock_path.unlink(missing_ok=True)


def _stage_config(args, bundle=None) -> RunConfig:
    """defaults < bundle echo < config file < command-line flags."""
    merged = dict(bundle.config) if bundle is not None and bundle.config else {}
    if getattr(args, "config", None):
        merged.update(load_config_file(args.config))
    overrides = {
        key: getattr(args, key)
        for key in (
            "seed", "k_min", "k_max", "s_min", "d_max", "ensemble_size", "min_df",
            "assoc_min", "coverage_floor", "lmf_lambda", "lmf_epochs", "folds",
            "negative_ratio", "query_top_n", "facet",
        )
        if hasattr(args, key) and getattr(args, key) is not None
    }
    if getattr(args, "candidates", None):
        overrides["candidates"] = tuple(int(k) for k in args.candidates.split(","))
    merged.update(overrides)
    return resolve_config(overrides=merged)


def _require(value, name: str, stage: str):
    if value is None:
        raise DependencyError(f"bundle is missing the {name} artifact; run `{stage}` first")
    return value


def cmd_ingest(args) -> int:
    config = _stage_config(args)
    docs = load_corpus(args.corpus)
    tfidf, vocab = build_tfidf(
        docs, min_df=config.min_df, max_df_fraction=config.max_df_fraction
    )
    bundle = ModelBundle(
        config=config.to_dict(),
        seeds={"base": config.seed},
        documents=docs,
        vocabulary=vocab,
        tfidf=tfidf,
    )
    with bundle_lock(args.out):
        checksum = save_bundle(bundle, args.out)
    nonzero = float((tfidf > 0).mean())
    print(
        f"ingested {len(docs)} documents, {len(vocab)} terms, "
        f"matrix fill {nonzero:.3f}, bundle {checksum[:12]}"
    )
    return 0


def cmd_hierarchy(args) -> int:
    bundle = load_bundle(args.bundle)
    config = _stage_config(args, bundle)
    tfidf = _require(bundle.tfidf, "TF-IDF matrix", "ingest")
    docs = _require(bundle.documents, "corpus", "ingest")
    tree = build_hierarchy(
        tfidf,
        [d.doc_id for d in docs],
        config.hierarchy_config(),
        col_ids=bundle.vocabulary.terms if bundle.vocabulary else None,
    )
    bundle.tree = tree
    bundle.config = config.to_dict()
    with bundle_lock(args.bundle):
        checksum = save_bundle(bundle, args.bundle)
    per_depth = {}
    for node in tree.walk():
        per_depth[node.depth] = per_depth.get(node.depth, 0) + 1
    summary = ", ".join(f"depth {d}: {n}" for d, n in sorted(per_depth.items()))
    print(f"hierarchy with {tree.total_topics} topics ({summary}), bundle {checksum[:12]}")
    return 0


def cmd_propmatrix(args) -> int:
    bundle = load_bundle(args.bundle)
    config = _stage_config(args, bundle)
    tree = _require(bundle.tree, "topic tree", "hierarchy")
    docs = _require(bundle.documents, "corpus", "ingest")
    pm = build_property_matrix(
        tree,
        docs,
        material_facet=config.facet,
        assoc_min=config.assoc_min,
        coverage_floor=config.coverage_floor,
    )
    bundle.propmatrix = pm
    bundle.config = config.to_dict()
    with bundle_lock(args.bundle):
        checksum = save_bundle(bundle, args.bundle)
    print(
        f"property matrix {pm.inner.rows}x{pm.inner.cols}, density {pm.density():.3f}, "
        f"unknown {pm.unknown_fraction():.3f}, bundle {checksum[:12]}"
    )
    return 0


def cmd_fit(args) -> int:
    bundle = load_bundle(args.bundle)
    config = _stage_config(args, bundle)
    pm = _require(bundle.propmatrix, "property matrix", "propmatrix")
    model = fit_with_config(pm.inner, config.ensemble_config(), derive_seed(config.seed, "fit"))
    bundle.ensemble = model
    bundle.config = config.to_dict()
    with bundle_lock(args.bundle):
        checksum = save_bundle(bundle, args.bundle)
    print(
        f"ensemble rank {model.rank}, hamming error {model.bnmfk.hamming_error}, "
        f"thresholds ({model.bnmfk.threshold_w}, {model.bnmfk.threshold_h}), "
        f"bundle {checksum[:12]}"
    )
    return 0


def _query_rows(bundle, query: str, top_n: int):
    nodes, _ = search(SearchQuery(tokens=(query,), top_n=top_n), bundle)
    return [n.path_id for n in nodes]


def cmd_evaluate(args) -> int:
    bundle = load_bundle(args.bundle)
    config = _stage_config(args, bundle)
    pm = _require(bundle.propmatrix, "property matrix", "propmatrix")
    _require(bundle.tree, "topic tree", "hierarchy")

    target_rows = _query_rows(bundle, args.target_query, config.query_top_n)
    if not target_rows:
        raise DependencyError(
            f"token query {args.target_query!r} matches no topic; try another query"
        )
    if args.target_materials:
        target_cols = args.target_materials.split(",")
    else:
        row_idx = [pm.inner.row_index(r) for r in target_rows]
        target_cols = [
            m
            for j, m in enumerate(pm.materials)
            if (pm.inner.cells[row_idx, j] == 1).any()
        ]
    ens = config.ensemble_config()
    report = cross_validate(
        pm.inner,
        target_cols,
        ens,
        folds=config.folds,
        seed=config.seed,
        target_rows=target_rows,
        negative_ratio=config.negative_ratio,
    )
    fold_seed = derive_seed(config.seed, "fold", 0)
    masked, spec = mask_links(
        pm.inner, target_cols, fold_seed, target_rows=target_rows,
        negative_ratio=config.negative_ratio,
    )
    model = fit_with_config(masked, ens, fold_seed)
    stats = separation_stats(model.scores, spec)
    held_out = args.held_out.split(",") if args.held_out else list(target_cols)
    ranking = rank_candidates(
        pm.inner, held_out, target_rows, ens, derive_seed(config.seed, "ranking")
    )

    bundle.eval_report = report
    bundle.separation = stats
    bundle.ranking = ranking
    bundle.config = config.to_dict()
    bundle.extra["evaluation"] = {
        "target_query": args.target_query,
        "target_rows": target_rows,
        "target_materials": list(target_cols),
        "held_out": held_out,
    }
    with bundle_lock(args.bundle):
        checksum = save_bundle(bundle, args.bundle)
    hits = " ".join(
        f"hit@{k}={report.hit_at[k]:.3f} ci=({report.ci95[k][0]:.3f},{report.ci95[k][1]:.3f})"
        for k in sorted(report.hit_at)
    )
    gap = stats.positive_quartiles[1] - stats.negative_quartiles[1]
    print(f"{hits} median-gap={gap:.3f} over {len(target_rows)} topics x "
          f"{len(target_cols)} materials, bundle {checksum[:12]}")
    return 0


def cmd_predict(args) -> int:
    bundle = load_bundle(args.bundle)
    _require(bundle.propmatrix, "property matrix", "propmatrix")
    _require(bundle.ensemble, "fitted ensemble", "fit")
    rows = unknown_cell_predictions(bundle, args.top)
    print("topic\tmaterial\tscore\tsupport")
    for row in rows:
        print(f"{row['topic']}\t{row['material']}\t{row['score']:.4f}\t{row['provenance']}")
    return 0


def cmd_serve(args) -> int:
    bundle = load_bundle(args.bundle)
    origins = args.cors.split(",") if args.cors else None
    print(f"serving bundle {args.bundle} on {args.host}:{args.port}")
    run_service(bundle, host=args.host, port=args.port, cors_origins=origins)
    return 0


def cmd_synth(args) -> int:
    docs, truth = write_corpus(args.preset, args.out, seed=args.seed)
    print(
        f"wrote {len(docs)} documents to {args.out} "
        f"(truth sidecar {args.out}.truth.json)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topiclink",
        description="hierarchical topic modeling and topic-material link prediction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p, keys):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int)
        for key in keys:
            flag = "--" + key.replace("_", "-")
            if key in ("noise", "negative_ratio", "lmf_lambda", "max_df_fraction"):
                p.add_argument(flag, dest=key, type=float)
            elif key in ("facet", "candidates"):
                p.add_argument(flag, dest=key)
            else:
                p.add_argument(flag, dest=key, type=int)

    p = sub.add_parser("ingest", help="build the TF-IDF matrix from a corpus file")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="bundle directory")
    add_config_flags(p, ["min_df", "max_df_fraction"])
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("hierarchy", help="build the topic tree")
    p.add_argument("bundle")
    add_config_flags(p, ["k_min", "k_max", "s_min", "d_max", "ensemble_size"])
    p.set_defaults(handler=cmd_hierarchy)

    p = sub.add_parser("propmatrix", help="build the topic-material matrix")
    p.add_argument("bundle")
    add_config_flags(p, ["facet", "assoc_min", "coverage_floor"])
    p.set_defaults(handler=cmd_propmatrix)

    p = sub.add_parser("fit", help="fit the Boolean + logistic ensemble")
    p.add_argument("bundle")
    add_config_flags(p, ["candidates", "lmf_lambda", "lmf_epochs"])
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("evaluate", help="masked-link evaluation")
    p.add_argument("bundle")
    p.add_argument("--target-query", required=True)
    p.add_argument("--target-materials", help="comma-separated; default: auto-detect")
    p.add_argument("--held-out", help="comma-separated materials for the ranking table")
    add_config_flags(p, ["folds", "negative_ratio", "query_top_n", "candidates",
                         "lmf_lambda", "lmf_epochs"])
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("predict", help="top unknown-cell predictions")
    p.add_argument("bundle")
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("serve", help="start the read-only HTTP service")
    p.add_argument("bundle", nargs="?", default=os.environ.get("TOPICLINK_BUNDLE"))
    p.add_argument("--host", default=os.environ.get("TOPICLINK_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("TOPICLINK_PORT", "8000")))
    p.add_argument("--cors", default=os.environ.get("TOPICLINK_CORS"))
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("synth", help="generate a synthetic preset corpus")
    p.add_argument("--preset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except TopicLinkError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

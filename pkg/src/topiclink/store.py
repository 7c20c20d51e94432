"""Bundle persistence and token/facet search over a fitted bundle.

A bundle is a directory of staged artifacts (corpus, TF-IDF matrix,
topic tree, property matrix, ensemble model, evaluation reports) plus a
manifest recording the schema version, the fully-resolved configuration,
the seeds, and a checksum per artifact. The bundle checksum covers every
artifact's payload bytes, so two pipeline runs with identical config and
seeds produce identical checksums (the manifest's creation timestamp is
deliberately outside the checksum).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .corpus import Document, Vocabulary, load_corpus, save_corpus, tokenize
from .errors import ArgumentError, ChecksumError, SchemaError
from .evaluate import EvalReport, RankingTable, SeparationStats
from .hierarchy import StopReason, TopicNode, TopicTree
from .linkmodels import BNMFkModel, EnsembleModel
from .propmatrix import MaterialsPropertyMatrix, from_table_text, to_table_text

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


@dataclass
class ModelBundle:
    """All pipeline artifacts for one corpus, staged; later stages are
    None until their pipeline step has run."""

    config: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    created_at: str = ""
    documents: list = None
    vocabulary: Vocabulary = None
    tfidf: np.ndarray = None
    tree: TopicTree = None
    propmatrix: MaterialsPropertyMatrix = None
    ensemble: EnsembleModel = None
    eval_report: EvalReport = None
    separation: SeparationStats = None
    ranking: RankingTable = None
    extra: dict = field(default_factory=dict)


def _node_to_dict(node: TopicNode) -> dict:
    return {
        "path_id": node.path_id,
        "depth": node.depth,
        "member_ids": list(node.member_ids),
        "local_rank": node.local_rank,
        "top_tokens": [[t, w] for t, w in node.top_tokens],
        "stop_reason": node.stop_reason.value,
        "zero_row_ids": list(node.zero_row_ids),
        "children": [_node_to_dict(c) for c in node.children],
    }


def _node_from_dict(data: dict) -> TopicNode:
    return TopicNode(
        path_id=data["path_id"],
        depth=int(data["depth"]),
        member_ids=tuple(data["member_ids"]),
        local_rank=int(data["local_rank"]),
        top_tokens=tuple((t, float(w)) for t, w in data["top_tokens"]),
        stop_reason=StopReason(data["stop_reason"]),
        zero_row_ids=tuple(data["zero_row_ids"]),
        children=[_node_from_dict(c) for c in data["children"]],
    )


def tree_to_dict(tree: TopicTree) -> dict:
    return {"root": _node_to_dict(tree.root)}


def tree_from_dict(data: dict) -> TopicTree:
    root = _node_from_dict(data["root"])
    index = {}
    stack = [root]
    while stack:
        node = stack.pop()
        index[node.path_id] = node
        stack.extend(node.children)
    return TopicTree(root=root, node_index=index)


def ensemble_to_dict(model: EnsembleModel) -> dict:
    return {
        "rank": model.bnmfk.rank,
        "threshold_w": model.bnmfk.threshold_w,
        "threshold_h": model.bnmfk.threshold_h,
        "hamming_error": model.bnmfk.hamming_error,
        "W_bool": model.bnmfk.W_bool.tolist(),
        "H_bool": model.bnmfk.H_bool.tolist(),
        "b_r": model.b_r.tolist(),
        "b_c": model.b_c.tolist(),
        "scores": model.scores.tolist(),
    }


def ensemble_from_dict(data: dict) -> EnsembleModel:
    bnmfk = BNMFkModel(
        W_bool=np.asarray(data["W_bool"], dtype=np.uint8),
        H_bool=np.asarray(data["H_bool"], dtype=np.uint8),
        rank=int(data["rank"]),
        threshold_w=float(data["threshold_w"]),
        threshold_h=float(data["threshold_h"]),
        hamming_error=int(data["hamming_error"]),
    )
    return EnsembleModel(
        bnmfk=bnmfk,
        b_r=np.asarray(data["b_r"], dtype=np.float64),
        b_c=np.asarray(data["b_c"], dtype=np.float64),
        scores=np.asarray(data["scores"], dtype=np.float64),
    )


def _dump_json(data) -> bytes:
    return (json.dumps(data, sort_keys=True, indent=1) + "\n").encode("utf-8")


def _sha256(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def _array_bytes(arr: np.ndarray) -> bytes:
    import io

    buf = io.BytesIO()
    np.save(buf, np.ascontiguousarray(arr))
    return buf.getvalue()


def save_bundle(bundle: ModelBundle, path) -> str:
    """Write the bundle directory; returns the bundle checksum."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)

    artifacts = {}

    def put(name: str, payload: bytes):
        (path / name).write_bytes(payload)
        artifacts[name] = {"sha256": _sha256(payload), "bytes": len(payload)}

    if bundle.documents is not None:
        save_corpus(bundle.documents, path / "documents.jsonl")
        payload = (path / "documents.jsonl").read_bytes()
        artifacts["documents.jsonl"] = {"sha256": _sha256(payload), "bytes": len(payload)}
    if bundle.vocabulary is not None:
        put(
            "vocabulary.json",
            _dump_json(
                {
                    "terms": list(bundle.vocabulary.terms),
                    "document_frequency": bundle.vocabulary.document_frequency,
                }
            ),
        )
    if bundle.tfidf is not None:
        put("tfidf.npy", _array_bytes(bundle.tfidf))
    if bundle.tree is not None:
        put("tree.json", _dump_json(tree_to_dict(bundle.tree)))
    if bundle.propmatrix is not None:
        put("propmatrix.tsv", to_table_text(bundle.propmatrix).encode("utf-8"))
        put("provenance.json", _dump_json(bundle.propmatrix.provenance.tolist()))
    if bundle.ensemble is not None:
        put("ensemble.json", _dump_json(ensemble_to_dict(bundle.ensemble)))
    eval_payload = {}
    if bundle.eval_report is not None:
        eval_payload["report"] = bundle.eval_report.to_dict()
    if bundle.separation is not None:
        eval_payload["separation"] = bundle.separation.to_dict()
    if bundle.ranking is not None:
        eval_payload["ranking"] = bundle.ranking.to_dict()
    if eval_payload:
        put("eval.json", _dump_json(eval_payload))
        from .evaluate import plot_data_text

        put(
            "eval_plotdata.tsv",
            plot_data_text(
                bundle.eval_report, bundle.separation, bundle.ranking
            ).encode("utf-8"),
        )

    checksum = _sha256(
        "\n".join(f"{name}:{artifacts[name]['sha256']}" for name in sorted(artifacts)).encode()
    )
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "created_at": bundle.created_at or datetime.now(timezone.utc).isoformat(),
        "config": bundle.config,
        "seeds": bundle.seeds,
        "artifacts": artifacts,
        "bundle_checksum": checksum,
        "extra": bundle.extra,
    }
    (path / MANIFEST_NAME).write_bytes(_dump_json(manifest))
    return checksum


def load_bundle(path) -> ModelBundle:
    """Read a bundle directory, verifying schema and checksums."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.exists():
        raise ArgumentError(f"{path} is not a bundle (no {MANIFEST_NAME})")
    manifest = json.loads(manifest_path.read_text())
    version = manifest.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported bundle schema version {version!r}")

    def read(name: str) -> bytes:
        payload = (path / name).read_bytes() if (path / name).exists() else None
        if payload is None:
            raise ChecksumError(f"artifact {name} listed in manifest but missing")
        expected = manifest["artifacts"][name]["sha256"]
        if _sha256(payload) != expected:
            raise ChecksumError(f"artifact {name} does not match its checksum")
        return payload

    bundle = ModelBundle(
        config=manifest.get("config", {}),
        seeds=manifest.get("seeds", {}),
        created_at=manifest.get("created_at", ""),
        extra=manifest.get("extra", {}),
    )
    names = set(manifest.get("artifacts", {}))
    if "documents.jsonl" in names:
        read("documents.jsonl")
        bundle.documents = load_corpus(path / "documents.jsonl")
    if "vocabulary.json" in names:
        data = json.loads(read("vocabulary.json"))
        bundle.vocabulary = Vocabulary(
            terms=tuple(data["terms"]),
            document_frequency={k: int(v) for k, v in data["document_frequency"].items()},
        )
    if "tfidf.npy" in names:
        import io

        bundle.tfidf = np.load(io.BytesIO(read("tfidf.npy")))
    if "tree.json" in names:
        bundle.tree = tree_from_dict(json.loads(read("tree.json")))
    if "propmatrix.tsv" in names:
        provenance = None
        if "provenance.json" in names:
            provenance = np.asarray(json.loads(read("provenance.json")), dtype=np.int64)
        bundle.propmatrix = from_table_text(
            read("propmatrix.tsv").decode("utf-8"), provenance=provenance
        )
    if "ensemble.json" in names:
        bundle.ensemble = ensemble_from_dict(json.loads(read("ensemble.json")))
    if "eval.json" in names:
        data = json.loads(read("eval.json"))
        if "report" in data:
            bundle.eval_report = EvalReport.from_dict(data["report"])
        if "separation" in data:
            bundle.separation = SeparationStats.from_dict(data["separation"])
        if "ranking" in data:
            bundle.ranking = RankingTable.from_dict(data["ranking"])
    return bundle


@dataclass(frozen=True)
class SearchQuery:
    """Sidebar-style query: free tokens, and/or logic, facet filters,
    and an optional cluster selection that scopes the results."""

    tokens: tuple = ()
    mode: str = "keywords"  # or "denovo"
    logic: str = "or"  # or "and"
    top_n: int = None  # how many ranked tokens per node to consider
    facet_filters: dict = field(default_factory=dict)
    selected_clusters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(t.lower() for t in self.tokens))
        object.__setattr__(self, "selected_clusters", tuple(self.selected_clusters))
        object.__setattr__(
            self, "facet_filters", {k: tuple(v) for k, v in dict(self.facet_filters).items()}
        )
        if self.mode not in ("keywords", "denovo"):
            raise ArgumentError(f"unknown search mode {self.mode!r}")
        if self.logic not in ("and", "or"):
            raise ArgumentError(f"unknown logic {self.logic!r}")
        if not (self.tokens or self.facet_filters or self.selected_clusters):
            raise ArgumentError(
                "query needs at least one of tokens, facet_filters, selected_clusters"
            )


def _combine(matches, logic: str) -> bool:
    return all(matches) if logic == "and" else any(matches)


def search(query: SearchQuery, bundle: ModelBundle):
    """Resolve a query against the bundle's tree and documents.

    Keywords mode prefix-matches the query tokens against each node's
    ranked tokens (limited to the query's top_n); denovo matches against
    raw document text. Facet filters and cluster selections intersect
    the result. Returns (matching nodes, matching documents).
    """
    if bundle.tree is None:
        raise ArgumentError("bundle has no topic tree to search")
    docs = bundle.documents or []
    known_facets = {f for doc in docs for f in doc.attributes}
    for facet in query.facet_filters:
        if facet not in known_facets:
            raise ArgumentError(f"unknown facet {facet!r}")

    scope = None
    if query.selected_clusters:
        scope = set()
        for path_id in query.selected_clusters:
            node = bundle.tree.node(path_id)
            stack = [node]
            while stack:
                current = stack.pop()
                scope.add(current.path_id)
                stack.extend(current.children)

    def node_tokens(node):
        tokens = node.top_tokens
        if query.top_n is not None:
            tokens = tokens[: query.top_n]
        return [t for t, _ in tokens]

    def doc_passes_facets(doc):
        return all(
            any(v in doc.facet_values(facet) for v in values)
            for facet, values in query.facet_filters.items()
        )

    by_id = {doc.doc_id: doc for doc in docs}

    if query.mode == "keywords" or not query.tokens:
        if query.tokens:
            nodes = [
                node
                for node in bundle.tree.walk()
                if _combine(
                    (
                        any(t.startswith(q) for t in node_tokens(node))
                        for q in query.tokens
                    ),
                    query.logic,
                )
            ]
        else:
            nodes = list(bundle.tree.walk())
        if scope is not None:
            nodes = [n for n in nodes if n.path_id in scope]
        member_ids = sorted({m for n in nodes for m in n.member_ids})
        matched_docs = [
            by_id[m] for m in member_ids if m in by_id and doc_passes_facets(by_id[m])
        ]
    else:
        matched_docs = []
        matched_ids = set()
        for doc in docs:
            words = tokenize(doc.text)
            if _combine(
                (any(w.startswith(q) for w in words) for q in query.tokens), query.logic
            ) and doc_passes_facets(doc):
                matched_docs.append(doc)
                matched_ids.add(doc.doc_id)
        nodes = [
            node
            for node in bundle.tree.walk()
            if (scope is None or node.path_id in scope)
            and matched_ids.intersection(node.member_ids)
        ]

    return nodes, matched_docs

"""Read-only JSON-over-HTTP service over one loaded bundle.

The service exposes the topic hierarchy, per-node details and facet
distributions, token/facet search, top unknown-cell predictions, and
the stored evaluation reports. The bundle is immutable after load, so
concurrent reads are safe and every request sequence is equivalent to
any reordering.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import ArgumentError
from .hierarchy import TopicNode
from .masked import UNKNOWN
from .propmatrix import facet_distribution
from .store import ModelBundle, SearchQuery, search


class SearchPayload(BaseModel):
    tokens: list[str] = Field(default_factory=list)
    mode: str = "keywords"
    logic: str = "or"
    top_n: int | None = None
    facet_filters: dict[str, list[str]] = Field(default_factory=dict)
    selected_clusters: list[str] = Field(default_factory=list)


def _not_found(detail: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"error": "not_found", "detail": detail})


def _bad_request(detail, fields=None) -> JSONResponse:
    body = {"error": "bad_request", "detail": detail}
    if fields:
        body["fields"] = fields
    return JSONResponse(status_code=400, content=body)


def _node_summary(node: TopicNode) -> dict:
    return {
        "path_id": node.path_id,
        "depth": node.depth,
        "size": node.size,
        "stop_reason": node.stop_reason.value,
        "children": [_node_summary(c) for c in node.children],
    }


def _doc_payload(doc) -> dict:
    return {
        "id": doc.doc_id,
        "title": doc.title,
        "abstract": doc.abstract,
        "attributes": {k: list(v) for k, v in doc.attributes.items()},
    }


def unknown_cell_predictions(bundle: ModelBundle, top: int, status: str = "unknown"):
    """Top-scoring cells as (topic, material, score, provenance) rows."""
    pm = bundle.propmatrix
    model = bundle.ensemble
    rows = []
    for i, topic in enumerate(pm.topic_ids):
        for j, material in enumerate(pm.materials):
            if status == "unknown" and pm.inner.cells[i, j] != UNKNOWN:
                continue
            rows.append(
                {
                    "topic": topic,
                    "material": material,
                    "score": float(model.scores[i, j]),
                    "provenance": int(pm.provenance[i, j]),
                }
            )
    rows.sort(key=lambda r: (-r["score"], r["topic"], r["material"]))
    return rows[:top]


def create_app(bundle: ModelBundle, cors_origins=None) -> FastAPI:
    app = FastAPI(title="topiclink explorer API", docs_url=None, redoc_url=None)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        fields = [
            {"loc": [str(p) for p in err.get("loc", ())], "msg": err.get("msg", "")}
            for err in exc.errors()
        ]
        return _bad_request("malformed request", fields)

    @app.exception_handler(ArgumentError)
    async def argument_handler(request: Request, exc: ArgumentError):
        return _bad_request(str(exc))

    docs_by_id = {doc.doc_id: doc for doc in (bundle.documents or [])}
    facets = sorted({f for doc in docs_by_id.values() for f in doc.attributes})

    def get_node(path_id: str):
        if bundle.tree is None or path_id not in bundle.tree.node_index:
            return None
        return bundle.tree.node_index[path_id]

    @app.get("/api/meta")
    def meta():
        return {
            "n_documents": len(docs_by_id),
            "n_topics": bundle.tree.total_topics if bundle.tree else 0,
            "facets": facets,
            "materials": list(bundle.propmatrix.materials) if bundle.propmatrix else [],
            "has_predictions": bundle.ensemble is not None and bundle.propmatrix is not None,
            "has_eval": bundle.eval_report is not None,
            "config": bundle.config,
        }

    @app.get("/api/tree")
    def tree():
        if bundle.tree is None:
            return _not_found("bundle has no topic tree")
        return {"root": _node_summary(bundle.tree.root), "total_topics": bundle.tree.total_topics}

    @app.get("/api/node/{path_id}")
    def node_detail(path_id: str):
        node = get_node(path_id)
        if node is None:
            return _not_found(f"unknown node path_id {path_id!r}")
        return {
            "path_id": node.path_id,
            "depth": node.depth,
            "size": node.size,
            "local_rank": node.local_rank,
            "stop_reason": node.stop_reason.value,
            "top_tokens": [{"token": t, "weight": w} for t, w in node.top_tokens],
            "children": [c.path_id for c in node.children],
        }

    @app.get("/api/node/{path_id}/documents")
    def node_documents(path_id: str, offset: int = 0, limit: int = 20):
        node = get_node(path_id)
        if node is None:
            return _not_found(f"unknown node path_id {path_id!r}")
        if offset < 0 or limit < 1:
            return _bad_request("offset must be >= 0 and limit >= 1")
        members = list(node.member_ids)
        page = [
            _doc_payload(docs_by_id[m]) for m in members[offset : offset + limit]
            if m in docs_by_id
        ]
        return {"total": len(members), "offset": offset, "limit": limit, "documents": page}

    @app.get("/api/node/{path_id}/facets/{facet}")
    def node_facets(path_id: str, facet: str):
        node = get_node(path_id)
        if node is None:
            return _not_found(f"unknown node path_id {path_id!r}")
        if facet not in facets:
            return _bad_request(f"unknown facet {facet!r}")
        values = facet_distribution(node, docs_by_id.values(), facet)
        return {
            "facet": facet,
            "values": [
                {"value": v, "count": c, "percentage": p} for v, c, p in values
            ],
        }

    @app.post("/api/search")
    def run_search(payload: SearchPayload):
        query = SearchQuery(
            tokens=tuple(payload.tokens),
            mode=payload.mode,
            logic=payload.logic,
            top_n=payload.top_n,
            facet_filters=payload.facet_filters,
            selected_clusters=tuple(payload.selected_clusters),
        )
        nodes, docs = search(query, bundle)
        return {
            "nodes": [
                {"path_id": n.path_id, "depth": n.depth, "size": n.size}
                for n in nodes
            ],
            "documents": [_doc_payload(d) for d in docs],
        }

    @app.get("/api/predictions")
    def predictions(top: int = 20, status: str = "unknown"):
        if bundle.ensemble is None or bundle.propmatrix is None:
            return _not_found("bundle has no fitted ensemble")
        if top < 1:
            return _bad_request("top must be >= 1")
        if status not in ("unknown", "all"):
            return _bad_request(f"unknown status filter {status!r}")
        return {"predictions": unknown_cell_predictions(bundle, top, status)}

    @app.get("/api/eval")
    def evaluation():
        if bundle.eval_report is None and bundle.separation is None:
            return _not_found("bundle has no evaluation report")
        payload = {}
        if bundle.eval_report is not None:
            payload["report"] = bundle.eval_report.to_dict()
        if bundle.separation is not None:
            payload["separation"] = bundle.separation.to_dict()
        if bundle.ranking is not None:
            payload["ranking"] = bundle.ranking.to_dict()
        return payload

    return app


def run_service(bundle: ModelBundle, host: str = "127.0.0.1", port: int = 8000,
                cors_origins=None):
    import uvicorn

    app = create_app(bundle, cors_origins=cors_origins)
    uvicorn.run(app, host=host, port=port, log_level="warning")

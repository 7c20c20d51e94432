"""The topic-by-material association matrix and facet statistics.

A cell is "one" when enough member documents of the topic carry the
material tag, "zero" when none do despite the topic being well covered
by tagged documents, and "unknown" otherwise. Per-cell supporting
document counts are kept as provenance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DataError
from .hierarchy import TopicNode, TopicTree
from .masked import ONE, UNKNOWN, ZERO, MaskedBinaryMatrix

NA_TOKEN = "NA"


@dataclass(frozen=True)
class MaterialsPropertyMatrix:
    """Masked topic-by-material matrix plus supporting-count provenance."""

    inner: MaskedBinaryMatrix
    provenance: np.ndarray

    def __post_init__(self):
        if self.provenance.shape != self.inner.shape:
            raise ArgumentError("provenance shape must match the matrix")

    @property
    def topic_ids(self) -> tuple:
        return self.inner.row_labels

    @property
    def materials(self) -> tuple:
        return self.inner.col_labels

    def density(self) -> float:
        return float((self.inner.cells == ONE).mean())

    def unknown_fraction(self) -> float:
        return float((self.inner.cells == UNKNOWN).mean())


def build_property_matrix(
    tree: TopicTree,
    docs,
    material_facet: str = "material",
    assoc_min: int = 2,
    coverage_floor: int = 5,
) -> MaterialsPropertyMatrix:
    """Derive the association matrix from a topic tree and tagged docs.

    Rows cover every tree node in depth-first pre-order; columns are all
    distinct facet values in the corpus, sorted. For topic t and
    material m with support count c (member docs of t tagged m):
    one if c >= assoc_min; zero if c == 0 and t has at least
    coverage_floor members carrying any material tag; unknown otherwise.
    """
    if assoc_min < 1:
        raise ArgumentError("assoc_min must be >= 1")
    if coverage_floor < 1:
        raise ArgumentError("coverage_floor must be >= 1")
    by_id = {doc.doc_id: doc for doc in docs}

    materials = sorted({v for doc in by_id.values() for v in doc.facet_values(material_facet)})
    if not materials:
        raise DataError(f"facet {material_facet!r} is absent from every document")
    col_idx = {m: j for j, m in enumerate(materials)}

    nodes = list(tree.walk())
    cells = np.full((len(nodes), len(materials)), UNKNOWN, dtype=np.int8)
    counts = np.zeros((len(nodes), len(materials)), dtype=np.int64)

    for i, node in enumerate(nodes):
        tagged = 0
        for doc_id in node.member_ids:
            doc = by_id.get(doc_id)
            if doc is None:
                raise ArgumentError(f"tree member {doc_id!r} is not in the corpus")
            values = doc.facet_values(material_facet)
            if values:
                tagged += 1
            for value in set(values):
                counts[i, col_idx[value]] += 1
        for j in range(len(materials)):
            if counts[i, j] >= assoc_min:
                cells[i, j] = ONE
            elif counts[i, j] == 0 and tagged >= coverage_floor:
                cells[i, j] = ZERO

    inner = MaskedBinaryMatrix(
        cells,
        row_labels=tuple(n.path_id for n in nodes),
        col_labels=tuple(materials),
    )
    return MaterialsPropertyMatrix(inner=inner, provenance=counts)


def facet_distribution(node: TopicNode, docs, facet: str):
    """(value, count, percentage) triples for a facet over a node's
    members, sorted by count descending then value ascending.

    Each document contributes one count per distinct value it carries;
    percentages are over the total counted values.
    """
    by_id = {doc.doc_id: doc for doc in docs}
    counts = {}
    for doc_id in node.member_ids:
        doc = by_id.get(doc_id)
        if doc is None:
            continue
        for value in set(doc.facet_values(facet)):
            counts[value] = counts.get(value, 0) + 1
    total = sum(counts.values())
    if total == 0:
        return []
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(value, count, 100.0 * count / total) for value, count in ordered]


def to_table_text(matrix: MaterialsPropertyMatrix) -> str:
    """Tabular export: header row of material labels, first column the
    topic path_id, cells in {0, 1, NA}."""
    lines = ["\t".join(["path_id", *matrix.materials])]
    symbol = {ONE: "1", ZERO: "0", UNKNOWN: NA_TOKEN}
    for i, topic in enumerate(matrix.topic_ids):
        row = [symbol[int(c)] for c in matrix.inner.cells[i]]
        lines.append("\t".join([topic, *row]))
    return "\n".join(lines) + "\n"


def from_table_text(text: str, provenance=None) -> MaterialsPropertyMatrix:
    """Inverse of :func:`to_table_text`; provenance defaults to zeros."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ArgumentError("empty property-matrix table")
    header = lines[0].split("\t")
    if header[0] != "path_id":
        raise ArgumentError("property-matrix table must start with a path_id column")
    materials = tuple(header[1:])
    value = {"1": ONE, "0": ZERO, NA_TOKEN: UNKNOWN}
    topics = []
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(materials) + 1:
            raise ArgumentError(f"line {line_no}: expected {len(materials) + 1} columns")
        topics.append(parts[0])
        try:
            rows.append([value[p] for p in parts[1:]])
        except KeyError as exc:
            raise ArgumentError(f"line {line_no}: bad cell value {exc.args[0]!r}") from None
    cells = np.array(rows, dtype=np.int8)
    if provenance is None:
        provenance = np.zeros(cells.shape, dtype=np.int64)
    inner = MaskedBinaryMatrix(cells, row_labels=tuple(topics), col_labels=materials)
    return MaterialsPropertyMatrix(inner=inner, provenance=np.asarray(provenance))

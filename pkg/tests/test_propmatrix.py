import numpy as np
import pytest

from topiclink.corpus import Document
from topiclink.errors import ArgumentError, DataError
from topiclink.hierarchy import StopReason, TopicNode, TopicTree
from topiclink.masked import ONE, UNKNOWN, ZERO
from topiclink.propmatrix import (
    build_property_matrix,
    facet_distribution,
    from_table_text,
    to_table_text,
)


def doc(doc_id, materials=(), country=None):
    attrs = {}
    materials = tuple(materials)
    if materials:
        attrs["material"] = materials
    if country:
        attrs["country"] = (country,)
    return Document(doc_id=doc_id, title=f"title {doc_id}", abstract="", attributes=attrs)


def two_leaf_tree(leaf0_ids, leaf1_ids):
    leaf0 = TopicNode("0", 1, tuple(leaf0_ids), 1, (), StopReason.RANK_ONE)
    leaf1 = TopicNode("1", 1, tuple(leaf1_ids), 1, (), StopReason.RANK_ONE)
    root = TopicNode(
        "root", 0, tuple(leaf0_ids) + tuple(leaf1_ids), 2, (), StopReason.NONE,
        children=[leaf0, leaf1],
    )
    return TopicTree(root=root, node_index={"root": root, "0": leaf0, "1": leaf1})


class TestBuildPropertyMatrix:
    def test_threshold_counts_by_hand(self):
        docs = [
            doc("d1", ["NbSe2"]),
            doc("d2", ["NbSe2"]),
            doc("d3", ["MoS2"]),
            doc("d4", ["MoS2"]),
            doc("d5", ["MoS2"]),
            doc("d6", []),
        ]
        tree = two_leaf_tree(["d1", "d2", "d3"], ["d4", "d5", "d6"])
        pm = build_property_matrix(tree, docs, "material", assoc_min=2, coverage_floor=2)
        assert pm.materials == ("MoS2", "NbSe2")
        cells = pm.inner
        # leaf 0: two NbSe2 tags -> one; one MoS2 tag -> unknown
        assert cells.cells[cells.row_index("0"), cells.col_index("NbSe2")] == ONE
        assert cells.cells[cells.row_index("0"), cells.col_index("MoS2")] == UNKNOWN
        # leaf 1: two MoS2 tags -> one; zero NbSe2 with coverage 2 -> zero
        assert cells.cells[cells.row_index("1"), cells.col_index("MoS2")] == ONE
        assert cells.cells[cells.row_index("1"), cells.col_index("NbSe2")] == ZERO
        # root aggregates everything
        assert cells.cells[cells.row_index("root"), cells.col_index("NbSe2")] == ONE

    def test_untagged_topic_row_is_unknown(self):
        docs = [doc("d1"), doc("d2"), doc("d3", ["WS2"]), doc("d4", ["WS2"])]
        tree = two_leaf_tree(["d1", "d2"], ["d3", "d4"])
        pm = build_property_matrix(tree, docs, "material", assoc_min=2, coverage_floor=1)
        row = pm.inner.cells[pm.inner.row_index("0")]
        assert (row == UNKNOWN).all()

    def test_one_cells_always_have_enough_provenance(self):
        rng = np.random.default_rng(3)
        docs = [
            doc(f"d{i}", rng.choice(["A2", "B2", "C2"], size=rng.integers(0, 3), replace=False))
            for i in range(20)
        ]
        tree = two_leaf_tree([f"d{i}" for i in range(10)], [f"d{i}" for i in range(10, 20)])
        pm = build_property_matrix(tree, docs, "material", assoc_min=2, coverage_floor=3)
        ones = pm.inner.cells == ONE
        assert (pm.provenance[ones] >= 2).all()
        zeros = pm.inner.cells == ZERO
        assert (pm.provenance[zeros] == 0).all()

    def test_raising_assoc_min_never_creates_ones(self):
        rng = np.random.default_rng(5)
        docs = [
            doc(f"d{i}", rng.choice(["A2", "B2"], size=rng.integers(0, 3)))
            for i in range(16)
        ]
        tree = two_leaf_tree([f"d{i}" for i in range(8)], [f"d{i}" for i in range(8, 16)])
        low = build_property_matrix(tree, docs, "material", assoc_min=1, coverage_floor=3)
        high = build_property_matrix(tree, docs, "material", assoc_min=3, coverage_floor=3)
        new_ones = (high.inner.cells == ONE) & (low.inner.cells != ONE)
        assert not new_ones.any()

    def test_missing_facet_rejected(self):
        docs = [doc("d1"), doc("d2")]
        tree = two_leaf_tree(["d1"], ["d2"])
        with pytest.raises(DataError):
            build_property_matrix(tree, docs, "material")

    def test_unresolved_member_rejected(self):
        docs = [doc("d1", ["A2"])]
        tree = two_leaf_tree(["d1"], ["ghost"])
        with pytest.raises(ArgumentError, match="ghost"):
            build_property_matrix(tree, docs, "material")


class TestFacetDistribution:
    def test_example_proportions(self):
        # 28 tagged docs split 19/5/2/2 mirror a dominant-material readout
        materials = ["NbSe2"] * 19 + ["Se2Ti"] * 5 + ["CoS2"] * 2 + ["NbS2"] * 2
        docs = [doc(f"d{i}", [m]) for i, m in enumerate(materials)]
        node = TopicNode("0", 1, tuple(d.doc_id for d in docs), 1, (), StopReason.RANK_ONE)
        dist = facet_distribution(node, docs, "material")
        assert dist[0][0] == "NbSe2"
        assert dist[0][2] == pytest.approx(100 * 19 / 28)
        assert sum(p for _, _, p in dist) == pytest.approx(100.0, abs=0.1)

    def test_single_tagged_doc(self):
        docs = [doc("d1", ["WS2"]), doc("d2")]
        node = TopicNode("0", 1, ("d1", "d2"), 1, (), StopReason.RANK_ONE)
        dist = facet_distribution(node, docs, "material")
        assert dist == [("WS2", 1, 100.0)]

    def test_counts_conserved(self):
        docs = [doc(f"d{i}", ["A2"] if i % 2 else ["B2"]) for i in range(9)]
        node = TopicNode("0", 1, tuple(d.doc_id for d in docs), 1, (), StopReason.RANK_ONE)
        dist = facet_distribution(node, docs, "material")
        assert sum(c for _, c, _ in dist) == 9

    def test_untagged_facet_gives_empty(self):
        docs = [doc("d1")]
        node = TopicNode("0", 1, ("d1",), 1, (), StopReason.RANK_ONE)
        assert facet_distribution(node, docs, "country") == []


class TestTableRoundTrip:
    def test_round_trip(self):
        docs = [doc("d1", ["A2", "B2"]), doc("d2", ["A2"]), doc("d3"), doc("d4", ["B2"])]
        tree = two_leaf_tree(["d1", "d2"], ["d3", "d4"])
        pm = build_property_matrix(tree, docs, "material", assoc_min=2, coverage_floor=1)
        text = to_table_text(pm)
        lines = text.strip().splitlines()
        assert lines[0].split("\t") == ["path_id", "A2", "B2"]
        back = from_table_text(text, provenance=pm.provenance)
        assert back.inner.equal_cells(pm.inner)
        assert np.array_equal(back.provenance, pm.provenance)

    def test_bad_cell_value_rejected(self):
        with pytest.raises(ArgumentError, match="line 2"):
            from_table_text("path_id\tA2\nroot\tmaybe\n")

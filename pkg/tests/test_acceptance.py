"""Acceptance suite: one test per criterion, each at its stated
tolerance, with a pass/fail line per criterion in the terminal summary."""

import itertools
import json
import time

import numpy as np
import pytest

import conftest
from conftest import hit_at_k_oracle, planted_block_matrix, planted_communities
from topiclink.cli import main as cli_main
from topiclink.corpus import build_tfidf
from topiclink.evaluate import (
    MaskSpec,
    cross_validate,
    hit_at_k,
    mask_links,
    rank_candidates,
    separation_stats,
)
from topiclink.factor import select_rank
from topiclink.hierarchy import (
    HNMFkConfig,
    StopReason,
    build_hierarchy,
    child_candidate_ranks,
)
from topiclink.linkmodels import (
    EnsembleConfig,
    LMFModel,
    LMFParams,
    _lmf_gradients,
    bnmf,
    boolean_product,
    fit_with_config,
    lmf_loss,
)
from topiclink.masked import UNKNOWN, MaskedBinaryMatrix
from topiclink.propmatrix import build_property_matrix
from topiclink.seeding import derive_seed
from topiclink.store import SearchQuery, ModelBundle, search
from topiclink.synth import generate_corpus


def record(number, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    conftest.ACCEPTANCE_RESULTS.append(f"[{status}] criterion {number} ({name}): {detail}")
    assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def planted_pipeline():
    """planted-tmd corpus through hierarchy and property matrix, timed."""
    t0 = time.time()
    docs, truth = generate_corpus("planted-tmd")
    cfg = truth["suggested"]
    X, vocab = build_tfidf(docs, min_df=cfg["min_df"])
    tree = build_hierarchy(
        X,
        [d.doc_id for d in docs],
        HNMFkConfig(
            k_min=cfg["k_min"],
            k_max=cfg["k_max"],
            s_min=cfg["s_min"],
            d_max=cfg["d_max"],
            ensemble_size=cfg["ensemble_size"],
            seed=truth["seed"],
        ),
        col_ids=vocab.terms,
    )
    pm = build_property_matrix(
        tree, docs, "material",
        assoc_min=cfg["assoc_min"], coverage_floor=cfg["coverage_floor"],
    )
    bundle = ModelBundle(documents=docs, tree=tree)
    nodes, _ = search(
        SearchQuery(tokens=(truth["cluster_query"],), top_n=cfg["query_top_n"]), bundle
    )
    target_rows = [n.path_id for n in nodes]
    model_config = EnsembleConfig(
        candidates=tuple(cfg["candidates"]),
        ensemble_size=cfg["ensemble_size_eval"],
        restarts=cfg["restarts"],
        lmf=LMFParams(
            lam=cfg["lmf_lambda"],
            learning_rate=cfg["lmf_learning_rate"],
            epochs=cfg["lmf_epochs"],
        ),
    )
    build_seconds = time.time() - t0
    return {
        "docs": docs,
        "truth": truth,
        "tree": tree,
        "pm": pm,
        "target_rows": target_rows,
        "model_config": model_config,
        "build_seconds": build_seconds,
    }


def test_criterion_1_planted_masked_link_recovery(planted_pipeline):
    p = planted_pipeline
    truth, pm = p["truth"], p["pm"]
    assert truth["n_documents"] == 400
    assert pm.inner.cols == 20
    assert pm.inner.rows >= 60  # topics

    t0 = time.time()
    report = cross_validate(
        pm.inner,
        truth["planted_members"],
        p["model_config"],
        folds=3,
        seed=7,
        target_rows=p["target_rows"],
    )
    elapsed = p["build_seconds"] + (time.time() - t0)
    ok = (
        report.hit_at[3] >= 0.90
        and report.hit_at[1] >= 0.70
        and elapsed < 180.0
    )
    record(
        1,
        "planted masked-link recovery",
        ok,
        f"hit@1={report.hit_at[1]:.3f} (>=0.70), hit@3={report.hit_at[3]:.3f} (>=0.90), "
        f"{pm.inner.rows} topics x {pm.inner.cols} materials, runtime {elapsed:.1f}s (<180s)",
    )


def test_criterion_2_score_separation(planted_pipeline):
    p = planted_pipeline
    truth, pm = p["truth"], p["pm"]
    fold_seed = derive_seed(7, "fold", 0)
    masked, spec = mask_links(
        pm.inner, truth["planted_members"], fold_seed, target_rows=p["target_rows"]
    )
    model = fit_with_config(masked, p["model_config"], fold_seed)
    stats = separation_stats(model.scores, spec)
    gap = stats.positive_quartiles[1] - stats.negative_quartiles[1]
    record(
        2,
        "positive/negative separation",
        gap >= 0.4,
        f"median gap {gap:.3f} (>=0.4; positives {stats.positive_quartiles[1]:.3f}, "
        f"negatives {stats.negative_quartiles[1]:.3f})",
    )


def test_criterion_3_candidate_ranking(planted_pipeline):
    p = planted_pipeline
    truth, pm = p["truth"], p["pm"]
    members = truth["planted_members"]
    decoys = truth["decoys"]
    assert len(members) == 4 and len(decoys) == 7
    wins = 0
    outcomes = []
    for run_seed in (101, 202, 303):
        table = rank_candidates(
            pm.inner, members + decoys, p["target_rows"], p["model_config"], run_seed,
            set_labels={**{m: "member" for m in members}, **{m: "decoy" for m in decoys}},
        )
        scores = {label: score for label, _, score in table.rows}
        lo_true = min(scores[m] for m in members)
        hi_decoy = max(scores[m] for m in decoys)
        win = lo_true > hi_decoy
        wins += win
        outcomes.append(f"{lo_true:.3f}>{hi_decoy:.3f}" if win else f"{lo_true:.3f}<={hi_decoy:.3f}")
    record(
        3,
        "ranking of held-out materials",
        wins >= 2,
        f"all 4 members above all 7 decoys in {wins}/3 runs ({', '.join(outcomes)})",
    )


def test_criterion_4_lmf_gradient_check():
    t0 = time.time()
    rng = np.random.default_rng(12)
    cells = rng.integers(0, 2, size=(5, 4)).astype(np.int8)
    cells[rng.random((5, 4)) < 0.2] = UNKNOWN
    X = MaskedBinaryMatrix(cells)
    lam = 0.05
    k = 2
    W = rng.normal(0, 0.5, (5, k))
    H = rng.normal(0, 0.5, (k, 4))
    b_r = rng.normal(0, 0.5, 5)
    b_c = rng.normal(0, 0.5, 4)
    mask = X.known_mask().astype(np.float64)
    values = X.values_filled(0.0)
    analytic = _lmf_gradients(W, H, b_r, b_c, values, mask, lam)

    params = [W, H, b_r, b_c]

    def loss_at():
        model = LMFModel(W=params[0], H=params[1], b_r=params[2], b_c=params[3],
                         lam=lam, rank=k)
        return lmf_loss(model, X)

    step = 1e-5
    rel_errors = []
    for block in range(4):
        numeric = np.zeros_like(params[block])
        flat = params[block].ravel()
        num_flat = numeric.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + step
            up = loss_at()
            flat[idx] = orig - step
            down = loss_at()
            flat[idx] = orig
            num_flat[idx] = (up - down) / (2 * step)
        rel_errors.append(
            float(np.linalg.norm(analytic[block] - numeric) / np.linalg.norm(numeric))
        )
    elapsed = time.time() - t0
    ok = all(err < 1e-5 for err in rel_errors) and elapsed < 1.0
    record(
        4,
        "logistic-fit gradient check",
        ok,
        f"relative errors per block {['%.2e' % e for e in rel_errors]} (<1e-5), "
        f"runtime {elapsed:.2f}s (<1s)",
    )


def _achievable_products(k):
    """All distinct Boolean products of 3xk and kx3 binary factors,
    bit-packed into 9-bit codes."""
    w_opts = np.array(
        list(itertools.product((0, 1), repeat=3 * k)), dtype=np.int32
    ).reshape(-1, 3, k)
    h_opts = np.array(
        list(itertools.product((0, 1), repeat=k * 3)), dtype=np.int32
    ).reshape(-1, k, 3)
    products = np.minimum(np.einsum("ank,bkm->abnm", w_opts, h_opts), 1)
    weights = (1 << np.arange(9)).reshape(3, 3)
    codes = (products * weights).sum(axis=(2, 3)).ravel()
    return np.unique(codes)


def test_criterion_5_boolean_exhaustive_optimum():
    t0 = time.time()
    popcount = np.array([bin(v).count("1") for v in range(512)], dtype=np.int32)
    weights = (1 << np.arange(9)).reshape(3, 3)
    mismatches = []
    for k in (1, 2, 3):
        codes = _achievable_products(k)
        for target_code in range(512):
            optimum = int(popcount[codes ^ target_code].min())
            T = ((target_code & weights) > 0).astype(np.int8)
            model = bnmf(MaskedBinaryMatrix(T), k=k, seed=42)
            if model.hamming_error != optimum:
                mismatches.append((k, target_code, model.hamming_error, optimum))
    elapsed = time.time() - t0
    ok = not mismatches and elapsed < 120.0
    record(
        5,
        "Boolean factorization exhaustive optimality",
        ok,
        f"512 matrices x k in {{1,2,3}}: {len(mismatches)} mismatches, "
        f"runtime {elapsed:.1f}s (<120s)",
    )


def test_criterion_6_rank_selection_recovery():
    recovered = {}
    for blocks in (2, 3, 4):
        hits = 0
        for trial in range(10):
            rng = np.random.default_rng(1000 * blocks + trial)
            sizes = [20 // blocks] * blocks
            sizes[-1] += 20 - sum(sizes)
            X = planted_block_matrix(sizes, rng)
            report = select_rank(X, candidates=[1, 2, 3, 4, 5], ensemble_size=10,
                                 seed=trial)
            hits += report.selected_rank == blocks
        recovered[blocks] = hits
    ok = all(hits >= 8 for hits in recovered.values())
    record(
        6,
        "planted block-count recovery",
        ok,
        "; ".join(f"b={b}: {h}/10 (>=8)" for b, h in recovered.items()),
    )


def test_criterion_7_hierarchy_structural_suite():
    X = planted_communities(np.random.default_rng(11))
    ids = tuple(f"d{i:03d}" for i in range(60))
    config = HNMFkConfig(k_min=1, k_max=5, s_min=5, d_max=3, ensemble_size=8, seed=11)
    tree = build_hierarchy(X, ids, config)
    again = build_hierarchy(X, ids, config)

    failures = []
    for node in tree.walk():
        if node.children:
            child_sets = [set(c.member_ids) for c in node.children]
            union = set().union(*child_sets)
            if union != set(node.member_ids) or sum(map(len, child_sets)) != node.size:
                failures.append(f"partition broken at {node.path_id}")
            if node.size <= config.s_min:
                failures.append(f"undersized internal node {node.path_id}")
            allowed = child_candidate_ranks(node.local_rank, config)
            for child in node.children:
                if child.local_rank not in allowed:
                    failures.append(f"rank bound broken at {child.path_id}")
        if node.depth > config.d_max:
            failures.append(f"depth bound broken at {node.path_id}")
    a = {n.path_id: n.member_ids for n in tree.walk()}
    b = {n.path_id: n.member_ids for n in again.walk()}
    if a != b:
        failures.append("two identical runs disagree")
    if tree.root.local_rank not in range(config.k_min, config.k_max + 1):
        failures.append("root rank out of bounds")

    sweep_mismatches = 0
    for k_min in (1, 2, 3):
        for k_max in range(max(2, k_min), 11):
            cfg = HNMFkConfig(k_min=k_min, k_max=k_max)
            for k_d in range(1, 11):
                oracle = tuple(
                    k for k in range(1, 50) if k_min <= k <= min(k_max, k_d + 1)
                )
                if child_candidate_ranks(k_d, cfg) != oracle:
                    sweep_mismatches += 1
    ok = not failures and sweep_mismatches == 0
    record(
        7,
        "hierarchy structural invariants",
        ok,
        f"{tree.total_topics}-node planted tree clean "
        f"({len(failures)} violations); candidate-rank sweep "
        f"{sweep_mismatches} mismatches vs set-builder oracle",
    )


def test_criterion_8_hit_at_k_enumeration():
    positions = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    grid = (0.25, 0.5, 0.75)
    checked = 0
    mismatches = 0
    for n_cells in range(2, 7):
        for subset in itertools.combinations(positions, n_cells):
            for n_pos in range(1, n_cells):
                spec = MaskSpec(
                    positives=tuple(subset[:n_pos]),
                    negatives=tuple(subset[n_pos:]),
                    seed=0,
                )
                for assignment in itertools.product(grid, repeat=n_cells):
                    scores = np.zeros((2, 3))
                    for cell, value in zip(subset, assignment):
                        scores[cell] = value
                    for k in range(1, n_cells + 1):
                        checked += 1
                        if hit_at_k(scores, spec, k) != hit_at_k_oracle(scores, spec, k):
                            mismatches += 1
    record(
        8,
        "hit@k enumeration oracle",
        mismatches == 0,
        f"{checked} (instance, k) pairs incl. ties: {mismatches} mismatches",
    )


def test_criterion_9_end_to_end_determinism(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    assert cli_main(["synth", "--preset", "planted-mini", "--out", str(corpus)]) == 0
    checksums = []
    for name in ("run-a", "run-b"):
        bundle = tmp_path / name
        steps = [
            ["ingest", str(corpus), "--out", str(bundle)],
            ["hierarchy", str(bundle), "--k-max", "4"],
            ["propmatrix", str(bundle), "--coverage-floor", "3"],
            ["fit", str(bundle), "--candidates", "1,2,3"],
            ["evaluate", str(bundle), "--target-query", "superconduct", "--folds", "2"],
        ]
        for step in steps:
            assert cli_main(step) == 0, f"step failed: {step}"
        manifest = json.loads((bundle / "manifest.json").read_text())
        checksums.append(manifest["bundle_checksum"])
    record(
        9,
        "end-to-end determinism",
        checksums[0] == checksums[1],
        f"bundle checksums {checksums[0][:12]} == {checksums[1][:12]}",
    )

import itertools

import numpy as np

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


def boolean_hamming_optimum(T, k):
    """Exhaustive minimum Hamming error over all binary factor pairs.

    Enumerates every W in {0,1}^(n x k) and H in {0,1}^(k x m) and
    scores the OR-of-ANDs product against T. Only feasible for tiny
    shapes; used as the independent oracle for the Boolean factorizer.
    """
    T = np.asarray(T, dtype=np.uint8)
    n, m = T.shape
    w_options = np.array(
        list(itertools.product((0, 1), repeat=n * k)), dtype=np.uint8
    ).reshape(-1, n, k)
    h_options = np.array(
        list(itertools.product((0, 1), repeat=k * m)), dtype=np.uint8
    ).reshape(-1, k, m)
    # products[a, b] = OR-of-ANDs of w_options[a] @ h_options[b]
    products = np.minimum(
        np.einsum("ank,bkm->abnm", w_options.astype(np.int32), h_options.astype(np.int32)),
        1,
    )
    errors = (products != T[None, None]).sum(axis=(2, 3))
    return int(errors.min())


def hit_at_k_oracle(scores, spec, k):
    """Naive hit@k: for each positive, explicitly build the combined
    list with the negatives, sort by (score desc, cell asc), and read
    off its 1-based position."""
    scores = np.asarray(scores, dtype=np.float64)
    hits = 0
    for p in spec.positives:
        entries = [(float(scores[c]), c) for c in spec.negatives]
        entries.append((float(scores[p]), p))
        entries.sort(key=lambda e: (-e[0], e[1]))
        rank = entries.index((float(scores[p]), p)) + 1
        if rank <= k:
            hits += 1
    return hits / len(spec.positives)


def planted_block_matrix(block_sizes, rng, background=0.08):
    """Square matrix with one rank-1 positive block per planted cluster
    plus a faint random background (keeps multiplicative updates off
    absorbing zero basins without adding coherent structure)."""
    n = sum(block_sizes)
    X = rng.uniform(0.0, background, (n, n))
    start = 0
    for size in block_sizes:
        u = rng.uniform(0.5, 1.0, size)
        v = rng.uniform(0.5, 1.0, size)
        X[start : start + size, start : start + size] += np.outer(u, v)
        start += size
    return X


def planted_communities(rng, docs_per=20, tokens_per=10, blocks=3, background=0.05):
    """Documents-by-tokens matrix with one strong token block per community."""
    n, m = docs_per * blocks, tokens_per * blocks
    X = rng.uniform(0.0, background, (n, m))
    for b in range(blocks):
        rows = slice(b * docs_per, (b + 1) * docs_per)
        cols = slice(b * tokens_per, (b + 1) * tokens_per)
        X[rows, cols] += rng.uniform(0.5, 1.0, (docs_per, tokens_per))
    return X

import itertools
import os

import numpy as np

from indnet.netbuild import DistanceMatrix


def pytest_addoption(parser):
    parser.addoption(
        "--ine-dir",
        default=os.environ.get("INDNET_INE_DIR"),
        help="directory with the INE I38 output tables (files named with their year)",
    )


def ids(n):
    return tuple(f"N{i:02d}" for i in range(n))


def random_distances(rng, n, unique=True, p_missing=0.0):
    """Random symmetric distance matrix; ``p_missing`` pairs become unreachable."""
    m = n * (n - 1) // 2
    vals = rng.permutation(m) + 1.0 if unique else rng.integers(1, 4, m).astype(float)
    vals = vals * rng.uniform(0.5, 2.0)
    if p_missing:
        vals[rng.random(m) < p_missing] = np.inf
    d = np.full((n, n), np.inf)
    iu = np.triu_indices(n, k=1)
    d[iu] = vals
    d.T[iu] = vals
    return DistanceMatrix.from_array(ids(n), d)


def random_connected(rng, n, p_missing=0.5):
    """Random matrix guaranteed connected: a random chain is kept finite."""
    while True:
        dm = random_distances(rng, n, p_missing=p_missing)
        d = np.array(dm.distances)
        order = rng.permutation(n)
        for a, b in zip(order, order[1:]):
            if not np.isfinite(d[a, b]):
                d[a, b] = d[b, a] = rng.uniform(1, 100)
        return DistanceMatrix.from_array(dm.industries, d)


def prufer_trees(n):
    """Every labelled tree on n nodes, as a set of (i, j) pairs with i < j."""
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(n) if degree[i] == 1]
        edges.append((u, v))
        yield frozenset(edges)


def brute_force_mst(d: np.ndarray):
    """Minimum total distance over all labelled trees; returns (total, edge set)."""
    n = d.shape[0]
    best = None
    for tree in prufer_trees(n):
        total = sum(d[i, j] for i, j in tree)
        if np.isfinite(total) and (best is None or total < best[0]):
            best = (total, tree)
    return best


def tree_path_max(edges, n, u, v, d):
    adj = {i: [] for i in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    stack = [(u, -1, 0.0)]
    while stack:
        node, parent, worst = stack.pop()
        if node == v:
            return worst
        for nxt in adj[node]:
            if nxt != parent:
                stack.append((nxt, node, max(worst, d[node, nxt])))
    raise AssertionError("tree is not connected")


def is_cycle_optimal(edges, d: np.ndarray) -> bool:
    """Every non-tree finite edge is strictly longer than the tree path it closes."""
    n = d.shape[0]
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) in edges or not np.isfinite(d[i, j]):
            continue
        if d[i, j] <= tree_path_max(edges, n, i, j, d):
            return False
    return True


def index_pairs(tree):
    pos = {name: k for k, name in enumerate(tree.industries)}
    return frozenset(tuple(sorted((pos[a], pos[b]))) for a, b, _ in tree.edges)


_TREE_CACHE = {}


def all_trees(n):
    """Every labelled tree on n nodes as rows of indices into the i<j pair list.

    Vectorised Prüfer decoding; n**(n-2) rows, practical up to n = 8.
    """
    if n in _TREE_CACHE:
        return _TREE_CACHE[n]
    seqs = np.array(list(itertools.product(range(n), repeat=n - 2)), dtype=np.int64).reshape(-1, n - 2)
    count = seqs.shape[0]
    rows = np.arange(count)
    degree = np.ones((count, n), dtype=np.int64)
    for k in range(n - 2):
        np.add.at(degree, (rows, seqs[:, k]), 1)
    pair_index = -np.ones((n, n), dtype=np.int64)
    iu, ju = np.triu_indices(n, k=1)
    pair_index[iu, ju] = np.arange(iu.size)
    pair_index[ju, iu] = np.arange(iu.size)
    edges = np.empty((count, n - 1), dtype=np.int64)
    for k in range(n - 2):
        leaf = np.argmax(degree == 1, axis=1)
        edges[:, k] = pair_index[leaf, seqs[:, k]]
        degree[rows, leaf] -= 1
        degree[rows, seqs[:, k]] -= 1
    last = degree == 1
    u = np.argmax(last, axis=1)
    v = n - 1 - np.argmax(last[:, ::-1], axis=1)
    edges[:, n - 2] = pair_index[u, v]
    _TREE_CACHE[n] = edges
    return edges


def enumerated_mst(d: np.ndarray):
    """Minimum-total tree by exhaustive enumeration; returns a set of (i, j) pairs."""
    n = d.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    flat = d[iu, ju]
    trees = all_trees(n)
    totals = flat[trees].sum(axis=1)
    best = trees[np.argmin(totals)]
    return frozenset((int(iu[k]), int(ju[k])) for k in best), float(totals.min())


ACCEPTANCE_LINES = []


def record_acceptance(number, name, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

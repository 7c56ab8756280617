"""Independent reference implementations used only by the tests."""

import itertools

import numpy as np


def brute_force_mst_weight(n, edges):
    """Minimum total weight over every (n-1)-edge subset that forms a spanning tree."""
    best = np.inf
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for i, j, _ in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            best = min(best, sum(w for _, _, w in subset))
    return best


def floyd_warshall(n, edges):
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for i, j, w in edges:
        d[i, j] = d[j, i] = min(d[i, j], w)
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def random_tree(rng, n):
    """Random labelled tree: each vertex k > 0 attaches to a uniform earlier vertex."""
    perm = rng.permutation(n)
    edges = []
    for k in range(1, n):
        a, b = perm[k], perm[rng.integers(k)]
        edges.append((int(min(a, b)), int(max(a, b)), float(rng.uniform(0.1, 10.0))))
    return edges


def random_connected_graph(rng, n, p=0.6, integer=False):
    tree = random_tree(rng, n)
    have = {(i, j) for i, j, _ in tree}
    edges = list(tree)
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in have and rng.random() < p:
                edges.append((i, j, 0.0))
    out = []
    for i, j, _ in edges:
        w = float(rng.integers(1, 6)) if integer else float(rng.uniform(0.0, 10.0))
        out.append((i, j, w))
    return out


def numeric_grad(f, arr, h=1e-6):
    """Central differences of scalar ``f()`` with respect to every entry of ``arr`` (mutated in place)."""
    g = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        old = arr[idx]
        arr[idx] = old + h
        fp = f()
        arr[idx] = old - h
        fm = f()
        arr[idx] = old
        g[idx] = (fp - fm) / (2 * h)
    return g


def max_rel_error(a, b, floor=1e-8):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))


def joint_gradient_error(mode, seed, m=12, d=6, p=2, h=1e-6):
    """Worst relative error of analytic vs central-difference gradients of the full joint loss.

    Dropout is off, so the loss is a deterministic function of the parameters.
    Returns the largest per-entry relative error over every weight and bias.
    """
    from mstae.intrinsic_dim import layer_plan
    from mstae.nn_core import NetworkParams, init_params
    from mstae.regularizer import RegularizerConfig, build_target
    from mstae.trainer import TrainConfig, joint_loss

    rng = np.random.default_rng(seed)
    x = rng.normal(size=(m, d))
    cfg = TrainConfig(dropout_rate=0.0, regularizer=RegularizerConfig(mode), latent_dim=p)
    target = build_target(x, cfg.regularizer)
    params = init_params(layer_plan(d, p, 4), seed)
    weights = [w.copy() for w in params.weights]
    biases = [b.copy() for b in params.biases]

    def total():
        q = NetworkParams(params.specs, tuple(weights), tuple(biases), params.n_encoder)
        return joint_loss(q, x, x, cfg, target)[0]

    _, _, _, (gw, gb), _ = joint_loss(params, x, x, cfg, target)
    worst = 0.0
    for analytic, arr in list(zip(gw, weights)) + list(zip(gb, biases)):
        worst = max(worst, max_rel_error(analytic, numeric_grad(total, arr, h), floor=1e-12))
    return worst


def write_three_blobs(path, per_blob=100, seed=0):
    """Three unit-variance Gaussian blobs in 4-d, centers at least 6 apart, string class column."""
    rng = np.random.default_rng(seed)
    centers = np.array([[0, 0, 0, 0], [6, 6, 0, 0], [0, 6, 6, 6]], float)
    x = np.vstack([rng.normal(c, 1.0, (per_blob, 4)) for c in centers])
    cls = np.repeat(["a", "b", "c"], per_blob)
    with open(path, "w") as fh:
        fh.write("f1,f2,f3,f4,cls\n")
        for row, c in zip(x, cls):
            fh.write(",".join(repr(float(v)) for v in row) + f",{c}\n")
    return path


_TREE_CACHE = {}


def all_labeled_trees(n):
    """Every labelled tree on ``n`` vertices as an (n^(n-2), n-1, 2) edge array, decoded from Prufer sequences."""
    if n in _TREE_CACHE:
        return _TREE_CACHE[n]
    if n == 2:
        trees = np.array([[[0, 1]]])
    else:
        seqs = np.array(list(itertools.product(range(n), repeat=n - 2)), dtype=np.intp)
        b = seqs.shape[0]
        rows = np.arange(b)
        degree = np.ones((b, n), dtype=np.intp)
        np.add.at(degree, (np.repeat(rows, n - 2), seqs.ravel()), 1)
        edges = np.empty((b, n - 1, 2), dtype=np.intp)
        for step in range(n - 2):
            leaf = np.argmax(degree == 1, axis=1)  # smallest current leaf
            edges[:, step, 0] = leaf
            edges[:, step, 1] = seqs[:, step]
            degree[rows, leaf] -= 1
            degree[rows, seqs[:, step]] -= 1
        last = np.argsort(degree != 1, axis=1, kind="stable")[:, :2]
        edges[:, n - 2] = last
        trees = edges
    _TREE_CACHE[n] = trees
    return trees


def exhaustive_mst_weight(n, edges):
    """Minimum over all labelled trees of the summed edge weight (missing edges cost infinity)."""
    if n == 1:
        return 0.0
    w = np.full((n, n), np.inf)
    for i, j, x in edges:
        w[i, j] = w[j, i] = min(w[i, j], x)
    trees = all_labeled_trees(n)
    return float(w[trees[..., 0], trees[..., 1]].sum(axis=1).min())

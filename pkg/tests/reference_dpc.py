"""Brute-force density peak clustering in plain Python.

Independent of the package under test: no numpy, no shared helpers.  Every
quantity is recomputed from first principles with nested loops so the main
implementation can be checked value-for-value on small instances.
"""

import math


def euclidean(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def manhattan(a, b):
    return sum(abs(x - y) for x, y in zip(a, b))


def chebyshev(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def kernel_weight(kind, x, d_c):
    if kind == "step":
        return 1.0 if x < d_c else 0.0
    return math.exp(-((x / d_c) ** 2))


def densities(points, kind, d_c, metric=euclidean):
    n = len(points)
    rho = []
    for i in range(n):
        total = 0.0
        for j in range(n):
            if j == i:
                continue
            total += kernel_weight(kind, metric(points[i], points[j]), d_c)
        rho.append(total)
    return rho


def is_higher(rho, j, i):
    # total order: higher density wins, equal densities break by index
    return rho[j] > rho[i] or (rho[j] == rho[i] and j < i)


def nearest_higher(points, rho, i, metric=euclidean):
    best, best_d = None, math.inf
    for j in range(len(points)):
        if j == i or not is_higher(rho, j, i):
            continue
        d = metric(points[i], points[j])
        if d < best_d:
            best, best_d = j, d
    return best, best_d


def forest(points, kind, d_c, metric=euclidean):
    """(rho, parent, delta) with parent None for the global maximum."""
    rho = densities(points, kind, d_c, metric)
    parent, delta = [], []
    for i in range(len(points)):
        h, d = nearest_higher(points, rho, i, metric)
        parent.append(h)
        delta.append(d)
    return rho, parent, delta


def classify(rho, delta, rho_c, delta_c):
    roots, outliers = [], []
    for i in range(len(rho)):
        if delta[i] > delta_c:
            (roots if rho[i] >= rho_c else outliers).append(i)
    return roots, outliers


def labels(rho, parent, delta, rho_c, delta_c):
    """Cluster label per element; -1 marks noise (outliers and their trees)."""
    n = len(rho)
    roots, outliers = classify(rho, delta, rho_c, delta_c)
    out = [None] * n
    for i in sorted(range(n), key=lambda k: (-rho[k], k)):
        if i in roots:
            out[i] = i
        elif i in outliers:
            out[i] = -1
        else:
            out[i] = out[parent[i]]
    return out


def walk_terminator(parent, delta, delta_c, i):
    """First element on i's parent chain whose separation exceeds delta_c."""
    cur = i
    while delta[cur] <= delta_c:
        cur = parent[cur]
    return cur


def decide(rho, parent, delta, rho_c, delta_c, i, j):
    """Same-cluster verdict from two walks, without label construction."""
    t_i = walk_terminator(parent, delta, delta_c, i)
    t_j = walk_terminator(parent, delta, delta_c, j)
    return t_i == t_j and rho[t_i] >= rho_c


def heights(rho, parent):
    """Hop depth of every element below its parentless ancestor; returns
    (per-root max depth, overall max)."""
    n = len(rho)
    depth, root_of = [0] * n, list(range(n))
    for i in sorted(range(n), key=lambda k: (-rho[k], k)):
        if parent[i] is not None:
            depth[i] = depth[parent[i]] + 1
            root_of[i] = root_of[parent[i]]
    per_root = {}
    for i in range(n):
        r = root_of[i]
        per_root[r] = max(per_root.get(r, 0), depth[i])
    return per_root, max(depth)

"""Classical density peak clustering over a counted distance oracle.

Density ties are broken by index, which makes "higher density" a strict
total order: j is higher than i iff rho_j > rho_i, or rho_j == rho_i and
j < i.  Under that order exactly one element (the global maximum) has no
nearest-higher, so the parent links form a single tree; promoting roots and
outliers happens at classification time and never edits the links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Set, Tuple

import numpy as np

from .data import Dataset, DistanceOracle

NOISE = -1

KERNEL_KINDS = ("step", "gaussian")


@dataclass(frozen=True)
class Kernel:
    """Distance-to-similarity kernel with cutoff d_c.

    step: contributes 1 for x < d_c, 0 otherwise (x == d_c contributes 0).
    gaussian: contributes exp(-x**2 / d_c**2).
    """

    kind: str
    d_c: float

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"kernel kind must be one of {KERNEL_KINDS}, got {self.kind!r}")
        if not (self.d_c > 0 and math.isfinite(self.d_c)):
            raise ValueError(f"d_c must be positive and finite, got {self.d_c}")


def kernel_values(kernel: Kernel, x: np.ndarray) -> np.ndarray:
    """Vectorized kernel evaluation on non-negative distances."""
    x = np.asarray(x, dtype=float)
    if kernel.kind == "step":
        return (x < kernel.d_c).astype(float)
    return np.exp(-((x / kernel.d_c) ** 2))


def kernel_eval(kernel: Kernel, x: float) -> float:
    if x < 0:
        raise ValueError(f"distances are non-negative, got {x}")
    return float(kernel_values(kernel, np.asarray([x]))[0])


@dataclass(frozen=True)
class Thresholds:
    """Density / separation cut pair (rho_c, delta_c) used for classification."""

    rho_c: float
    delta_c: float

    def __post_init__(self):
        if not (self.delta_c > 0):
            raise ValueError(f"delta_c must be positive, got {self.delta_c}")
        if not math.isfinite(self.rho_c) or not math.isfinite(self.delta_c):
            raise ValueError("thresholds must be finite")


def compute_density(oracle: DistanceOracle, kernel: Kernel, i: int) -> float:
    """Kernel-weighted density of point i; the self term is excluded.

    Charges n - 1 distance queries on a fresh ledger, fewer on memo hits.
    """
    row = oracle.distances_from(i)
    vals = kernel_values(kernel, row)
    vals[i] = 0.0
    return float(vals.sum())


def compute_all_densities(oracle: DistanceOracle, kernel: Kernel) -> np.ndarray:
    """Density profile for every point.

    With memoization the full sweep charges exactly (n^2 - n) / 2 queries.
    """
    return np.array([compute_density(oracle, kernel, i) for i in range(oracle.n)])


def raw_densities(dataset: Dataset, kernel: Kernel) -> np.ndarray:
    """Uncounted density profile, for simulation truth and experiment harnesses.

    Matches compute_all_densities value-for-value; it just bypasses the ledger.
    """
    out = np.empty(dataset.n)
    for i in range(dataset.n):
        vals = kernel_values(kernel, dataset.distances_from(i))
        vals[i] = 0.0
        out[i] = vals.sum()
    return out


def density_order(profile: np.ndarray, j: int, i: int) -> bool:
    """True iff j is strictly higher than i in the density total order."""
    return profile[j] > profile[i] or (profile[j] == profile[i] and j < i)


def higher_mask(profile: np.ndarray, i: int) -> np.ndarray:
    """Boolean vector of elements strictly higher than i in the total order."""
    profile = np.asarray(profile)
    idx = np.arange(profile.shape[0])
    return (profile > profile[i]) | ((profile == profile[i]) & (idx < i))


def nearest_higher(
    oracle: DistanceOracle, profile: np.ndarray, i: int
) -> Tuple[Optional[int], float]:
    """Closest element strictly higher than i in the total order.

    Returns (index, separation); (None, inf) for the global maximum.
    Distance ties go to the smallest index.  Only candidate pairs are
    queried, so the call charges at most n - 1.
    """
    oracle.dataset._check_index(i)
    best_j, best_d = -1, math.inf
    for j in range(oracle.n):
        if density_order(profile, j, i):
            dij = oracle.distance(i, j)
            if dij < best_d:
                best_j, best_d = j, dij
    if best_j < 0:
        return None, math.inf
    return best_j, best_d


@dataclass(frozen=True)
class NearestHigherForest:
    """Parent links, separations, and densities for every element.

    parent[i] is -1 exactly for the global density maximum, whose delta is
    +inf; every other delta is the finite distance to the nearest-higher.
    """

    parent: np.ndarray
    delta: np.ndarray
    rho: np.ndarray

    @property
    def n(self) -> int:
        return self.parent.shape[0]

    def parent_of(self, i: int) -> Optional[int]:
        p = int(self.parent[i])
        return None if p < 0 else p


def build_forest(oracle: DistanceOracle, kernel: Kernel) -> NearestHigherForest:
    """Densities plus nearest-higher links for the whole dataset.

    On a fresh memoized oracle this charges exactly (n^2 - n) / 2 classical
    queries: the nearest-higher scans reuse the distances cached by the
    density sweep.
    """
    n = oracle.n
    rho = compute_all_densities(oracle, kernel)
    parent = np.full(n, -1, dtype=np.int64)
    delta = np.full(n, math.inf)
    for i in range(n):
        mask = higher_mask(rho, i)
        if not mask.any():
            continue  # global maximum
        row = oracle.distances_from(i)
        cand = np.where(mask, row, math.inf)
        j = int(np.argmin(cand))  # first minimum, i.e. smallest index on ties
        parent[i] = j
        delta[i] = cand[j]
    return NearestHigherForest(parent, delta, rho)


def classify(forest: NearestHigherForest, thresholds: Thresholds) -> Tuple[Set[int], Set[int]]:
    """Split the delta > delta_c elements into roots and outliers.

    Roots have rho >= rho_c (the rho == rho_c boundary counts as root),
    outliers have rho < rho_c.  Everything else is interior.
    """
    standout = forest.delta > thresholds.delta_c
    root_side = forest.rho >= thresholds.rho_c
    roots = set(np.flatnonzero(standout & root_side).tolist())
    outliers = set(np.flatnonzero(standout & ~root_side).tolist())
    return roots, outliers


@dataclass(frozen=True)
class ClusterAssignment:
    """Labels plus the root/outlier sets that produced them.

    labels[i] is the root id of i's cluster, or NOISE (-1) for outliers and
    every element whose parent chain passes through one.
    """

    labels: np.ndarray
    roots: Set[int]
    outliers: Set[int]


def assign_clusters(forest: NearestHigherForest, thresholds: Thresholds) -> ClusterAssignment:
    """Propagate root labels down the forest in decreasing density order."""
    n = forest.n
    roots, outliers = classify(forest, thresholds)
    labels = np.full(n, NOISE, dtype=np.int64)
    order = np.lexsort((np.arange(n), -forest.rho))
    for i in order:
        i = int(i)
        if i in roots:
            labels[i] = i
        elif i in outliers:
            labels[i] = NOISE
        else:
            p = int(forest.parent[i])
            if p < 0:
                raise AssertionError("non-root element without parent")
            labels[i] = labels[p]  # NOISE propagates through outlier chains
    return ClusterAssignment(labels, roots, outliers)


def tree_heights(forest: NearestHigherForest) -> Tuple[Dict[int, int], int]:
    """Height of each parent-link tree, keyed by its root element.

    Height is the maximum hop count from any element down to its root; a
    single-element tree has height 0.  Returns (per-root heights, overall
    maximum H).
    """
    n = forest.n
    order = np.lexsort((np.arange(n), -forest.rho))
    depth = np.zeros(n, dtype=np.int64)
    root_of = np.arange(n)
    for i in order:
        i = int(i)
        p = int(forest.parent[i])
        if p >= 0:
            depth[i] = depth[p] + 1
            root_of[i] = root_of[p]
    heights: Dict[int, int] = {}
    for i in range(n):
        r = int(root_of[i])
        heights[r] = max(heights.get(r, 0), int(depth[i]))
    return heights, int(depth.max())


def forest_to_json(forest: NearestHigherForest, assignment: ClusterAssignment) -> dict:
    """Declared clustering export: null parents, "inf" deltas, "noise" labels."""
    return {
        "parent": [None if p < 0 else int(p) for p in forest.parent],
        "delta": ["inf" if math.isinf(d) else float(d) for d in forest.delta],
        "rho": [float(r) for r in forest.rho],
        "labels": ["noise" if l == NOISE else int(l) for l in assignment.labels],
        "roots": sorted(int(r) for r in assignment.roots),
        "outliers": sorted(int(o) for o in assignment.outliers),
    }

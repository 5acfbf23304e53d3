"""Decision clustering: answer "same cluster?" for one pair without labelling
everything.

The walk follows nearest-higher links until it reaches an element whose
separation exceeds delta_c.  That terminator is either a root (chain decided
by identity) or an outlier (the pair is declared not-same, mirroring how
label assignment turns outlier chains into noise).  Termination needs no
global classification pass, only the local delta test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import DistanceOracle
from .dpc import Kernel, Thresholds, compute_all_densities, nearest_higher


@dataclass(frozen=True)
class DecisionOutcome:
    same_cluster: bool
    root_i: Optional[int]
    root_j: Optional[int]
    classical_queries: int


def find_root(
    oracle: DistanceOracle, profile: np.ndarray, thresholds: Thresholds, i: int
) -> int:
    """Walk parent links from i to the first element with delta > delta_c.

    Iterative; takes at most one step more than the chain height.  The
    density profile is passed in, so its cost stays with the caller.
    """
    cur = i
    while True:
        parent, delta = nearest_higher(oracle, profile, cur)
        if delta > thresholds.delta_c:
            return cur
        cur = parent


def decide_same_cluster(
    oracle: DistanceOracle, kernel: Kernel, thresholds: Thresholds, i: int, j: int
) -> DecisionOutcome:
    """Decide whether points i and j share a cluster.

    No if either endpoint is an outlier or either chain terminates at one;
    yes iff both chains terminate at the same root.  For i == j the answer
    is yes exactly when i is not an outlier; no walk is needed.

    The query count is dominated by the density sweep: with a memoized
    oracle the walks reuse cached distances, so the total charge is exactly
    (n^2 - n) / 2.
    """
    oracle.dataset._check_index(i)
    oracle.dataset._check_index(j)
    start = oracle.ledger.classical_queries
    rho = compute_all_densities(oracle, kernel)

    def spent() -> int:
        return oracle.ledger.classical_queries - start

    def standout_root(idx: int, delta: float) -> Optional[int]:
        return idx if delta > thresholds.delta_c else None

    _, d_i = nearest_higher(oracle, rho, i)
    out_i = rho[i] < thresholds.rho_c and d_i > thresholds.delta_c
    if i == j:
        r = standout_root(i, d_i)
        return DecisionOutcome(not out_i, r, r, spent())

    _, d_j = nearest_higher(oracle, rho, j)
    out_j = rho[j] < thresholds.rho_c and d_j > thresholds.delta_c
    if out_i or out_j:
        return DecisionOutcome(
            False, standout_root(i, d_i), standout_root(j, d_j), spent()
        )

    t_i = find_root(oracle, rho, thresholds, i)
    t_j = find_root(oracle, rho, thresholds, j)
    same = bool(t_i == t_j and rho[t_i] >= thresholds.rho_c)
    return DecisionOutcome(same, t_i, t_j, spent())

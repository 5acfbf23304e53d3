"""Stochastic simulation of quantum minimum finding with exact query charging.

No state vectors here: a Grover run of r rounds on t marked items out of n
succeeds with probability sin((2r+1) * theta)**2, theta = asin(sqrt(t/n)),
and on success measurement is uniform over the marked set.  Sampling those
two facts reproduces the algorithm's observable behaviour; the charged query
counts are bookkept exactly rather than simulated.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .data import DistanceOracle
from .dpc import Kernel, Thresholds, higher_mask, raw_densities


@dataclass(frozen=True)
class QmfConfig:
    """Knobs of the minimum-finding simulation.

    growth is the trial-bound schedule factor (must stay below 4/3 for the
    exponential search argument); cutoff_factor fixes the per-run Grover
    budget ceil(cutoff_factor * sqrt(n)).
    """

    epsilon: float = 0.1
    growth: float = 8.0 / 7.0
    cutoff_factor: float = 22.5
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 1 < self.growth < 4.0 / 3.0:
            raise ValueError(f"growth must be in (1, 4/3), got {self.growth}")
        if self.cutoff_factor <= 0:
            raise ValueError(f"cutoff_factor must be positive, got {self.cutoff_factor}")


@dataclass(frozen=True)
class QmfResult:
    argmin_candidate: int
    grover_iterations: int
    charged_queries: int
    success: bool
    threshold_trace: Tuple[int, ...]


class SearchProblem:
    """Black-box objective over indices 0..n-1, with simulation introspection.

    The search routines consume only value() plus the trial statistics
    marked_count() / sample_marked(), which stand in for preparing and
    measuring a Grover run; the marked count is never handed to the
    "algorithm" side.  charge_per_eval is the number of distance queries one
    objective evaluation costs in the query model.
    """

    def __init__(self, values, charge_per_eval: int = 1):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] < 1:
            raise ValueError("values must be a non-empty 1-d array")
        if np.isnan(vals).any():
            raise ValueError("values must not contain NaN")
        if charge_per_eval < 0:
            raise ValueError("charge_per_eval must be non-negative")
        self.values = vals
        self.charge_per_eval = int(charge_per_eval)
        self._order = np.argsort(vals, kind="stable")
        self._sorted = vals[self._order]

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def value(self, j: int) -> float:
        return float(self.values[j])

    def min_value(self) -> float:
        return float(self._sorted[0])

    def marked_count(self, threshold_value: float) -> int:
        """t = |{j : f(j) < threshold_value}|; strict, so the threshold itself
        is never marked."""
        return int(np.searchsorted(self._sorted, threshold_value, side="left"))

    def sample_marked(self, t: int, rng: np.random.Generator) -> int:
        """Uniform draw from the t marked indices (measurement statistics)."""
        if t < 1:
            raise ValueError("cannot sample from an empty marked set")
        return int(self._order[int(rng.integers(t))])


def grover_success_probability(n: int, t: int, r: int) -> float:
    """Chance that measuring after r amplification rounds hits a marked index."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    theta = math.asin(math.sqrt(t / n))
    return math.sin((2 * r + 1) * theta) ** 2


def grover_trial(
    n: int, t: int, m: float, rng: np.random.Generator
) -> Tuple[int, bool]:
    """One Grover attempt with round count drawn uniformly from {0..ceil(m)-1}.

    Returns (rounds used, success).  t == 0 never succeeds.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    r = int(rng.integers(0, math.ceil(m)))
    p = grover_success_probability(n, t, r)
    return r, bool(rng.random() < p)


def bbht_search(
    problem: SearchProblem,
    threshold_value: float,
    config: QmfConfig,
    rng: np.random.Generator,
    budget: int,
) -> Tuple[Optional[int], int]:
    """Exponential search for an index with value strictly below the threshold.

    The trial bound grows by config.growth after each failure, capped at
    sqrt(n).  Returns (index, rounds used); index is None once the round
    budget is exhausted (always the case when nothing is marked).
    """
    n = problem.n
    t = problem.marked_count(threshold_value)
    cap = math.sqrt(n)
    m = 1.0
    used = 0
    while used < budget:
        r, ok = grover_trial(n, t, m, rng)
        used += r
        if ok:
            return problem.sample_marked(t, rng), used
        m = min(config.growth * m, cap)
    return None, used


def qmf_minimum(
    problem: SearchProblem, config: QmfConfig, rng: Optional[np.random.Generator] = None
) -> QmfResult:
    """Threshold-descent minimum finding.

    Each run starts from a uniformly random threshold and keeps calling
    bbht_search for a strict improver until the cumulative round budget
    ceil(cutoff_factor * sqrt(n)) is spent.  The whole run is repeated
    ceil(log2(1/epsilon)) times on independent substreams and the best
    threshold wins; the repeat streams are derived up front, so a longer
    budget can only improve any given seed's outcome.

    success is simulation-side truth (did we land on a minimal value) and is
    for testing only.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = problem.n
    if n == 1:
        return QmfResult(0, 0, 0, True, (0,))
    repeats = max(1, math.ceil(math.log2(1.0 / config.epsilon)))
    budget = math.ceil(config.cutoff_factor * math.sqrt(n))
    child_seeds = rng.integers(0, 2**63 - 1, size=repeats)

    best_idx: Optional[int] = None
    best_val = math.inf
    best_trace: Tuple[int, ...] = ()
    total_rounds = 0
    for child in child_seeds:
        sub = np.random.default_rng(int(child))
        idx = int(sub.integers(0, n))
        val = problem.value(idx)
        trace = [idx]
        rounds = 0
        while rounds < budget:
            found, used = bbht_search(problem, val, config, sub, budget - rounds)
            rounds += used
            if found is None:
                break
            idx, val = found, problem.value(found)
            trace.append(found)
        total_rounds += rounds
        if val < best_val or (best_idx is None and val == best_val):
            best_idx, best_val, best_trace = idx, val, tuple(trace)

    charged = problem.charge_per_eval * total_rounds
    success = best_val == problem.min_value()
    return QmfResult(best_idx, total_rounds, charged, success, best_trace)


def nearest_higher_problem(
    oracle: DistanceOracle, kernel: Kernel, i: int, profile: Optional[np.ndarray] = None
) -> SearchProblem:
    """f_i(j): distance to j when j is higher in the density total order,
    +inf otherwise.  Built from uncounted introspection; one evaluation is
    worth n distance queries (n - 1 for the candidate's density, 1 for the
    distance itself)."""
    ds = oracle.dataset
    ds._check_index(i)
    rho = raw_densities(ds, kernel) if profile is None else np.asarray(profile, dtype=float)
    values = np.where(higher_mask(rho, i), ds.distances_from(i), math.inf)
    return SearchProblem(values, charge_per_eval=ds.n)


def quantum_nearest_higher(
    oracle: DistanceOracle,
    kernel: Kernel,
    i: int,
    config: QmfConfig,
    rng: Optional[np.random.Generator] = None,
    profile: Optional[np.ndarray] = None,
) -> Tuple[Optional[int], float, QmfResult]:
    """Nearest-higher of i found by simulated quantum minimum finding.

    Charges (n - 1) distance queries to fix rho(x_i), then n per Grover
    round, all on the ledger's quantum counter; charged_queries on the
    returned result equals that total exactly.  Returns (None, inf, result)
    when the search ends on an infinite objective value (the global maximum,
    or a failed run that never left its random threshold).
    """
    n = oracle.n
    problem = nearest_higher_problem(oracle, kernel, i, profile)
    res = qmf_minimum(problem, config, rng)
    charged = (n - 1) + n * res.grover_iterations
    oracle.ledger.charge_quantum(charged)
    res = dataclasses.replace(res, charged_queries=charged)
    val = problem.value(res.argmin_candidate)
    if math.isinf(val):
        return None, math.inf, res
    return res.argmin_candidate, val, res


@dataclass(frozen=True)
class QuantumDecisionOutcome:
    same_cluster: bool
    root_i: Optional[int]
    root_j: Optional[int]
    nearest_higher_calls: int
    grover_iterations: int
    charged_queries: int


def quantum_decide(
    oracle: DistanceOracle,
    kernel: Kernel,
    thresholds: Thresholds,
    i: int,
    j: int,
    epsilon: float,
    config: Optional[QmfConfig] = None,
    rng: Optional[np.random.Generator] = None,
    profile: Optional[np.ndarray] = None,
) -> QuantumDecisionOutcome:
    """Decision clustering with quantum nearest-higher walks.

    The walk length is unknown in advance, so the k-th nearest-higher call
    (k = 0, 1, ...) runs at failure budget epsilon / 2**(k+2); the budgets
    sum below epsilon for chains of any length.  Semantics mirror
    decide_same_cluster: outlier endpoints and outlier terminators decide
    no, i == j decides yes iff i is not an outlier with no walk beyond its
    classification.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    oracle.dataset._check_index(i)
    oracle.dataset._check_index(j)
    if config is None:
        config = QmfConfig(epsilon=epsilon)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    rho = raw_densities(oracle.dataset, kernel) if profile is None else np.asarray(profile)

    start_quantum = oracle.ledger.quantum_queries
    state = {"k": 0, "rounds": 0}

    def call(idx: int) -> Tuple[Optional[int], float]:
        eps_k = epsilon / 2 ** (state["k"] + 2)
        state["k"] += 1
        cfg = dataclasses.replace(config, epsilon=eps_k)
        child = np.random.default_rng(int(rng.integers(0, 2**63 - 1)))
        h, d, res = quantum_nearest_higher(oracle, kernel, idx, cfg, child, profile=rho)
        state["rounds"] += res.grover_iterations
        return h, d

    def walk(idx: int, h: Optional[int], d: float) -> int:
        cur = idx
        while d <= thresholds.delta_c and h is not None:
            cur = h
            h, d = call(cur)
        return cur

    def outcome(same, root_i, root_j):
        return QuantumDecisionOutcome(
            same,
            root_i,
            root_j,
            state["k"],
            state["rounds"],
            oracle.ledger.quantum_queries - start_quantum,
        )

    def standout_root(idx: int, delta: float) -> Optional[int]:
        return idx if delta > thresholds.delta_c else None

    h_i, d_i = call(i)
    out_i = rho[i] < thresholds.rho_c and d_i > thresholds.delta_c
    if i == j:
        r = standout_root(i, d_i)
        return outcome(not out_i, r, r)
    if out_i:
        return outcome(False, i, None)

    h_j, d_j = call(j)
    out_j = rho[j] < thresholds.rho_c and d_j > thresholds.delta_c
    if out_j:
        return outcome(False, standout_root(i, d_i), j)

    t_i = walk(i, h_i, d_i)
    t_j = walk(j, h_j, d_j)
    same = t_i == t_j and bool(rho[t_i] >= thresholds.rho_c)
    return outcome(same, t_i, t_j)

"""Experiment harness: tree-height and nearest-neighbour scaling, power-law
fits, and classical-vs-quantum decision benchmarks.

Every experiment is a pure function of its parameters and a master seed:
each (family, d, n, run) cell derives a private stream, so results do not
depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .data import (
    Dataset,
    DistanceOracle,
    QueryLedger,
    derive_seed,
    generate_gaussian_mixture,
    generate_uniform_ball,
)
from .decision import decide_same_cluster
from .dpc import Kernel, Thresholds, build_forest, raw_densities, tree_heights
from .qmf import QmfConfig, quantum_decide

FAMILIES = ("uniform", "gaussian")

DEFAULT_N_GRID = (256, 512, 1024, 2048, 4096, 8192)

_REFERENCE_SUBSAMPLE = 32
_CUTOFF_MULTIPLE = 2.0


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    d_eff: float
    r_squared: float


def fit_power_law(points: Sequence[Tuple[float, float]]) -> FitResult:
    """Least-squares line through (log n, log value).

    d_eff is the inverse slope, the effective dimension when the value is a
    tree height; it is finite only for positive slopes.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points to fit, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("power-law fits need positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    d_eff = math.inf if slope == 0 else 1.0 / slope
    return FitResult(float(slope), float(intercept), float(d_eff), r2)


def fit_to_json(family: str, d: int, fit: FitResult) -> dict:
    return {
        "family": family,
        "d": d,
        "slope": fit.slope,
        "d_eff": fit.d_eff,
        "r2": fit.r_squared,
    }


def _generate(family: str, n: int, d: int, seed: int) -> Dataset:
    if family == "uniform":
        return generate_uniform_ball(n, d, seed=seed)
    if family == "gaussian":
        return generate_gaussian_mixture(n, d, seed=seed)
    raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")


def subsample_cutoff(dataset: Dataset, seed: int) -> float:
    """Default d_c for scaling runs: twice the mean nearest-neighbour distance
    of a fixed-size reference subsample.

    The subsample size is fixed (not a fraction of n) on purpose: the
    statistic then measures the dataset's macroscopic scale independently of
    n, so the kernel keeps resolving the global density profile as the grid
    grows instead of collapsing to the noise scale.
    """
    n = dataset.n
    s = min(n, _REFERENCE_SUBSAMPLE)
    if s < 2:
        raise ValueError("cutoff estimation needs at least 2 points")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=s, replace=False)
    sub = dataset.coords[idx]
    diffs = np.sqrt(((sub[:, None, :] - sub[None, :, :]) ** 2).sum(axis=-1))
    np.fill_diagonal(diffs, math.inf)
    return _CUTOFF_MULTIPLE * float(diffs.min(axis=1).mean())


@dataclass(frozen=True)
class HeightScalingEntry:
    family: str
    d: int
    n: int
    mean_height: float
    runs: int
    heights: Tuple[int, ...]
    cutoffs: Tuple[float, ...]


@dataclass(frozen=True)
class HeightScalingReport:
    entries: Tuple[HeightScalingEntry, ...]
    fit: Optional[FitResult]


def _height_cell(family: str, d: int, n: int, run: int, seed: int, d_c: Optional[float]):
    cell_seed = derive_seed(seed, FAMILIES.index(family), d, n, run)
    dataset = _generate(family, n, d, cell_seed)
    cutoff = d_c if d_c is not None else subsample_cutoff(dataset, derive_seed(cell_seed, 1))
    kernel = Kernel("gaussian", cutoff)
    forest = build_forest(DistanceOracle(dataset, QueryLedger(memoized=False)), kernel)
    _, height = tree_heights(forest)
    return height, cutoff


def height_scaling(
    family: str,
    d: int,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    runs: int = 5,
    seed: int = 0,
    d_c: Optional[float] = None,
    threads: int = 1,
) -> HeightScalingReport:
    """Mean tallest-tree height per dataset size, with a power-law fit.

    Every (n, run) cell owns a derived stream and, unless d_c is pinned, its
    own subsample-estimated kernel cutoff; the chosen cutoffs are recorded in
    the entries.  The fit is omitted for grids with fewer than 2 sizes.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    if runs < 1:
        raise ValueError(f"need runs >= 1, got {runs}")
    if not n_grid:
        raise ValueError("n_grid must not be empty")
    cells = [(n, run) for n in n_grid for run in range(runs)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda c: _height_cell(family, d, c[0], c[1], seed, d_c), cells)
            )
    else:
        results = [_height_cell(family, d, n, run, seed, d_c) for n, run in cells]
    by_cell = dict(zip(cells, results))
    entries = []
    for n in n_grid:
        hs = tuple(by_cell[(n, run)][0] for run in range(runs))
        cuts = tuple(by_cell[(n, run)][1] for run in range(runs))
        entries.append(
            HeightScalingEntry(family, d, int(n), sum(hs) / runs, runs, hs, cuts)
        )
    fit = None
    if len(n_grid) >= 2:
        fit = fit_power_law([(e.n, e.mean_height) for e in entries])
    return HeightScalingReport(tuple(entries), fit)


def write_height_report_csv(path, report: HeightScalingReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "d", "n", "run_count", "mean_H"])
        for e in report.entries:
            writer.writerow([e.family, e.d, e.n, e.runs, repr(e.mean_height)])


def write_height_long_csv(path, report: HeightScalingReport) -> None:
    """Plot-ready long format: one row per run, with the cutoff used."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "d", "n", "run", "height", "d_c"])
        for e in report.entries:
            for run, (h, cut) in enumerate(zip(e.heights, e.cutoffs)):
                writer.writerow([e.family, e.d, e.n, run, h, repr(cut)])


@dataclass(frozen=True)
class NnScalingReport:
    entries: Tuple[Tuple[int, float], ...]  # (n, mean nearest-neighbour distance)
    fit: Optional[FitResult]


def _mean_nn_distance(dataset: Dataset) -> float:
    total = 0.0
    for i in range(dataset.n):
        row = dataset.distances_from(i)
        row[i] = math.inf
        total += row.min()
    return total / dataset.n


def nn_scaling(
    family: str,
    d: int,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    runs: int = 5,
    seed: int = 0,
    threads: int = 1,
) -> NnScalingReport:
    """Mean nearest-neighbour distance per dataset size; slope approaches -1/d."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    if runs < 1:
        raise ValueError(f"need runs >= 1, got {runs}")
    if not n_grid:
        raise ValueError("n_grid must not be empty")

    def cell(n: int, run: int) -> float:
        cell_seed = derive_seed(seed, FAMILIES.index(family), d, n, run)
        return _mean_nn_distance(_generate(family, n, d, cell_seed))

    cells = [(n, run) for n in n_grid for run in range(runs)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(lambda c: cell(*c), cells))
    else:
        values = [cell(n, run) for n, run in cells]
    by_cell = dict(zip(cells, values))
    entries = tuple(
        (int(n), sum(by_cell[(n, run)] for run in range(runs)) / runs) for n in n_grid
    )
    fit = fit_power_law(entries) if len(n_grid) >= 2 else None
    return NnScalingReport(entries, fit)


@dataclass(frozen=True)
class BenchmarkRow:
    i: int
    j: int
    same_cluster: bool
    classical_queries: int
    quantum_mean_charged: float
    quantum_mean_rounds: float
    agreement_rate: float
    repeats: int


@dataclass(frozen=True)
class BenchmarkReport:
    n: int
    rows: Tuple[BenchmarkRow, ...]
    classical_queries_mean: float
    quantum_charged_mean: float
    agreement_rate: float
    quantum_below_classical: bool


def decision_benchmark(
    dataset: Dataset,
    pairs: Sequence[Tuple[int, int]],
    kernel: Kernel,
    thresholds: Thresholds,
    epsilon: float = 0.1,
    repeats: int = 5,
    seed: int = 0,
    config: Optional[QmfConfig] = None,
) -> BenchmarkReport:
    """Classical decision queries vs quantum-walk charged queries, per pair.

    The classical side runs once per pair on a fresh memoized oracle (its
    count is deterministic); the quantum side repeats with derived streams
    and reports mean charged queries and agreement with the classical
    verdict.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    if repeats < 1:
        raise ValueError(f"need repeats >= 1, got {repeats}")
    cfg = config if config is not None else QmfConfig(epsilon=epsilon)
    profile = raw_densities(dataset, kernel)
    rows: List[BenchmarkRow] = []
    for p, (i, j) in enumerate(pairs):
        oracle = DistanceOracle(dataset, QueryLedger(memoized=True))
        classical = decide_same_cluster(oracle, kernel, thresholds, i, j)
        charged = []
        rounds = []
        agree = 0
        for rep in range(repeats):
            rng = np.random.default_rng(derive_seed(seed, p, rep))
            q_oracle = DistanceOracle(dataset, QueryLedger())
            out = quantum_decide(
                q_oracle, kernel, thresholds, i, j, epsilon, cfg, rng, profile=profile
            )
            charged.append(out.charged_queries)
            rounds.append(out.grover_iterations)
            agree += out.same_cluster == classical.same_cluster
        rows.append(
            BenchmarkRow(
                i,
                j,
                classical.same_cluster,
                classical.classical_queries,
                sum(charged) / repeats,
                sum(rounds) / repeats,
                agree / repeats,
                repeats,
            )
        )
    classical_mean = sum(r.classical_queries for r in rows) / len(rows)
    quantum_mean = sum(r.quantum_mean_charged for r in rows) / len(rows)
    agreement = sum(r.agreement_rate for r in rows) / len(rows)
    return BenchmarkReport(
        dataset.n,
        tuple(rows),
        classical_mean,
        quantum_mean,
        agreement,
        quantum_mean < classical_mean,
    )


def write_benchmark_csv(path, report: BenchmarkReport) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "i",
                "j",
                "same_cluster",
                "classical_queries",
                "quantum_mean_charged",
                "quantum_mean_rounds",
                "agreement_rate",
                "repeats",
            ]
        )
        for r in report.rows:
            writer.writerow(
                [
                    r.i,
                    r.j,
                    int(r.same_cluster),
                    r.classical_queries,
                    repr(r.quantum_mean_charged),
                    repr(r.quantum_mean_rounds),
                    repr(r.agreement_rate),
                    r.repeats,
                ]
            )

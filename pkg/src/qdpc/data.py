"""Datasets, counted distance oracles, and dataset plumbing.

The distance oracle is the complexity model of record: algorithms in this
package only see points through :class:`DistanceOracle`, and every pairwise
distance they request is charged to a :class:`QueryLedger`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class ParseError(ValueError):
    """Raised when a delimited text file does not match the declared schema."""


def _euclidean_row(coords: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum((coords - x) ** 2, axis=1))


def _manhattan_row(coords: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(coords - x), axis=1)


def _chebyshev_row(coords: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.max(np.abs(coords - x), axis=1)


_METRIC_ROWS = {
    "euclidean": _euclidean_row,
    "manhattan": _manhattan_row,
    "chebyshev": _chebyshev_row,
}

METRICS = tuple(sorted(_METRIC_ROWS))


@dataclass(frozen=True)
class Dataset:
    """Immutable indexed point collection with a fixed metric.

    Points are identified by row index; ids are exactly 0..n-1 with no gaps.
    ``coords`` is an (n, d) float array, frozen after construction.  Geometry
    accessed directly on the dataset is *not* query-counted; use a
    :class:`DistanceOracle` for counted access.
    """

    coords: np.ndarray
    metric: str = "euclidean"

    def __post_init__(self):
        coords = np.ascontiguousarray(np.asarray(self.coords, dtype=float))
        if coords.ndim != 2:
            raise ValueError(f"coords must be 2-d, got shape {coords.shape}")
        n, d = coords.shape
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coords must be finite")
        if self.metric not in _METRIC_ROWS:
            raise ValueError(f"unknown metric {self.metric!r}; choose from {METRICS}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"point index {i} out of range for n={self.n}")

    def pair_distance(self, i: int, j: int) -> float:
        """Metric distance between points i and j (uncounted)."""
        self._check_index(i)
        self._check_index(j)
        row = _METRIC_ROWS[self.metric]
        return float(row(self.coords[j : j + 1], self.coords[i])[0])

    def distances_from(self, i: int) -> np.ndarray:
        """Length-n vector of distances from point i to every point (uncounted)."""
        self._check_index(i)
        return _METRIC_ROWS[self.metric](self.coords, self.coords[i])

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "points": self.coords.tolist()}


def dataset_from_json(obj: dict, metric: str = "euclidean") -> Dataset:
    try:
        points = obj["points"]
    except (TypeError, KeyError):
        raise ParseError("dataset JSON must contain a 'points' key")
    try:
        coords = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"dataset JSON points are not numeric: {exc}")
    ds = Dataset(coords, metric)
    if "n" in obj and int(obj["n"]) != ds.n:
        raise ParseError(f"dataset JSON claims n={obj['n']} but has {ds.n} points")
    if "d" in obj and int(obj["d"]) != ds.d:
        raise ParseError(f"dataset JSON claims d={obj['d']} but points have d={ds.d}")
    return ds


def load_dataset_json(path, metric: str = "euclidean") -> Dataset:
    with open(path) as fh:
        return dataset_from_json(json.load(fh), metric)


def save_dataset_json(path, dataset: Dataset) -> None:
    with open(path, "w") as fh:
        json.dump(dataset.to_json(), fh)
        fh.write("\n")


def save_dataset_csv(path, dataset: Dataset, delimiter: str = ",") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        for row in dataset.coords:
            writer.writerow([repr(float(v)) for v in row])


@dataclass
class QueryLedger:
    """Counts distance-oracle queries: the quantity every complexity claim is about.

    Counters only increase.  With ``memoized`` set, each unordered pair (i, j),
    i != j, is charged at most once over the ledger's lifetime; (i, j) and
    (j, i) share one cache slot.  Ledgers are not thread-safe: give each
    worker its own ledger and :meth:`merge` them afterwards.
    """

    memoized: bool = False
    classical_queries: int = 0
    quantum_queries: int = 0
    _memo: dict = field(default_factory=dict, repr=False)

    def charge_classical(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("cannot charge a negative query count")
        self.classical_queries += k

    def charge_quantum(self, k: int = 1) -> None:
        if k < 0:
            raise ValueError("cannot charge a negative query count")
        self.quantum_queries += k

    def cache_get(self, i: int, j: int) -> Optional[float]:
        if i > j:
            i, j = j, i
        return self._memo.get((i, j))

    def cache_put(self, i: int, j: int, value: float) -> None:
        if i > j:
            i, j = j, i
        self._memo[(i, j)] = value

    def merge(self, other: "QueryLedger") -> None:
        """Fold another worker's ledger into this one (counters add)."""
        self.classical_queries += other.classical_queries
        self.quantum_queries += other.quantum_queries
        self._memo.update(other._memo)


@dataclass
class DistanceOracle:
    """Black-box distance access with exact query accounting.

    Self-distances are known a priori (always zero) and are never charged.
    """

    dataset: Dataset
    ledger: QueryLedger = field(default_factory=QueryLedger)

    @property
    def n(self) -> int:
        return self.dataset.n

    def distance(self, i: int, j: int) -> float:
        self.dataset._check_index(i)
        self.dataset._check_index(j)
        if i == j:
            return 0.0
        if self.ledger.memoized:
            hit = self.ledger.cache_get(i, j)
            if hit is not None:
                return hit
            value = self.dataset.pair_distance(i, j)
            self.ledger.cache_put(i, j, value)
            self.ledger.charge_classical(1)
            return value
        self.ledger.charge_classical(1)
        return self.dataset.pair_distance(i, j)

    def distances_from(self, i: int) -> np.ndarray:
        """Counted bulk query: the full distance row of point i.

        Charges one query per previously uncharged pair (i, j), j != i; with
        memoization off that is always n - 1.
        """
        row = self.dataset.distances_from(i)
        if self.ledger.memoized:
            fresh = 0
            for j in range(self.n):
                if j == i:
                    continue
                if self.ledger.cache_get(i, j) is None:
                    self.ledger.cache_put(i, j, float(row[j]))
                    fresh += 1
            self.ledger.charge_classical(fresh)
        else:
            self.ledger.charge_classical(self.n - 1)
        return row


def generate_uniform_ball(
    n: int, d: int, radius: float = 1.0, seed: int = 0, metric: str = "euclidean"
) -> Dataset:
    """Sample n points i.i.d. uniform in the d-ball of the given radius.

    Isotropic Gaussian directions scaled by radius * U**(1/d) give exact
    uniformity in the ball.  Output is a pure function of (n, d, radius, seed).
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1)
    norms[norms == 0] = 1.0
    r = radius * rng.random(n) ** (1.0 / d)
    return Dataset(z / norms[:, None] * r[:, None], metric)


_COV_SCALE = 4.0
_COV_RIDGE = 1e-3


def generate_gaussian_mixture(
    n: int,
    d: int,
    k: int = 10,
    box: float = 100.0,
    seed: int = 0,
    covariance: str = "random",
    metric: str = "euclidean",
) -> Dataset:
    """Sample a k-component Gaussian mixture with centroids uniform in [0, box]^d.

    Each component draws a random SPD covariance s * (A A^T + d * 1e-3 * I)
    with A entrywise uniform on [0, 1] and s = 4, so clusters stay small
    relative to the default box.  ``covariance="identity"`` forces the unit
    covariance instead.  Points land in contiguous per-component blocks;
    component c gets n // k points plus one of the first n % k remainders.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if box < 0:
        raise ValueError(f"box must be non-negative, got {box}")
    if covariance not in ("random", "identity"):
        raise ValueError(f"covariance must be 'random' or 'identity', got {covariance!r}")
    rng = np.random.default_rng(seed)
    centroids = rng.uniform(0.0, box, (k, d)) if box > 0 else np.zeros((k, d))
    counts = [n // k + (1 if c < n % k else 0) for c in range(k)]
    blocks = []
    for c in range(k):
        if covariance == "identity":
            chol = np.eye(d)
        else:
            a = rng.uniform(0.0, 1.0, (d, d))
            cov = _COV_SCALE * (a @ a.T + d * _COV_RIDGE * np.eye(d))
            chol = np.linalg.cholesky(cov)
        z = rng.standard_normal((counts[c], d))
        blocks.append(centroids[c] + z @ chol.T)
    return Dataset(np.vstack(blocks), metric)


def _resolve_column(spec, names: Optional[list], what: str) -> int:
    if isinstance(spec, int):
        return spec
    if names is None:
        raise ParseError(f"{what} given by name {spec!r} but the file has no header")
    try:
        return names.index(spec)
    except ValueError:
        raise ParseError(f"{what} {spec!r} not found in header {names}")


def load_csv(
    path,
    delimiter: str = ",",
    header: bool = False,
    id_column=None,
    columns: Optional[Sequence] = None,
    metric: str = "euclidean",
) -> Dataset:
    """Read one point per row from a delimited text file.

    With ``header`` the first row names the columns, and ``id_column`` or
    entries of ``columns`` may be given by name instead of position.  Any id
    column is dropped; ids are re-assigned 0..n-1 in row order.  When
    ``columns`` is given, the selection order is kept; otherwise the file's
    column order is preserved.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    names = None
    if header:
        if not rows:
            raise ParseError("empty file: header expected")
        names = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise ParseError("no data rows")

    width = len(rows[0][1])
    if columns is not None:
        keep = [_resolve_column(c, names, "column") for c in columns]
    else:
        keep = list(range(width))
    if id_column is not None:
        drop = _resolve_column(id_column, names, "id column")
        keep = [c for c in keep if c != drop]
    if not keep:
        raise ParseError("no columns selected")

    data = np.empty((len(rows), len(keep)), dtype=float)
    for r, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row {lineno}: expected {width} fields, got {len(row)}")
        for c, col in enumerate(keep):
            if col >= width:
                raise ParseError(f"row {lineno}: column {col} out of range")
            cell = row[col].strip()
            try:
                data[r, c] = float(cell)
            except ValueError:
                raise ParseError(f"row {lineno}: non-numeric value {cell!r} in column {col}")
    return Dataset(data, metric)


def standardize(dataset: Dataset) -> Dataset:
    """Shift each column to zero mean and unit population variance.

    Zero-variance columns map to all zeros rather than dividing by zero.
    """
    if dataset.n < 2:
        raise ValueError("standardize needs at least 2 points")
    coords = dataset.coords
    mean = coords.mean(axis=0)
    std = coords.std(axis=0)
    return Dataset((coords - mean) / np.where(std > 0, std, 1.0), dataset.metric)


def pca_project(dataset: Dataset, k: int) -> Dataset:
    """Project onto the top-k principal axes of the d x d covariance.

    Components are ordered by non-increasing eigenvalue.  Each eigenvector's
    sign is fixed so its largest-magnitude entry is positive, which makes the
    projection deterministic.
    """
    if not 1 <= k <= dataset.d:
        raise ValueError(f"need 1 <= k <= d={dataset.d}, got k={k}")
    centered = dataset.coords - dataset.coords.mean(axis=0)
    cov = centered.T @ centered / dataset.n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals, kind="stable")
    basis = eigvecs[:, order[:k]]
    for c in range(basis.shape[1]):
        lead = int(np.argmax(np.abs(basis[:, c])))
        if basis[lead, c] < 0:
            basis[:, c] = -basis[:, c]
    return Dataset(centered @ basis, dataset.metric)


def explained_variance(dataset: Dataset) -> np.ndarray:
    """Fraction of total variance carried by each principal axis, descending."""
    centered = dataset.coords - dataset.coords.mean(axis=0)
    cov = centered.T @ centered / dataset.n
    eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
    total = eigvals.sum()
    if total <= 0:
        return np.zeros_like(eigvals)
    return eigvals / total


def derive_seed(master: int, *tags: int) -> int:
    """Deterministic child seed for (master, tags); used to give every
    experiment cell its own private stream."""
    ss = np.random.SeedSequence([int(master), *(int(t) & 0xFFFFFFFF for t in tags)])
    return int(ss.generate_state(1)[0])

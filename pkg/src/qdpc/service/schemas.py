"""Request / response models of the HTTP service.

Responses carry the same JSON shapes the library exports to files, so a thin
client can write service output straight to disk.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field


class DatasetPayload(BaseModel):
    n: int
    d: int
    points: List[List[float]]
    metric: Literal["euclidean", "manhattan", "chebyshev"] = "euclidean"


class KernelSpec(BaseModel):
    kind: Literal["step", "gaussian"]
    d_c: float = Field(gt=0)


class GenerateRequest(BaseModel):
    family: Literal["uniform", "gaussian"]
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    seed: int
    radius: float = 1.0
    k: int = 10
    box: float = 100.0
    covariance: Literal["random", "identity"] = "random"


class GenerateResponse(BaseModel):
    dataset: DatasetPayload


class ClusterRequest(BaseModel):
    dataset: DatasetPayload
    kernel: KernelSpec
    rho_c: float
    delta_c: float = Field(gt=0)


class ClusterResponse(BaseModel):
    parent: List[Optional[int]]
    delta: List[Union[float, Literal["inf"]]]
    rho: List[float]
    labels: List[Union[int, Literal["noise"]]]
    roots: List[int]
    outliers: List[int]
    classical_queries: int


class DecideRequest(BaseModel):
    dataset: DatasetPayload
    i: int = Field(ge=0)
    j: int = Field(ge=0)
    kernel: KernelSpec
    rho_c: float
    delta_c: float = Field(gt=0)


class DecideResponse(BaseModel):
    same_cluster: bool
    root_i: Optional[int]
    root_j: Optional[int]
    classical_queries: int


class QDecideRequest(BaseModel):
    dataset: DatasetPayload
    i: int = Field(ge=0)
    j: int = Field(ge=0)
    kernel: KernelSpec
    rho_c: float
    delta_c: float = Field(gt=0)
    epsilon: float = Field(gt=0, lt=1, default=0.1)
    seed: int = 0
    repeats: int = Field(ge=1, default=100)
    cutoff_factor: float = Field(gt=0, default=22.5)
    growth: float = 8.0 / 7.0


class QuantumSummary(BaseModel):
    yes_rate: float
    agreement_rate: float
    mean_charged_queries: float
    mean_grover_iterations: float
    mean_nearest_higher_calls: float


class QDecideResponse(BaseModel):
    classical: DecideResponse
    quantum: QuantumSummary
    repeats: int


class HeightsRequest(BaseModel):
    family: Literal["uniform", "gaussian"]
    d: int = Field(ge=1)
    n_grid: List[int] = [256, 512, 1024, 2048, 4096, 8192]
    runs: int = Field(ge=1, default=5)
    seed: int = 0
    d_c: Optional[float] = Field(gt=0, default=None)
    threads: int = Field(ge=1, default=1)


class HeightEntry(BaseModel):
    family: str
    d: int
    n: int
    run_count: int
    mean_H: float


class HeightLongRow(BaseModel):
    family: str
    d: int
    n: int
    run: int
    height: int
    d_c: float


class FitPayload(BaseModel):
    family: str
    d: int
    slope: float
    d_eff: float
    r2: float
    intercept: float


class HeightsResponse(BaseModel):
    entries: List[HeightEntry]
    long: List[HeightLongRow]
    fit: Optional[FitPayload]


class FitRequest(BaseModel):
    points: List[Tuple[float, float]]
    family: str = "custom"
    d: int = 0


class QBenchRequest(BaseModel):
    dataset: Optional[DatasetPayload] = None
    family: Optional[Literal["uniform", "gaussian"]] = None
    n: Optional[int] = Field(ge=2, default=None)
    d: Optional[int] = Field(ge=1, default=None)
    pairs: Optional[List[Tuple[int, int]]] = None
    num_pairs: int = Field(ge=1, default=5)
    kernel: KernelSpec
    rho_c: float
    delta_c: float = Field(gt=0)
    epsilon: float = Field(gt=0, lt=1, default=0.1)
    repeats: int = Field(ge=1, default=5)
    seed: int = 0


class QBenchRow(BaseModel):
    i: int
    j: int
    same_cluster: bool
    classical_queries: int
    quantum_mean_charged: float
    quantum_mean_rounds: float
    agreement_rate: float
    repeats: int


class QBenchResponse(BaseModel):
    n: int
    rows: List[QBenchRow]
    classical_queries_mean: float
    quantum_charged_mean: float
    agreement_rate: float
    quantum_below_classical: bool


class ToyFixturePayload(BaseModel):
    rho: List[float]
    dist: List[List[float]]


class ToyRequest(BaseModel):
    runs: int = Field(ge=1, default=1000)
    seed: int = 0
    fixture: Optional[ToyFixturePayload] = None


class ToyRow(BaseModel):
    element: int
    quantum_mean: float
    classical_mean: float
    runs: int


class ToyResponse(BaseModel):
    rows: List[ToyRow]

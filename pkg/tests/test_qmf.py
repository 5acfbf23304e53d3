"""Minimum-finding simulation: trial statistics, budgets, charging, walks."""

import math

import numpy as np
import pytest

from qdpc.data import Dataset, DistanceOracle, QueryLedger
from qdpc.decision import decide_same_cluster
from qdpc.dpc import Kernel, Thresholds, build_forest, higher_mask, raw_densities
from qdpc.qmf import (
    QmfConfig,
    SearchProblem,
    bbht_search,
    grover_success_probability,
    grover_trial,
    nearest_higher_problem,
    qmf_minimum,
    quantum_decide,
    quantum_nearest_higher,
)

from test_dpc import TEN_KERNEL, TEN_POINTS, TEN_THRESHOLDS


class TestConfig:
    def test_defaults(self):
        cfg = QmfConfig()
        assert cfg.epsilon == 0.1
        assert cfg.growth == pytest.approx(8.0 / 7.0)
        assert cfg.cutoff_factor == 22.5

    def test_validation(self):
        with pytest.raises(ValueError):
            QmfConfig(epsilon=0.0)
        with pytest.raises(ValueError):
            QmfConfig(epsilon=1.0)
        with pytest.raises(ValueError):
            QmfConfig(growth=1.0)
        with pytest.raises(ValueError):
            QmfConfig(growth=4.0 / 3.0)
        with pytest.raises(ValueError):
            QmfConfig(cutoff_factor=0.0)


class TestSearchProblem:
    def test_marked_count_is_strict(self):
        p = SearchProblem([3.0, 1.0, 2.0, 1.0])
        assert p.marked_count(1.0) == 0
        assert p.marked_count(1.5) == 2
        assert p.marked_count(2.0) == 2
        assert p.marked_count(math.inf) == 4
        assert p.min_value() == 1.0

    def test_sample_marked_stays_in_prefix(self):
        p = SearchProblem([5.0, 1.0, 4.0, 2.0, 3.0])
        rng = np.random.default_rng(0)
        seen = {p.sample_marked(2, rng) for _ in range(50)}
        assert seen == {1, 3}   # the two smallest values
        assert p.sample_marked(1, rng) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            SearchProblem([])
        with pytest.raises(ValueError):
            SearchProblem([[1.0, 2.0]])
        with pytest.raises(ValueError):
            SearchProblem([1.0, math.nan])
        with pytest.raises(ValueError):
            SearchProblem([1.0], charge_per_eval=-1)
        with pytest.raises(ValueError):
            SearchProblem([1.0]).sample_marked(0, np.random.default_rng(0))

    def test_infinite_values_allowed(self):
        p = SearchProblem([math.inf, 2.0, math.inf])
        assert p.marked_count(math.inf) == 1
        assert p.min_value() == 2.0


class TestGroverStatistics:
    def test_success_probability_frozen_values(self):
        assert grover_success_probability(4, 1, 0) == pytest.approx(0.25)
        assert grover_success_probability(4, 1, 1) == pytest.approx(1.0)
        assert grover_success_probability(8, 1, 1) == pytest.approx(25.0 / 32.0)
        assert grover_success_probability(16, 16, 0) == pytest.approx(1.0)
        assert grover_success_probability(10, 0, 3) == 0.0

    def test_success_probability_validation(self):
        with pytest.raises(ValueError):
            grover_success_probability(0, 0, 0)
        with pytest.raises(ValueError):
            grover_success_probability(4, 5, 0)
        with pytest.raises(ValueError):
            grover_success_probability(4, 1, -1)

    def test_trial_round_range_and_t_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            r, ok = grover_trial(16, 0, 3.7, rng)
            assert 0 <= r < 4
            assert ok is False
        with pytest.raises(ValueError):
            grover_trial(16, 1, 0.5, rng)

    def test_trial_frequency_matches_model(self):
        # n=4, t=1, m=2: p = (sin^2(pi/6) + sin^2(pi/2)) / 2 = 0.625
        rng = np.random.default_rng(7)
        hits = sum(grover_trial(4, 1, 2.0, rng)[1] for _ in range(20000))
        assert hits / 20000 == pytest.approx(0.625, abs=0.02)


class TestBbhtSearch:
    def test_finds_strict_improver(self):
        p = SearchProblem([9.0, 4.0, 6.0, 1.0, 7.0])
        cfg = QmfConfig()
        rng = np.random.default_rng(5)
        idx, used = bbht_search(p, 6.0, cfg, rng, budget=200)
        assert idx in (1, 3)
        assert p.value(idx) < 6.0
        assert 0 <= used <= 200 + math.isqrt(5) + 1

    def test_no_marked_exhausts_budget(self):
        p = SearchProblem([2.0, 2.0, 2.0, 2.0])
        rng = np.random.default_rng(11)
        idx, used = bbht_search(p, 2.0, QmfConfig(), rng, budget=50)
        assert idx is None
        assert used >= 50

    def test_seeded_determinism(self):
        p = SearchProblem(np.arange(32.0))
        out1 = bbht_search(p, 16.0, QmfConfig(), np.random.default_rng(9), 100)
        out2 = bbht_search(p, 16.0, QmfConfig(), np.random.default_rng(9), 100)
        assert out1 == out2


class TestQmfMinimum:
    def test_single_element_fast_path(self):
        res = qmf_minimum(SearchProblem([4.2]), QmfConfig())
        assert res.argmin_candidate == 0
        assert res.grover_iterations == 0
        assert res.charged_queries == 0
        assert res.success is True
        assert res.threshold_trace == (0,)

    def test_finds_minimum_of_permutation(self):
        rng = np.random.default_rng(1)
        values = rng.permutation(64).astype(float)
        res = qmf_minimum(SearchProblem(values), QmfConfig(seed=14))
        assert res.success is True
        assert values[res.argmin_candidate] == 0.0

    def test_charging_is_per_eval_times_rounds(self):
        values = np.random.default_rng(2).permutation(50).astype(float)
        res = qmf_minimum(SearchProblem(values, charge_per_eval=7), QmfConfig(seed=3))
        assert res.charged_queries == 7 * res.grover_iterations

    def test_trace_values_strictly_decrease(self):
        values = np.random.default_rng(4).permutation(40).astype(float)
        res = qmf_minimum(SearchProblem(values), QmfConfig(seed=8))
        vals = [values[idx] for idx in res.threshold_trace]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        if res.success:
            assert vals[-1] == 0.0

    def test_seed_determinism(self):
        values = np.random.default_rng(6).permutation(30).astype(float)
        a = qmf_minimum(SearchProblem(values), QmfConfig(seed=77))
        b = qmf_minimum(SearchProblem(values), QmfConfig(seed=77))
        assert a == b

    def test_budget_burn_after_convergence(self):
        # repeats = ceil(log2(1/0.1)) = 4; each repeat spends at least the
        # per-run budget even when the minimum is found early
        n = 36
        values = np.random.default_rng(5).permutation(n).astype(float)
        cfg = QmfConfig(epsilon=0.1, seed=21)
        res = qmf_minimum(SearchProblem(values), cfg)
        budget = math.ceil(cfg.cutoff_factor * math.sqrt(n))
        assert res.grover_iterations >= 4 * budget
        assert res.grover_iterations <= 4 * (budget + math.ceil(math.sqrt(n)))

    def test_longer_budget_never_loses_a_seed(self):
        # repeat substreams are drawn up front, so raising the round budget
        # keeps every success a success
        values = np.random.default_rng(13).permutation(128).astype(float)
        problem = SearchProblem(values)
        for seed in range(25):
            outcomes = [
                qmf_minimum(problem, QmfConfig(cutoff_factor=c, seed=seed)).success
                for c in (5.0, 10.0, 22.5)
            ]
            for lo, hi in zip(outcomes, outcomes[1:]):
                assert (not lo) or hi, (seed, outcomes)


class TestNearestHigherProblem:
    def test_objective_values(self):
        ds = Dataset(TEN_POINTS)
        oracle = DistanceOracle(ds)
        profile = raw_densities(ds, TEN_KERNEL)
        problem = nearest_higher_problem(oracle, TEN_KERNEL, 1, profile=profile)
        assert problem.charge_per_eval == ds.n
        mask = higher_mask(profile, 1)
        row = ds.distances_from(1)
        for j in range(ds.n):
            if mask[j]:
                assert problem.value(j) == pytest.approx(row[j])
            else:
                assert math.isinf(problem.value(j))

    def test_global_max_objective_all_infinite(self):
        ds = Dataset(TEN_POINTS)
        problem = nearest_higher_problem(DistanceOracle(ds), TEN_KERNEL, 4)
        assert math.isinf(problem.min_value())


class TestQuantumNearestHigher:
    def test_matches_classical_on_success(self):
        ds = Dataset(TEN_POINTS)
        forest = build_forest(DistanceOracle(ds, QueryLedger(memoized=True)), TEN_KERNEL)
        oracle = DistanceOracle(ds)
        hits = 0
        for seed in range(30):
            h, delta, res = quantum_nearest_higher(
                oracle, TEN_KERNEL, 8, QmfConfig(seed=seed)
            )
            if res.success:
                hits += 1
                assert h == forest.parent[8]
                assert delta == pytest.approx(forest.delta[8])
        assert hits >= 27   # epsilon = 0.1

    def test_charges_density_plus_rounds(self):
        ds = Dataset(TEN_POINTS)
        oracle = DistanceOracle(ds)
        _, _, res = quantum_nearest_higher(oracle, TEN_KERNEL, 3, QmfConfig(seed=2))
        assert res.charged_queries == (ds.n - 1) + ds.n * res.grover_iterations
        assert oracle.ledger.quantum_queries == res.charged_queries
        assert oracle.ledger.classical_queries == 0

    def test_global_max_returns_absent(self):
        ds = Dataset(TEN_POINTS)
        h, delta, res = quantum_nearest_higher(
            DistanceOracle(ds), TEN_KERNEL, 4, QmfConfig(seed=0)
        )
        assert h is None
        assert math.isinf(delta)


class TestQuantumDecide:
    def _outcome(self, i, j, seed, epsilon=0.05):
        ds = Dataset(TEN_POINTS)
        oracle = DistanceOracle(ds)
        return quantum_decide(
            oracle, TEN_KERNEL, TEN_THRESHOLDS, i, j, epsilon,
            rng=np.random.default_rng(seed),
        )

    def test_agreement_with_classical(self):
        pairs = [(0, 3), (1, 2), (0, 4), (8, 0), (5, 6), (9, 2)]
        agree = 0
        total = 0
        for i, j in pairs:
            classical = decide_same_cluster(
                DistanceOracle(Dataset(TEN_POINTS), QueryLedger(memoized=True)),
                TEN_KERNEL, TEN_THRESHOLDS, i, j,
            )
            for seed in range(10):
                total += 1
                agree += self._outcome(i, j, seed).same_cluster == classical.same_cluster
        assert agree / total >= 0.9

    def test_diagonal_and_outlier_semantics(self):
        out = self._outcome(4, 4, seed=1)
        assert out.same_cluster is True
        assert (out.root_i, out.root_j) == (4, 4)
        assert out.nearest_higher_calls == 1

        out = self._outcome(9, 9, seed=1)
        assert out.same_cluster is False
        assert (out.root_i, out.root_j) == (9, 9)

        out = self._outcome(8, 0, seed=1)
        assert out.same_cluster is False
        assert out.root_i == 8
        assert out.root_j is None   # j never inspected after the short-circuit
        assert out.nearest_higher_calls == 1

    def test_charged_queries_on_ledger(self):
        ds = Dataset(TEN_POINTS)
        oracle = DistanceOracle(ds)
        out = quantum_decide(
            oracle, TEN_KERNEL, TEN_THRESHOLDS, 3, 7, 0.1,
            rng=np.random.default_rng(5),
        )
        assert oracle.ledger.quantum_queries == out.charged_queries
        assert out.charged_queries >= out.nearest_higher_calls * (ds.n - 1)
        assert oracle.ledger.classical_queries == 0

    def test_epsilon_validation(self):
        with pytest.raises(ValueError):
            self._outcome(0, 1, seed=0, epsilon=0.0)
        with pytest.raises(ValueError):
            self._outcome(0, 1, seed=0, epsilon=1.0)

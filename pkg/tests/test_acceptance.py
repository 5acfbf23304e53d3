"""Release gate: every guaranteed behavior checked at its stated tolerance.

Each test prints one [PASS] or [FAIL] line (visible with -s) and then
asserts, so a red run still reports every criterion it reached.  Runtime
ceilings are part of the contract and are asserted alongside the values.
"""

import math
import time

import numpy as np

from qdpc.data import (
    Dataset,
    DistanceOracle,
    QueryLedger,
    derive_seed,
    generate_gaussian_mixture,
    generate_uniform_ball,
)
from qdpc.decision import decide_same_cluster
from qdpc.dpc import (
    NOISE,
    Kernel,
    Thresholds,
    assign_clusters,
    build_forest,
    raw_densities,
)
from qdpc.qmf import (
    QmfConfig,
    SearchProblem,
    grover_success_probability,
    grover_trial,
    qmf_minimum,
    quantum_nearest_higher,
)
from qdpc.scaling import fit_power_law, height_scaling
from qdpc.statevector import (
    grover_round,
    marked_probability_after_round,
    measurement_probabilities,
    uniform_state,
)
from qdpc.toy import load_toy_fixture, toy_experiment

HEIGHT_GRID = (256, 512, 1024, 2048, 4096, 8192)


def _line(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] acceptance {num} {name}: {detail}")


def chain_terminators(forest, delta_c: float) -> np.ndarray:
    """First standout element (delta > delta_c) on each parent chain.

    Memoized array walk over the forest links; identical to running the
    pairwise decision walk from every element.
    """
    n = forest.n
    term = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        path = []
        cur = i
        while term[cur] < 0 and forest.delta[cur] <= delta_c:
            path.append(cur)
            cur = int(forest.parent[cur])
        stop = int(term[cur]) if term[cur] >= 0 else cur
        term[cur] = stop
        for p in path:
            term[p] = stop
    return term


class TestClusteringDecisions:
    def test_pairwise_verdicts_equal_label_comparison(self):
        """All C(n, 2) walk verdicts match full-clustering label equality."""
        start = time.perf_counter()
        mismatches = 0
        pairs_checked = 0
        for case in range(50):
            rng = np.random.default_rng(derive_seed(1, case))
            n = int(rng.integers(20, 201))
            d = int(rng.choice([2, 3]))
            kernel_kind = "step" if case % 2 else "gaussian"
            if case % 4 < 2:
                ds = generate_uniform_ball(n, d, seed=derive_seed(1, case, 1))
                d_c = float(rng.uniform(0.15, 0.5))
                delta_c = float(rng.uniform(0.2, 0.6))
            else:
                ds = generate_gaussian_mixture(
                    n, d, k=int(rng.integers(2, 6)), seed=derive_seed(1, case, 1)
                )
                d_c = float(rng.uniform(0.5, 2.0))
                delta_c = float(rng.uniform(2.0, 20.0))
            kernel = Kernel(kernel_kind, d_c)
            oracle = DistanceOracle(ds, QueryLedger(memoized=True))
            forest = build_forest(oracle, kernel)
            rho_c = float(np.quantile(forest.rho, rng.uniform(0.05, 0.5)))
            thresholds = Thresholds(rho_c, delta_c)
            labels = assign_clusters(forest, thresholds).labels

            term = chain_terminators(forest, delta_c)
            rooted = forest.rho[term] >= rho_c
            iu, ju = np.triu_indices(n, k=1)
            walk_verdict = (term[iu] == term[ju]) & rooted[iu]
            label_verdict = (labels[iu] == labels[ju]) & (labels[iu] != NOISE)
            mismatches += int(np.sum(walk_verdict != label_verdict))
            pairs_checked += iu.size

            # tie the bulk walk back to the pairwise routine itself
            for _ in range(3):
                i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
                outcome = decide_same_cluster(oracle, kernel, thresholds, i, j)
                expected = bool(term[i] == term[j] and rooted[i])
                assert outcome.same_cluster == expected, (case, i, j)
        elapsed = time.perf_counter() - start
        ok = mismatches == 0 and elapsed < 120
        _line(
            1, "pairwise verdict vs labels", ok,
            f"{mismatches} mismatches over {pairs_checked} pairs on 50 datasets "
            f"({elapsed:.1f}s, limit 120s)",
        )
        assert mismatches == 0
        assert elapsed < 120

    def test_full_clustering_query_count_is_exact(self):
        """Fresh memoized oracle charges exactly (n^2 - n) / 2 distances."""
        counts = {}
        for n in (2, 23, 100):
            ds = generate_uniform_ball(n, 2, seed=derive_seed(2, n))
            oracle = DistanceOracle(ds, QueryLedger(memoized=True))
            forest = build_forest(oracle, Kernel("gaussian", 0.3))
            assign_clusters(forest, Thresholds(0.5, 0.4))
            counts[n] = oracle.ledger.classical_queries
        ok = all(counts[n] == n * (n - 1) // 2 for n in counts) and counts[23] == 253
        _line(
            2, "full clustering query count", ok,
            f"n=2 -> {counts[2]}, n=23 -> {counts[23]}, n=100 -> {counts[100]} "
            "(expected 1, 253, 4950)",
        )
        assert counts == {2: 1, 23: 253, 100: 4950}


class TestMinimumFinding:
    def test_success_rate_meets_failure_bound(self):
        """Permutation minima found with probability >= 1 - eps (minus 3 sigma)."""
        start = time.perf_counter()
        runs = 2000
        results = []
        for n in (64, 256):
            for eps in (0.1, 0.01):
                tag = int(eps * 1000)
                perm = np.random.default_rng(derive_seed(3, n, tag)).permutation(n)
                problem = SearchProblem(perm.astype(float))
                config = QmfConfig(epsilon=eps)
                succ = sum(
                    qmf_minimum(
                        problem, config,
                        np.random.default_rng(derive_seed(3, n, tag, run)),
                    ).success
                    for run in range(runs)
                )
                rate = succ / runs
                bound = 1 - eps - 3 * math.sqrt(eps * (1 - eps) / runs)
                results.append((n, eps, rate, bound))
        elapsed = time.perf_counter() - start
        ok = all(rate >= bound for _, _, rate, bound in results) and elapsed < 60
        detail = ", ".join(
            f"n={n} eps={eps}: {rate:.4f} (>= {bound:.4f})"
            for n, eps, rate, bound in results
        )
        _line(3, "minimum finding success rate", ok, f"{detail} ({elapsed:.1f}s, limit 60s)")
        for n, eps, rate, bound in results:
            assert rate >= bound, (n, eps, rate, bound)
        assert elapsed < 60

    def test_charged_queries_scale_three_halves(self):
        """Mean charged queries grow as n^1.5 over n = 2^6 .. 2^12."""
        start = time.perf_counter()
        kernel = Kernel("gaussian", 0.2)
        config = QmfConfig(epsilon=0.1)
        points = []
        for exp in range(6, 13):
            n = 2**exp
            ds = generate_uniform_ball(n, 3, seed=derive_seed(4, n))
            profile = raw_densities(ds, kernel)
            oracle = DistanceOracle(ds, QueryLedger(memoized=False))
            charges = []
            for run in range(200):
                rng = np.random.default_rng(derive_seed(4, n, run))
                i = int(rng.integers(n))
                _, _, res = quantum_nearest_higher(
                    oracle, kernel, i, config, rng, profile
                )
                charges.append(res.charged_queries)
            points.append((n, float(np.mean(charges))))
        slope = fit_power_law(points).slope
        elapsed = time.perf_counter() - start
        ok = abs(slope - 1.5) <= 0.15 and elapsed < 600
        _line(
            4, "charged query scaling", ok,
            f"log-log slope {slope:.4f} (1.5 +/- 0.15) over n=64..4096 "
            f"({elapsed:.1f}s, limit 600s)",
        )
        assert abs(slope - 1.5) <= 0.15
        assert elapsed < 600


class TestHeightScaling:
    def test_uniform_ball_exponents(self):
        """Tallest-tree height grows as n^(1/d) for uniform balls."""
        start = time.perf_counter()
        slope2 = height_scaling("uniform", 2, HEIGHT_GRID, runs=5, seed=7).fit.slope
        slope5 = height_scaling("uniform", 5, HEIGHT_GRID, runs=5, seed=7).fit.slope
        elapsed = time.perf_counter() - start
        ok = abs(slope2 - 0.5) <= 0.1 and abs(slope5 - 0.2) <= 0.08 and elapsed < 300
        _line(
            5, "uniform height exponents", ok,
            f"d=2 slope {slope2:.4f} (0.5 +/- 0.1), d=5 slope {slope5:.4f} "
            f"(0.2 +/- 0.08) ({elapsed:.1f}s, limit 300s)",
        )
        assert abs(slope2 - 0.5) <= 0.1
        assert abs(slope5 - 0.2) <= 0.08
        assert elapsed < 300

    def test_gaussian_mixture_effective_dimension(self):
        """Planar mixture heights give an effective dimension near 2."""
        report = height_scaling("gaussian", 2, HEIGHT_GRID, runs=5, seed=7)
        d_eff = report.fit.d_eff
        ok = 1.44 <= d_eff <= 2.44
        _line(
            6, "mixture effective dimension", ok,
            f"d_eff {d_eff:.3f} (band [1.44, 2.44], slope {report.fit.slope:.4f})",
        )
        assert 1.44 <= d_eff <= 2.44


class TestAmplification:
    def test_one_round_probability_closed_form(self):
        """Simulated one-round marked probability equals sin^2(3 asin sqrt(t/n))."""
        start = time.perf_counter()
        worst = 0.0
        for q in range(1, 11):
            n = 2**q
            for t in range(n + 1):
                marks = np.zeros(n, dtype=bool)
                marks[:t] = True
                got = marked_probability_after_round(q, marks)
                want = math.sin(3 * math.asin(math.sqrt(t / n))) ** 2
                worst = max(worst, abs(got - want))
        elapsed = time.perf_counter() - start
        ok = worst <= 1e-9 and elapsed < 60
        _line(
            7, "one-round amplification", ok,
            f"max deviation {worst:.2e} over q<=10, all mark counts "
            f"({elapsed:.1f}s, limit 60s)",
        )
        assert worst <= 1e-9
        assert elapsed < 60

    def test_trial_model_matches_statevector(self):
        """Round-1 success frequencies agree between the two simulators."""
        draws = 100_000
        gaps = []
        for t in range(9):
            rng = np.random.default_rng(derive_seed(9, t))
            hits = 0
            kept = 0
            while kept < draws:
                r, success = grover_trial(8, t, 2.0, rng)
                if r == 1:
                    kept += 1
                    hits += success
            f_model = hits / draws
            marks = np.zeros(8, dtype=bool)
            marks[:t] = True
            probs = measurement_probabilities(grover_round(uniform_state(3), marks))
            sampled = rng.choice(8, size=draws, p=probs)
            f_state = float(np.isin(sampled, np.flatnonzero(marks)).mean())
            p = grover_success_probability(8, t, 1)
            sigma = math.sqrt(p * (1 - p) * (2 / draws))
            gaps.append((t, abs(f_model - f_state), 3 * sigma))
        ok = all(gap <= bound if bound > 0 else gap == 0 for _, gap, bound in gaps)
        worst = max(gaps, key=lambda g: g[1] - g[2])
        _line(
            9, "trial model vs statevector", ok,
            f"worst |gap| {worst[1]:.5f} at t={worst[0]} (3 sigma {worst[2]:.5f}, "
            f"{draws} draws per side)",
        )
        for t, gap, bound in gaps:
            if bound > 0:
                assert gap <= bound, (t, gap, bound)
            else:
                assert gap == 0, (t, gap)


class TestToyExperiment:
    def test_quantum_beats_classical_baseline(self):
        """Shipped 8-element fixture: quantum call count under the blind baseline."""
        start = time.perf_counter()
        rho, dist = load_toy_fixture()
        stats = toy_experiment(rho, dist, runs=1000, seed=8)
        wins = sum(q < c for q, c in zip(stats.quantum_mean, stats.classical_mean))
        c_lo = min(stats.classical_mean)
        c_hi = max(stats.classical_mean)
        elapsed = time.perf_counter() - start
        ok = wins >= 4 and 3.0 <= c_lo and c_hi <= 4.5 and elapsed < 60
        _line(
            8, "toy threshold search", ok,
            f"quantum below classical on {wins}/6 elements, classical means in "
            f"[{c_lo:.2f}, {c_hi:.2f}] (band [3.0, 4.5]) ({elapsed:.1f}s, limit 60s)",
        )
        assert wins >= 4
        assert 3.0 <= c_lo and c_hi <= 4.5
        assert elapsed < 60

"""Acceptance battery: one test per criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line.
All Monte Carlo criteria run at the artifact-wide default master seed 42
(fixed up front, not tuned per criterion).
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from graphspectra import (EnsembleConfig, EntryLaw, ExperimentConfig, LawSpec,
                          SymmetricMatrix, build_laplacian, edge_pair_matrix,
                          edge_trace, edges_of, eigenvalues_sym,
                          expected_trace_moment, lambda_max_fast, replay,
                          run_experiment, semicircle_normal_moments)
from graphspectra.lab import default_limit_grid

from oracles import exhaustive_sign_trace_average, monte_carlo_trace_moment

MASTER_SEED = 42


def report(cid, ok, detail):
    print(f"\nACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


# ---------------------------------------------------------------------------

def test_c01_eigensolver_exactness():
    t0 = time.perf_counter()
    n = 200
    ev = eigenvalues_sym(SymmetricMatrix(np.ones((n, n)))).eigenvalues
    ones_ok = (abs(ev[0] - n) <= 1e-9 * n
               and np.max(np.abs(ev[1:])) <= 1e-9 * n)
    trace_ok = fro_ok = True
    for t in range(20):
        cfg = EnsembleConfig(300, EntryLaw.gaussian(0.0, 1.0), MASTER_SEED,
                             trial_index=t)
        from graphspectra import sample_adjacency
        m = sample_adjacency(cfg)
        w = eigenvalues_sym(m).eigenvalues
        trace_ok &= abs(w.sum() - np.trace(m.array)) <= 1e-8 * m.n * m.max_abs()
        fro2 = float(np.sum(m.array ** 2))
        fro_ok &= abs(np.sum(w ** 2) - fro2) <= 1e-6 * fro2
    elapsed = time.perf_counter() - t0
    ok = ones_ok and trace_ok and fro_ok and elapsed < 5.0
    report("C01 eigensolver", ok,
           f"J200 spectrum ok={ones_ok}, trace ok={trace_ok}, "
           f"frobenius ok={fro_ok}, {elapsed:.2f}s (<5s)")
    assert ones_ok and trace_ok and fro_ok
    assert elapsed < 5.0


def test_c02_semicircle_adjacency():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="thm3_semicircle", n_grid=(2000,), trials=1,
        law_spec=LawSpec(law={"kind": "centered_bernoulli", "p": 0.5}),
        master_seed=MASTER_SEED))
    ks = record.values("ks_semicircle", 2000)[0]
    ok = ks <= 0.03
    report("C02 semicircle", ok,
           f"KS={ks:.4f} (<=0.03), {time.perf_counter() - t0:.1f}s")
    assert ks <= 0.03


def test_c03_dilute_erdos_renyi():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="cor2_dilute", n_grid=(4000,), trials=1,
        law_spec=LawSpec(schedule={"kind": "bernoulli", "form": "power",
                                   "coeff": 1.0, "exponent": -0.5}),
        master_seed=MASTER_SEED))
    ks = record.values("ks_semicircle_dilute", 4000)[0]
    ok = ks <= 0.05
    report("C03 dilute ER", ok,
           f"p=n^-1/2, KS={ks:.4f} (<=0.05), {time.perf_counter() - t0:.1f}s")
    assert ks <= 0.05


def test_c04_laplacian_limit_ks():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="thm2_gamma_m", n_grid=(2000,), trials=1,
        law_spec=LawSpec(law={"kind": "rademacher"}),
        master_seed=MASTER_SEED))
    ks = record.values("ks_gamma_m", 2000)[0]
    ok = ks <= 0.05
    report("C04 laplacian limit", ok,
           f"KS={ks:.4f} (<=0.05), {time.perf_counter() - t0:.1f}s")
    assert ks <= 0.05


def test_c05_limit_route_agreement():
    grid = default_limit_grid()
    ms = semicircle_normal_moments(4)
    norm = grid.normalization()
    m2_rel = abs(grid.moment(2) - float(ms[2])) / float(ms[2])
    m4_rel = abs(grid.moment(4) - float(ms[4])) / float(ms[4])
    ok = m2_rel <= 5e-3 and m4_rel <= 5e-3 and abs(norm - 1.0) <= 1e-3
    report("C05 route agreement", ok,
           f"m2 rel err={m2_rel:.2e} (<=5e-3), m4 rel err={m4_rel:.2e} "
           f"(<=5e-3), normalization={norm:.6f} (1 +- 1e-3)")
    assert m2_rel <= 5e-3 and m4_rel <= 5e-3
    assert abs(norm - 1.0) <= 1e-3


def test_c06_fourth_moment_ratio_arbitration():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="thm2_gamma_m", n_grid=(3000,), trials=5,
        law_spec=LawSpec(law={"kind": "rademacher"}),
        master_seed=MASTER_SEED))
    mc = record.summary["m4_over_m2sq"]["3000"]["median"]
    ms = semicircle_normal_moments(4)
    cumulant = float(ms[4]) / float(ms[2]) ** 2
    reference = 8.0 / 3.0
    agrees_cumulant = abs(mc - cumulant) <= 0.03 * cumulant
    agrees_reference = abs(mc - reference) <= 0.03 * reference
    report("C06 m4/m2^2 arbitration", agrees_cumulant,
           f"monte carlo={mc:.4f}, cumulant route={cumulant:.4f}, "
           f"reference 8/3={reference:.4f}; agreement: "
           f"cumulant={agrees_cumulant}, reference={agrees_reference}, "
           f"{time.perf_counter() - t0:.1f}s")
    assert agrees_cumulant


@pytest.fixture(scope="module")
def gaussian_4000():
    cfg = EnsembleConfig(4000, EntryLaw.gaussian(0.0, 1.0), MASTER_SEED)
    from graphspectra import sample_adjacency
    return sample_adjacency(cfg)


def test_c07_adjacency_extreme_eigenvalues(gaussian_4000):
    t0 = time.perf_counter()
    n = 4000
    k_n = math.ceil(math.sqrt(n))
    top = lambda_max_fast(gaussian_4000, k_n)
    lam_max = float(top[0]) / math.sqrt(n)
    lam_k = float(top[k_n - 1]) / math.sqrt(n)

    # dense cross-check at n=1000 for both the fast path and the k-th value
    from graphspectra import sample_adjacency
    m1000 = sample_adjacency(EnsembleConfig(1000, EntryLaw.gaussian(0.0, 1.0),
                                            MASTER_SEED, trial_index=1))
    k1000 = math.ceil(math.sqrt(1000))
    fast = lambda_max_fast(m1000, k1000)
    dense = eigenvalues_sym(m1000).eigenvalues[:k1000]
    cross_ok = bool(np.max(np.abs(fast - dense) / np.abs(dense)) <= 1e-8)
    fast3, info3 = lambda_max_fast(m1000, 3, return_info=True)
    lanczos_ok = (info3["method"] == "lanczos"
                  and np.max(np.abs(fast3 - dense[:3]) / dense[:3]) <= 1e-8)

    max_ok = 1.90 <= lam_max <= 2.05
    kth_ok = 1.85 <= lam_k <= 2.05
    report("C07 adjacency norms", max_ok and kth_ok and cross_ok and lanczos_ok,
           f"lam_max/sqrt(n)={lam_max:.4f} (in [1.90,2.05]: {max_ok}), "
           f"lam_{k_n}/sqrt(n)={lam_k:.4f} (in [1.85,2.05]: {kth_ok}), "
           f"dense cross-check at n=1000 ok={cross_ok}, "
           f"lanczos path ok={lanczos_ok}, {time.perf_counter() - t0:.1f}s")
    assert cross_ok and lanczos_ok
    assert max_ok, f"lambda_max ratio {lam_max} outside [1.90, 2.05]"
    assert kth_ok, f"lambda_{k_n} ratio {lam_k} outside [1.85, 2.05]"


def test_c08_mean_dominant_adjacency():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="thm5_adjacency_norm", n_grid=(2000,), trials=1,
        law_spec=LawSpec(law={"kind": "bernoulli", "p": 0.3}),
        master_seed=MASTER_SEED))
    ratio = record.values("lmax_over_n_mu", 2000)[0]
    ok = 0.99 <= ratio <= 1.01
    report("C08 mean-dominant lmax", ok,
           f"lmax/(n mu)={ratio:.5f} (in [0.99,1.01]), "
           f"{time.perf_counter() - t0:.1f}s")
    assert ok


def test_c09_laplacian_lmax_trend():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="thm1_lambda_max_laplacian", n_grid=(250, 1000, 4000), trials=50,
        law_spec=LawSpec(law={"kind": "gaussian", "mean": 0.0, "sd": 1.0}),
        master_seed=MASTER_SEED))
    med = {n: record.summary["lmax_laplacian_ratio"][str(n)]["median"]
           for n in (250, 1000, 4000)}
    elapsed = time.perf_counter() - t0
    in_range = all(1.30 <= med[n] <= 1.80 for n in med)
    closer = abs(med[4000] - math.sqrt(2)) < abs(med[250] - math.sqrt(2))
    ok = in_range and closer and elapsed < 600.0
    report("C09 lmax(L) trend", ok,
           f"medians={{250: {med[250]:.4f}, 1000: {med[1000]:.4f}, "
           f"4000: {med[4000]:.4f}}} (all in [1.30,1.80]: {in_range}); "
           f"|median-sqrt2|: {abs(med[250] - math.sqrt(2)):.4f} -> "
           f"{abs(med[4000] - math.sqrt(2)):.4f} (closer at 4000: {closer}), "
           f"{elapsed:.0f}s (<600s)")
    assert in_range
    assert closer, (f"|median - sqrt(2)| did not shrink: "
                    f"{abs(med[250] - math.sqrt(2)):.4f} at n=250 vs "
                    f"{abs(med[4000] - math.sqrt(2)):.4f} at n=4000")
    assert elapsed < 600.0


def test_c10_laplacian_mean_dominant_ratio():
    t0 = time.perf_counter()
    record = run_experiment(ExperimentConfig(
        name="cor1_regimes", n_grid=(2000,), trials=10,
        law_spec=LawSpec(law={"kind": "bernoulli", "p": 0.3}),
        master_seed=MASTER_SEED))
    med = record.summary["lmax_over_n_mu"]["2000"]["median"]
    ok = abs(med - 1.0) <= 0.05
    report("C10 lmax(L)/(n p)", ok,
           f"median={med:.4f} (within 5% of 1: {ok}), "
           f"{time.perf_counter() - t0:.1f}s")
    assert ok, f"median lmax(L)/(n p) = {med:.4f} outside 1 +- 0.05"


def test_c11_circuit_oracle_exactness():
    t0 = time.perf_counter()
    prof = EntryLaw.rademacher().moment_profile(4)
    exact_ok = True
    for n in (2, 3, 4):
        for r in (1, 2, 3, 4):
            circ = expected_trace_moment(n, r, {m: prof[m]
                                                for m in range(1, r + 1)})
            exact_ok &= Fraction(circ) == exhaustive_sign_trace_average(n, r)
    expected = expected_trace_moment(5, 4, prof)
    mc_mean, mc_se = monte_carlo_trace_moment(5, 4, trials=10**5,
                                              seed=MASTER_SEED)
    mc_ok = abs(mc_mean - expected) <= 4.0 * mc_se
    elapsed = time.perf_counter() - t0
    ok = exact_ok and mc_ok and elapsed < 120.0
    report("C11 circuit oracle", ok,
           f"n<=4,r<=4 exact={exact_ok}; n=5,r=4: expected={expected}, "
           f"MC={mc_mean:.1f}+-{mc_se:.1f} (within 4 SE: {mc_ok}), "
           f"{elapsed:.1f}s (<120s)")
    assert exact_ok and mc_ok
    assert elapsed < 120.0


def test_c12_edge_pair_algebra():
    rng = np.random.default_rng(MASTER_SEED)
    edges = edges_of(6)
    product_ok = True
    for _ in range(100):
        a, b, c, d = (edges[i] for i in rng.integers(0, len(edges), 4))
        lhs = edge_pair_matrix(a, b, 6) @ edge_pair_matrix(c, d, 6)
        rhs = edge_trace(b, c) * edge_pair_matrix(a, d, 6)
        product_ok &= np.array_equal(lhs, rhs)
    trace_ok = all(np.trace(edge_pair_matrix(a, a, 6)) == -2
                   for a in edges)
    from graphspectra import sample_adjacency
    adj = sample_adjacency(EnsembleConfig(4, EntryLaw.rademacher(),
                                          MASTER_SEED))
    lap = build_laplacian(adj)
    total = np.zeros((4, 4))
    for hi, lo in edges_of(4):
        total += adj.array[hi - 1, lo - 1] * edge_pair_matrix((hi, lo),
                                                              (hi, lo), 4)
    decomposition_ok = np.array_equal(total, -lap.array)
    ok = product_ok and trace_ok and decomposition_ok
    report("C12 edge-pair algebra", ok,
           f"100 product contractions exact={product_ok}, self-traces "
           f"-2={trace_ok}, weighted sum = -L at n=4: {decomposition_ok}")
    assert ok


@pytest.fixture(scope="module")
def rowsum_record(tmp_path_factory):
    record = run_experiment(ExperimentConfig(
        name="lemma_rowsums", n_grid=(250, 2000), trials=5,
        law_spec=LawSpec(law={"kind": "rademacher"}),
        master_seed=MASTER_SEED))
    path = tmp_path_factory.mktemp("records") / "rowsums.json"
    record.save(path)
    return record, path


def test_c13_rowsum_trend(rowsum_record):
    record, _ = rowsum_record
    med250 = record.summary["s2_dev_over_n2"]["250"]["median"]
    med2000 = record.summary["s2_dev_over_n2"]["2000"]["median"]
    decreasing = med2000 < med250
    small = med2000 <= 0.02
    ok = decreasing and small
    report("C13 row-sum lemma", ok,
           f"median |S2 - E S2|/n^2: {med250:.4f} (n=250) -> {med2000:.4f} "
           f"(n=2000); decreasing={decreasing}, <=0.02 at n=2000: {small}")
    assert decreasing
    assert small, f"median deviation {med2000:.4f} above 0.02 at n=2000"


def test_c14_degenerate_ensemble():
    n = 500
    record = run_experiment(ExperimentConfig(
        name="thm3_semicircle", n_grid=(n,), trials=1,
        law_spec=LawSpec(law={"kind": "bernoulli", "p": 1.0}),
        master_seed=MASTER_SEED))
    mass = record.values("esd_mass_at_degenerate_atom", n)[0]
    flagged = any(f == f"alpha_n_precondition_violated:n={n}"
                  for f in record.flags)
    exact = mass == (n - 1) / n
    ok = exact and flagged
    report("C14 degenerate case", ok,
           f"ESD mass at -1 = {mass} (= {(n - 1) / n}: {exact}), "
           f"alpha_n flag={flagged}")
    assert ok


def test_c15_replay_bit_for_bit(rowsum_record, tmp_path):
    _, rowsum_path = rowsum_record
    rep1 = replay(rowsum_path)
    record2 = run_experiment(ExperimentConfig(
        name="thm3_semicircle", n_grid=(300,), trials=3,
        law_spec=LawSpec(law={"kind": "centered_bernoulli", "p": 0.5}),
        master_seed=MASTER_SEED))
    path2 = tmp_path / "thm3.json"
    record2.save(path2)
    rep2 = replay(path2)
    ok = rep1.matches and rep2.matches
    report("C15 determinism", ok,
           f"replays identical: rowsums={rep1.matches} "
           f"({rep1.rows_compared} rows), thm3={rep2.matches} "
           f"({rep2.rows_compared} rows)")
    assert ok

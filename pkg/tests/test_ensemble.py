import math

import numpy as np
import pytest

from graphspectra import (EnsembleConfig, EntryLaw, SymmetricMatrix,
                          build_laplacian, eigenvalues_sym, sample_adjacency,
                          sample_entry_stream, validate_condition5)
from graphspectra.errors import ConfigError, PreconditionError


def test_degenerate_bernoulli_streams():
    ones = sample_entry_stream(EntryLaw.bernoulli(1.0), seed=5, count=5)
    zeros = sample_entry_stream(EntryLaw.bernoulli(0.0), seed=5, count=5)
    assert np.array_equal(ones, np.ones(5))
    assert np.array_equal(zeros, np.zeros(5))


def test_sign_sparse_sample_mean_clt_bound():
    # the law's exact variance is p = 0.5, so the sample mean of 1e6
    # draws stays within 4 standard errors of 0
    law = EntryLaw.sign_sparse(0.5)
    draws = sample_entry_stream(law, seed=11, count=10**6)
    assert abs(draws.mean()) <= 4.0 * math.sqrt(0.5 / 10**6)
    assert set(np.unique(draws)) <= {-1.0, 0.0, 1.0}


@pytest.mark.parametrize("law", [
    EntryLaw.bernoulli(0.3),
    EntryLaw.centered_bernoulli(0.5),
    EntryLaw.sign_sparse(0.4),
    EntryLaw.gaussian(0.2, 1.5),
    EntryLaw.rademacher(),
    EntryLaw.table([-1.0, 0.5, 2.0], [0.25, 0.5, 0.25]),
])
def test_moment_fidelity_one_million_draws(law):
    m = 10**6
    draws = sample_entry_stream(law, seed=99, count=m)
    se_mean = law.sd / math.sqrt(m)
    assert abs(draws.mean() - law.mean) <= 5.0 * se_mean
    var_hat = draws.var()
    se_var = math.sqrt(max(law.central_moment(4) - law.variance**2, 0.0) / m)
    # the O(1/m) bias of the plug-in estimator dominates when xi^2 is
    # (nearly) constant and the CLT term vanishes
    bias = 5.0 * max(law.variance, 1.0) / m
    assert abs(var_hat - law.variance) <= 5.0 * se_var + bias


def test_closed_form_means_and_variances():
    assert EntryLaw.bernoulli(0.3).mean == 0.3
    assert EntryLaw.bernoulli(0.3).variance == pytest.approx(0.21)
    cb = EntryLaw.centered_bernoulli(0.5)
    assert cb.mean == 0.0 and cb.variance == 0.25
    ss = EntryLaw.sign_sparse(0.7)
    assert ss.mean == 0.0 and ss.variance == pytest.approx(0.7)
    assert EntryLaw.rademacher().variance == 1.0
    g = EntryLaw.gaussian(1.0, 2.0)
    assert g.mean == 1.0 and g.variance == 4.0
    # raw gaussian moments through the hermite recursion: E[(1+2Z)^4]
    assert g.moment(4) == pytest.approx(1 + 6 * 4 + 3 * 16)


def test_table_law_validation():
    with pytest.raises(ConfigError):
        EntryLaw.table([1.0, 2.0], [0.5])
    with pytest.raises(ConfigError):
        EntryLaw.table([1.0, 2.0], [0.6, 0.6])
    with pytest.raises(ConfigError):
        EntryLaw.table([1.0], [1.0], certified_moment_order=1.0)


def test_condition_check_examples():
    assert validate_condition5(EntryLaw.gaussian(0.0, 1.0), 6.5)
    assert validate_condition5(EntryLaw.bernoulli(0.5), 100.0)
    capped = EntryLaw.table([-1.0, 1.0], [0.5, 0.5], certified_moment_order=4.0)
    assert not validate_condition5(capped, 6.5)
    assert validate_condition5(capped, 4.0)
    # degenerate laws never standardize
    assert not validate_condition5(EntryLaw.bernoulli(1.0), 2.0)


def test_adjacency_degenerate_laws():
    all_ones = sample_adjacency(EnsembleConfig(3, EntryLaw.bernoulli(1.0), 1))
    expected = np.ones((3, 3)) - np.eye(3)
    assert np.array_equal(all_ones.array, expected)
    zero = sample_adjacency(EnsembleConfig(5, EntryLaw.bernoulli(0.0), 1))
    assert np.array_equal(zero.array, np.zeros((5, 5)))


def test_adjacency_upper_entry_mean_clt_bound():
    n = 1000
    adj = sample_adjacency(EnsembleConfig(n, EntryLaw.bernoulli(0.5), 7))
    upper = adj.array[np.triu_indices(n, 1)]
    count = n * (n - 1) // 2
    assert upper.size == count
    assert abs(upper.mean() - 0.5) <= 4.0 * math.sqrt(0.25 / count)


def test_adjacency_symmetry_zero_diagonal_determinism():
    cfg = EnsembleConfig(40, EntryLaw.gaussian(0.0, 1.0), 123, trial_index=3)
    a = sample_adjacency(cfg)
    b = sample_adjacency(cfg)
    assert np.array_equal(a.array, a.array.T)
    assert np.all(np.diag(a.array) == 0.0)
    assert np.array_equal(a.array, b.array)
    other = sample_adjacency(EnsembleConfig(40, EntryLaw.gaussian(0.0, 1.0),
                                            123, trial_index=4))
    assert not np.array_equal(a.array, other.array)


def test_dimension_error():
    with pytest.raises(ConfigError):
        EnsembleConfig(1, EntryLaw.rademacher(), 0)


def test_laplacian_of_complete_graph():
    adj = sample_adjacency(EnsembleConfig(3, EntryLaw.bernoulli(1.0), 0))
    lap = build_laplacian(adj)
    assert np.array_equal(lap.array, 3.0 * np.eye(3) - np.ones((3, 3)))
    ev = eigenvalues_sym(lap).eigenvalues
    assert np.allclose(ev, [3.0, 3.0, 0.0], atol=1e-12)


def test_laplacian_zero_matrix_and_row_sums():
    zero = sample_adjacency(EnsembleConfig(4, EntryLaw.bernoulli(0.0), 0))
    assert np.array_equal(build_laplacian(zero).array, np.zeros((4, 4)))
    n = 300
    adj = sample_adjacency(EnsembleConfig(n, EntryLaw.gaussian(0.0, 1.0), 9))
    lap = build_laplacian(adj)
    tol = 1e-10 * n * max(adj.max_abs(), 1.0)
    assert np.abs(lap.row_sums()).max() <= tol
    # the all-ones vector is in the kernel
    assert np.abs(lap.array @ np.ones(n)).max() <= tol


def test_laplacian_rejects_nonzero_diagonal():
    m = SymmetricMatrix(np.eye(3))
    with pytest.raises(PreconditionError):
        build_laplacian(m)


def test_symmetric_matrix_mirrors_lower_triangle():
    raw = np.array([[1.0, 99.0], [2.0, 3.0]])  # upper value ignored
    m = SymmetricMatrix(raw)
    assert m.array[0, 1] == 2.0 and m.array[1, 0] == 2.0
    with pytest.raises(ConfigError):
        SymmetricMatrix(np.zeros((2, 3)))
    arr = m.array
    with pytest.raises(ValueError):
        arr[0, 0] = 5.0  # immutable storage


def test_law_round_trip_serialization():
    for law in (EntryLaw.bernoulli(0.25), EntryLaw.gaussian(1.0, 2.0),
                EntryLaw.rademacher(), EntryLaw.sign_sparse(0.1),
                EntryLaw.table([0.0, 1.0], [0.5, 0.5],
                               certified_moment_order=8.0)):
        clone = EntryLaw.from_dict(law.to_dict())
        assert clone == law

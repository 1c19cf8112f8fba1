import math

import numpy as np
import pytest
from scipy.special import erf

from nibb_max import montecarlo as mc
from nibb_max.fredholm import ks_distance, ks_two_sample, limit_cdf_laguerre, limit_curve, lue_cdf


# ---------------------------------------------------------------- containers


def test_sample_batch_invariants():
    b = mc.SampleBatch([1.0, 2.0], {"model": "x"}, 3)
    assert b.n == 2
    with pytest.raises(ValueError):
        mc.SampleBatch([1.0, np.nan], {"model": "x"}, 3)
    with pytest.raises(ValueError):
        mc.SampleBatch([1.0], {"model": "x"}, 3, n=2)
    with pytest.raises(ValueError):
        mc.SampleBatch([1.0], {"model": "x"}, -1)


@pytest.mark.parametrize(
    "kwargs",
    [dict(N=0, p=0.5), dict(N=2, p=0.0), dict(N=2, p=1.2), dict(N=2, p=0.5, steps=1), dict(N=1, p=0.5, spacing=0.4)],
)
def test_bridge_config_validation(kwargs):
    with pytest.raises(ValueError):
        mc.MatrixBridgeConfig(**kwargs)


def test_bridge_grid():
    assert len(mc.MatrixBridgeConfig(2, 0.3, steps=64).grid()) == 65
    g = mc.MatrixBridgeConfig(2, 0.3, steps=64, spacing=0.01).grid()
    assert g[-1] == pytest.approx(0.3) and len(g) == 31


# ---------------------------------------------------------------- eigenvalues


def test_symmetric_top_examples():
    assert mc.symmetric_top_eigenvalue(np.eye(5)) == pytest.approx(1.0)
    assert mc.symmetric_top_eigenvalue(np.diag([1.0, 3.0, -2.0])) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        mc.symmetric_top_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        mc.symmetric_top_eigenvalue(np.zeros((2, 3)))


def test_symmetric_top_residual():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((50, 50))
    a = x + x.T
    lam, v = mc.symmetric_top_eigenpair(a)
    assert np.linalg.norm(a @ v - lam * v) <= 1e-9 * np.linalg.norm(a, 2)


def test_hermitian_top_is_accepted():
    rng = np.random.default_rng(12)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = x + x.conj().T
    assert mc.symmetric_top_eigenvalue(h) == pytest.approx(np.linalg.eigvalsh(h)[-1], rel=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_closed_form_tops_match_eigvalsh(N):
    rng = np.random.default_rng(N)
    x = rng.standard_normal((2000, N * N))
    x[:10] *= 1e-9  # nearly degenerate matrices
    got = mc._top_from_components(x, N)
    want = np.linalg.eigvalsh(mc._hermitian_from_bridges(x, N))[:, -1]
    assert np.allclose(got, want, rtol=1e-9, atol=1e-15)


# ---------------------------------------------------------------- bridges


def test_reproducible_and_chunk_independent(monkeypatch):
    cfg = mc.MatrixBridgeConfig(3, 0.4, steps=64, seed=99)
    a = mc.sample_nibb_restricted_max(cfg, 50)
    b = mc.sample_nibb_restricted_max(cfg, 50)
    monkeypatch.setattr(mc, "_CHUNK_ELEMS", 700)
    c = mc.sample_nibb_restricted_max(cfg, 50)
    assert a == b == c
    assert a.values.tobytes() == c.values.tobytes()


def test_prefix_of_draws_is_stable():
    cfg = mc.MatrixBridgeConfig(2, 0.5, steps=32, seed=4)
    assert np.array_equal(mc.sample_nibb_restricted_max(cfg, 10).values, mc.sample_nibb_restricted_max(cfg, 30).values[:10])


def test_common_grid_gives_nested_maxima():
    h = 1.0 / 512
    prev = None
    for p in (0.1, 0.25, 0.5, 0.9):
        cur = mc.sample_nibb_restricted_max(mc.MatrixBridgeConfig(2, p, steps=64, seed=8, spacing=h), 200).values
        if prev is not None:
            assert np.all(cur >= prev)
        prev = cur


def test_default_grid_shares_rescaled_increments():
    # with spacing p/steps the whole path divided by sqrt(p) barely depends on p;
    # the residual comes from the (1 - t) drift, of order p
    _, top1 = mc.bridge_top_path(mc.MatrixBridgeConfig(1, 1e-4, steps=64, seed=3))
    _, top2 = mc.bridge_top_path(mc.MatrixBridgeConfig(1, 1e-3, steps=64, seed=3))
    assert np.max(np.abs(top1 / 1e-2 - top2 / math.sqrt(1e-3))) < 2e-3 * np.max(np.abs(top1 / 1e-2))


def test_eigenvalue_paths_are_ordered():
    t, lam = mc.bridge_eigenvalue_paths(mc.MatrixBridgeConfig(4, 0.7, steps=256, seed=5))
    assert lam.shape == (257, 4)
    assert np.all(lam[0] == 0)
    assert np.all(np.diff(lam[1:], axis=1) > 0)


def test_bridge_pinned_at_one():
    t, top = mc.bridge_top_path(mc.MatrixBridgeConfig(2, 1.0, steps=64, seed=5))
    assert t[-1] == 1.0 and top[-1] == 0.0


@pytest.mark.slow
def test_full_bridge_maximum_law():
    s = mc.sample_nibb_restricted_max(mc.MatrixBridgeConfig(1, 1.0, 4096, seed=21), 10_000)
    assert ks_distance(s, lambda r: 1 - np.exp(-2 * np.asarray(r) ** 2)) < 0.03


@pytest.mark.slow
def test_small_p_half_normal():
    p = 1e-3
    s = mc.sample_nibb_restricted_max(mc.MatrixBridgeConfig(1, p, 4096, seed=22), 10_000)
    assert ks_distance(s.values / math.sqrt(p), lambda x: erf(np.asarray(x) / math.sqrt(2))) < 0.03


def test_correction_raises_maxima():
    cfg = mc.MatrixBridgeConfig(2, 0.5, 128, seed=6)
    plain = mc.sample_nibb_restricted_max(cfg, 300)
    corr = mc.sample_nibb_restricted_max(cfg, 300, correction=True)
    assert np.all(corr.values >= plain.values)
    assert corr.model["correction"] == "bridge-max"


# ---------------------------------------------------------------- ensembles


def test_antige_two_by_two():
    s = mc.sample_antige_top(2, 10_000, seed=31)
    assert ks_distance(s, lambda x: erf(np.asarray(x))) < 0.0163


def test_antige_three_squared_is_lue():
    s = mc.sample_antige_top(3, 10_000, seed=32)
    assert ks_distance(s.values**2, lambda x: lue_cdf(1, 0.5, x)) < 0.02


def test_antige_matches_svd():
    s = mc.sample_antige_top(5, 20, seed=1)
    x = mc._normals(1, mc._TAG_ANTIGE, 0, 20, (5, 5))
    a = 0.5 * (x - np.swapaxes(x, 1, 2))
    assert np.allclose(s.values, np.max(np.abs(np.linalg.eigvalsh(1j * a)), axis=1))
    with pytest.raises(ValueError):
        mc.sample_antige_top(1, 5)


def test_antige_top_matches_limit_law_n3():
    s = mc.sample_antige_top(4, 10_000, seed=33).scaled(math.sqrt(2))
    curve = limit_curve(3, np.linspace(0, 8, 801), "laguerre")
    assert ks_distance(s, curve) < 0.02


def test_wishart_chi_square_two():
    s = mc.sample_wishart_loe_top(1, 2, 10_000, seed=41)
    assert ks_distance(s, lambda y: 1 - np.exp(-np.asarray(y) / 2)) < 0.02
    assert s.values.mean() == pytest.approx(2.0, abs=0.1)


def test_wishart_trace_bound():
    s = mc.sample_wishart_loe_top(3, 5, 200, seed=42)
    w = mc.wishart_matrices(3, 5, 200, seed=42)
    assert np.all(s.values <= np.trace(w, axis1=1, axis2=2) + 1e-12)
    with pytest.raises(ValueError):
        mc.sample_wishart_loe_top(3, 2, 10)


# ---------------------------------------------------------------- Dyson


def test_dyson_single_time_matches_gue():
    d = mc.sample_dyson_stationary_top(3, [0.0], 10_000, seed=51)
    g = mc.sample_gue_top(3, 10_000, seed=52)
    assert ks_two_sample(d, g) < 0.03


def test_dyson_single_time_is_cosh_normalized():
    a = mc.sample_dyson_stationary_top(2, [0.0], 100, seed=53)
    b = mc.sample_dyson_stationary_top(2, [0.7], 100, seed=53)
    assert np.allclose(a.values, b.values * math.cosh(0.7), rtol=1e-14)


def test_dyson_rejects_bad_times():
    with pytest.raises(ValueError):
        mc.sample_dyson_stationary_top(2, [], 10)
    with pytest.raises(ValueError):
        mc.sample_dyson_stationary_top(2, [0.0, 0.0], 10)


@pytest.mark.slow
def test_dyson_change_of_variables():
    # sup_{t <= alpha} lambda_N / cosh  =d  sqrt(2) M_N(p) with p = 1 / (1 + e^{-2 alpha})
    alpha = 0.0
    p = 1.0 / (1.0 + math.exp(-2 * alpha))
    d = mc.sample_dyson_stationary_top(2, np.linspace(-5.0, alpha, 2001), 5000, seed=54)
    b = mc.sample_nibb_restricted_max(mc.MatrixBridgeConfig(2, p, 2048, seed=55), 5000).scaled(math.sqrt(2))
    assert ks_two_sample(d, b) < 0.04


def test_limit_cdf_is_consistent_with_gue_scaling():
    # sanity: the N = 1 limit law evaluated where the sampler is used
    assert limit_cdf_laguerre(1, 1.0) == pytest.approx(erf(1 / math.sqrt(2)), abs=1e-12)

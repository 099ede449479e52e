"""Monte Carlo mild-solution machinery: determinism, exact cases, ensembles."""

import numpy as np
import pytest

from conftest import TEST_THREADS
from fracstorm.errors import DomainError, NumericsError
from fracstorm.kernels import apply_semigroup
from fracstorm.params import ModelParams, NoiseModel
from fracstorm.simulate import (
    RieszCovariance,
    SimConfig,
    SigmaSpec,
    build_riesz_covariance,
    linear_sigma,
    sample_noise_slice,
    simulate_mild,
    table_sigma,
)


@pytest.fixture
def white_params():
    return ModelParams(alpha=2.0, beta=0.5, lam=1.0)


def test_same_seed_is_bitwise_reproducible(eigen_cache, bump, white_params):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    cfg = SimConfig(nx=24, nt=16, T=0.05, replicates=70, seed=41)
    a = simulate_mild(white_params, es, u0, cfg)
    b = simulate_mild(white_params, es, u0, cfg)
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.stderr, b.stderr)


def test_thread_count_does_not_change_results(eigen_cache, bump, white_params):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    cfg = SimConfig(nx=24, nt=16, T=0.05, replicates=200, seed=7)
    seq = simulate_mild(white_params, es, u0, cfg, threads=1)
    par = simulate_mild(white_params, es, u0, cfg, threads=TEST_THREADS)
    assert np.array_equal(seq.mean, par.mean)
    assert np.array_equal(seq.stderr, par.stderr)


def test_different_seeds_differ(eigen_cache, bump, white_params):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    a = simulate_mild(white_params, es, u0,
                      SimConfig(nx=24, nt=16, T=0.05, replicates=16, seed=0))
    b = simulate_mild(white_params, es, u0,
                      SimConfig(nx=24, nt=16, T=0.05, replicates=16, seed=1))
    assert not np.array_equal(a.mean, b.mean)


def test_zero_noise_level_reproduces_deterministic_flow(eigen_cache, bump):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    p = ModelParams(alpha=2.0, beta=0.5, lam=0.0)
    cfg = SimConfig(nx=24, nt=12, T=0.1, replicates=8, seed=3)
    est = simulate_mild(p, es, u0, cfg)
    assert np.all(est.stderr == 0.0)
    for j, t in enumerate(est.times):
        det = u0 if t == 0.0 else apply_semigroup(es, 0.5, float(t), u0)
        assert np.max(np.abs(est.mean[j] - det ** 2)) < 1e-12


def test_zero_initial_data_stays_zero(eigen_cache, white_params):
    # sigma(0) = 0, so the zero field is an absorbing state.
    es = eigen_cache(2.0, 24)
    est = simulate_mild(white_params, es, np.zeros(24),
                        SimConfig(nx=24, nt=12, T=0.1, replicates=8, seed=9))
    assert np.all(est.mean == 0.0) and np.all(est.stderr == 0.0)


def test_stderr_shrinks_with_replicates(eigen_cache, bump, white_params):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    small = simulate_mild(white_params, es, u0,
                          SimConfig(nx=24, nt=16, T=0.05, replicates=128, seed=5),
                          threads=TEST_THREADS)
    large = simulate_mild(white_params, es, u0,
                          SimConfig(nx=24, nt=16, T=0.05, replicates=512, seed=5),
                          threads=TEST_THREADS)
    ratio = np.median(large.stderr[-1] / small.stderr[-1])
    assert ratio == pytest.approx(0.5, abs=0.15)


def test_blowup_guard_counts_and_excludes(eigen_cache, bump):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    # Forcing strength chosen so that some replicates diverge and some stay
    # bounded over this horizon: the estimate must report the split and keep
    # the surviving statistics finite.
    p = ModelParams(alpha=2.0, beta=0.5, lam=6e5)
    est = simulate_mild(p, es, u0,
                        SimConfig(nx=24, nt=16, T=0.5, replicates=32, seed=0))
    assert est.blowups > 0
    assert est.replicates_used >= 2
    assert est.replicates_used + est.blowups == 32
    assert np.all(np.isfinite(est.mean))
    assert np.all(np.isfinite(est.stderr))


def test_blowup_of_every_replicate_is_an_error(eigen_cache, bump):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    p = ModelParams(alpha=2.0, beta=0.5, lam=1e90)
    with pytest.raises(NumericsError, match="blow-up guard"):
        simulate_mild(p, es, u0,
                      SimConfig(nx=24, nt=16, T=0.5, replicates=8, seed=0))


def test_sigma_specs():
    lin = linear_sigma(2.5)
    assert lin(3.0) == 7.5 and lin.linear_slope == 2.5
    tab = table_sigma([-1.0, 0.0, 1.0], [-0.5, 0.0, 0.5])
    assert tab(0.5) == pytest.approx(0.25)
    assert tab(100.0) == pytest.approx(0.5)  # clamped extension
    assert tab.linear_slope is None
    with pytest.raises(DomainError):
        SigmaSpec(kind="table", table_x=(0.0, 1.0), table_y=(1.0, 2.0))  # sigma(0) != 0


def test_riesz_covariance_factorization(eigen_cache):
    es = eigen_cache(2.0, 24)
    cov = build_riesz_covariance(es.grid, 0.5)
    assert isinstance(cov, RieszCovariance)
    err = np.max(np.abs(cov.factor @ cov.factor.T - cov.C))
    assert err < 1e-8


def test_noise_slice_statistics(eigen_cache):
    # White slice: independent cell-integrated increments, N(0, dt * h).
    es = eigen_cache(2.0, 24)
    rng = np.random.default_rng(0)
    dt = 0.01
    draws = np.array([
        sample_noise_slice(NoiseModel("white"), es.grid, dt, rng)
        for _ in range(4000)])
    var = draws.var(axis=0)
    assert np.max(np.abs(var / (dt * es.grid.h) - 1.0)) < 0.15
    # Riesz slice covariance is dt * h^2 * C.
    cov = build_riesz_covariance(es.grid, 0.5)
    draws = np.array([
        sample_noise_slice(NoiseModel("riesz", gamma=0.5), es.grid, dt, rng, cov)
        for _ in range(4000)])
    sample_cov = np.cov(draws.T)
    expect = dt * es.grid.h ** 2 * cov.C
    assert np.max(np.abs(sample_cov - expect)) / expect.max() < 0.15


def test_ensemble_stream_roundtrip(tmp_path, eigen_cache, bump, white_params):
    es = eigen_cache(2.0, 24)
    u0 = bump(es)
    path = tmp_path / "ensemble.bin"
    cfg = SimConfig(nx=24, nt=8, T=0.05, replicates=70, seed=2,
                    ensemble_path=str(path))
    est = simulate_mild(white_params, es, u0, cfg)
    record = np.dtype([("rep", "<u4"), ("ti", "<u4"), ("xi", "<u4"),
                       ("value", "<f8")])
    with open(path, "rb") as fh:
        header = fh.readline().decode()
        rec = np.fromfile(fh, dtype=record)
    assert "seed=2" in header and "nx=24" in header
    assert rec.shape[0] == 70 * 9 * 24
    # Replicates appear in order and the recorded paths reproduce the mean.
    assert np.array_equal(np.unique(rec["rep"]), np.arange(70))
    u = rec["value"].reshape(70, 9, 24)
    assert np.max(np.abs((u ** 2).mean(axis=0) - est.mean)) < 1e-12


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(nx=2)
    with pytest.raises(DomainError):
        SimConfig(replicates=1)
    with pytest.raises(DomainError):
        SimConfig(T=-0.1)
    with pytest.raises(DomainError):
        SimConfig(seed=-1)

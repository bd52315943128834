import math

import numpy as np
import pytest

from sbmpot import (
    ConfigError,
    DomainError,
    ExitStats,
    PathConfig,
    phi_eval,
    sample_increment,
    sample_stable_subordinator,
    simulate_exit,
)

from oracles import STABLE_MEDIAN, STABLE_TAIL_100_D075


def _rng(seed, sub=0):
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, sub], dtype=np.uint64))
    )


def _ks2(x, y):
    # two-sample Kolmogorov distance via the pooled order statistic
    xs, ys = np.sort(x), np.sort(y)
    z = np.concatenate([xs, ys])
    Fx = np.searchsorted(xs, z, side="right") / xs.size
    Fy = np.searchsorted(ys, z, side="right") / ys.size
    return float(np.max(np.abs(Fx - Fy)))


def test_path_config_validation():
    good = dict(dt=1e-2, t_max=1.0, x0=1.5, interval=(1.0, 2.0), n_paths=10, seed=1)
    PathConfig(**good)
    with pytest.raises(ConfigError):
        PathConfig(**{**good, "dt": 0.0})
    with pytest.raises(ConfigError):
        PathConfig(**{**good, "t_max": 1e-2})
    with pytest.raises(ConfigError):
        PathConfig(**{**good, "interval": (2.0, 1.0)})
    with pytest.raises(ConfigError):
        PathConfig(**{**good, "interval": (-1.0, 2.0), "x0": 0.5, "fold": True})
    with pytest.raises(DomainError):
        PathConfig(**{**good, "x0": 2.5})
    with pytest.raises(ConfigError):
        PathConfig(**{**good, "n_paths": 0})


def test_subordinator_domain():
    for d in (0.0, 1.0, 1.2, -0.3):
        with pytest.raises(DomainError):
            sample_stable_subordinator(d, 10, _rng(1))


def test_subordinator_laplace_transform():
    # E exp(-S_1) = exp(-1) for every stability index
    n = 100_000
    for d in (0.6, 0.75, 0.9):
        s = sample_stable_subordinator(d, n, _rng(7))
        w = np.exp(-s)
        se = float(np.std(w)) / math.sqrt(n)
        assert abs(float(np.mean(w)) - math.exp(-1.0)) < 4.0 * se


def test_subordinator_median():
    n = 100_000
    for d, med in STABLE_MEDIAN.items():
        s = sample_stable_subordinator(d, n, _rng(11))
        frac = float(np.mean(s <= med))
        assert abs(frac - 0.5) < 2.0 / math.sqrt(n)


def test_subordinator_tail():
    n = 100_000
    s = sample_stable_subordinator(0.75, n, _rng(13))
    p0 = STABLE_TAIL_100_D075
    se = math.sqrt(p0 * (1.0 - p0) / n)
    assert abs(float(np.mean(s > 100.0)) - p0) < 4.0 * se


def test_increment_self_similarity(stable_spec):
    # alpha = 1.5: doubling dt scales the walk increment by 2^(2/3)
    n = 20_000
    a = sample_increment(stable_spec, 0.2, n, _rng(17))
    b = 2.0 ** (2.0 / 3.0) * sample_increment(stable_spec, 0.1, n, _rng(19))
    assert _ks2(a, b) < 1.628 * math.sqrt(2.0 / n)


def test_increment_characteristic_function(stable_spec, mixture_spec):
    # one-step CF is exp(-dt phi(xi^2)) exactly, whatever the lattice step
    n, dt = 100_000, 0.37
    for spec in (stable_spec, mixture_spec):
        inc = sample_increment(spec, dt, n, _rng(23))
        for xi in (0.5, 2.0, 8.0):
            c = np.cos(xi * inc)
            target = math.exp(-dt * phi_eval(spec, xi * xi))
            se = float(np.std(c)) / math.sqrt(n)
            assert abs(float(np.mean(c)) - target) < 4.0 * se


def test_increment_validation(stable_spec):
    with pytest.raises(ConfigError):
        sample_increment(stable_spec, 0.0, 10, _rng(1))


def test_simulate_exit_deterministic(stable_spec):
    cfg = PathConfig(dt=1e-2, t_max=50.0, x0=1.5, interval=(1.0, 2.0), n_paths=100, seed=99)
    s1 = simulate_exit(cfg, stable_spec)
    s2 = simulate_exit(cfg, stable_spec)
    assert np.array_equal(s1.exited, s2.exited)
    assert np.array_equal(s1.exit_pos, s2.exit_pos, equal_nan=True)
    assert np.array_equal(s1.exit_time, s2.exit_time, equal_nan=True)
    # path i is keyed (seed, i): a shorter run is a prefix of a longer one
    half = simulate_exit(
        PathConfig(dt=1e-2, t_max=50.0, x0=1.5, interval=(1.0, 2.0), n_paths=50, seed=99),
        stable_spec,
    )
    assert np.array_equal(half.exit_pos, s1.exit_pos[:50], equal_nan=True)


def test_simulate_exit_statistics(stable_spec):
    cfg = PathConfig(dt=1e-2, t_max=50.0, x0=1.5, interval=(1.0, 2.0), n_paths=100, seed=99)
    st = simulate_exit(cfg, stable_spec)
    ex = st.exited
    assert st.censored == 100 - int(ex.sum())
    assert np.all(np.isnan(st.exit_pos[~ex]))
    p = st.exit_pos[ex]
    assert np.all((p <= 1.0) | (p >= 2.0))
    assert np.all(st.exit_time[ex] > 0.0)
    assert np.all(st.exit_time[ex] <= 50.0 + 1e-12)


def test_folded_walk_exits_through_the_top(stable_spec):
    cfg = PathConfig(
        dt=1e-2, t_max=50.0, x0=0.5, interval=(0.0, 1.0), n_paths=200, seed=5, fold=True
    )
    st = simulate_exit(cfg, stable_spec)
    assert st.exited.all()
    assert np.all(st.exit_pos[st.exited] >= 1.0)


def test_all_censored_warns(stable_spec):
    cfg = PathConfig(
        dt=1e-2, t_max=2.5e-2, x0=0.0, interval=(-1e6, 1e6), n_paths=4, seed=3
    )
    with pytest.warns(RuntimeWarning):
        st = simulate_exit(cfg, stable_spec)
    assert st.censored == 4
    assert np.all(np.isnan(st.exit_pos))


def test_creep_count_synthetic():
    st = ExitStats(
        n_paths=4,
        dt=1e-2,
        interval=(0.0, 1.0),
        exited=np.array([True, True, True, False]),
        exit_pos=np.array([1.00005, 1.5, -0.00002, np.nan]),
        exit_time=np.array([0.1, 0.2, 0.3, np.nan]),
    )
    assert st.censored == 1
    assert st.creep_count(1e-4) == 2
    assert st.creep_count(1e-6) == 0

import math

import numpy as np
import pytest

from sbmpot import (
    ConfigError,
    DomainError,
    Grid,
    bhp_sup_ratio,
    build_generator,
    default_zgrid,
    exit_alive_prob,
    exit_time,
    gauge_ratios,
    green_drift,
    green_matrix,
    harmonic_extend,
    harnack_sup_ratio,
    poisson_kernel,
    small_interval_lower,
    three_g_sup,
)

from oracles import bgr_density, getoor_exit


@pytest.fixture(scope="module")
def green_x_256(stable_ks):
    return green_matrix(build_generator(stable_ks, Grid(1.0, 2.0, 256), "X"))


@pytest.fixture(scope="module")
def poisson_x_256(stable_ks, green_x_256):
    return poisson_kernel(green_x_256, stable_ks)


def test_grid_validation():
    g = Grid(1.0, 2.0, 8)
    assert g.dx == pytest.approx(0.125)
    assert np.all((g.nodes() > 1.0) & (g.nodes() < 2.0))
    with pytest.raises(ConfigError):
        Grid(-0.5, 1.0, 8)
    with pytest.raises(ConfigError):
        Grid(2.0, 1.0, 8)
    with pytest.raises(ConfigError):
        Grid(1.0, 2.0, 0)
    with pytest.raises(ConfigError):
        Grid(1.0, math.inf, 8)


def test_generator_kind_validation(stable_ks):
    with pytest.raises(ConfigError):
        build_generator(stable_ks, Grid(1.0, 2.0, 16), "W")


def test_green_symmetric_positive(green_x_256):
    G = green_x_256.G
    assert np.all(G > 0.0)
    assert np.max(np.abs(G - G.T)) / np.max(G) < 1e-10
    assert green_x_256.asymmetry < 1e-10


def test_exit_time_matches_interval_exit_law(stable_ks, green_x_256):
    # mean exit time of the free stable process from an interval
    E = exit_time(green_x_256)
    xs = green_x_256.grid.nodes()
    for x in (1.5, 1.25):
        want = getoor_exit(1.5, 0.5, x - 1.5)
        got = float(np.interp(x, xs, E))
        assert got == pytest.approx(want, rel=1e-2)


def test_exit_time_shape(green_x_256):
    E = exit_time(green_x_256)
    assert np.all(E > 0.0)
    # decays toward both walls
    assert E[0] < E[len(E) // 2] and E[-1] < E[len(E) // 2]


def test_poisson_density_matches_exit_law(stable_ks, poisson_x_256):
    pt = poisson_x_256
    xs = pt.grid.nodes()
    i0 = int(np.argmin(np.abs(xs - 1.5)))
    xt = 2.0 * (xs[i0] - 1.5)
    z = pt.zgrid.nodes
    for ztar in (0.25, 0.75, 2.25, 2.5, 3.0):
        m = int(np.argmin(np.abs(z - ztar)))
        v = 2.0 * (z[m] - 1.5)
        want = 2.0 * bgr_density(1.5, xt, v)
        assert pt.K[i0, m] == pytest.approx(want, rel=2e-2)


def test_poisson_row_mass_near_one(poisson_x_256):
    assert np.max(np.abs(poisson_x_256.row_mass() - 1.0)) < 1e-2


def test_poisson_mass_split(poisson_x_256):
    total = poisson_x_256.mass_below() + poisson_x_256.mass_above()
    assert np.allclose(total, poisson_x_256.row_mass(), rtol=1e-12)


def test_poisson_cdf_monotone(poisson_x_256):
    z, F = poisson_x_256.cdf(128)
    assert np.all(np.diff(F) >= -1e-15)
    assert 0.0 <= F[0] and F[-1] == pytest.approx(1.0, abs=2e-3)


def test_exterior_mesh_shapes(stable_ks):
    grid = Grid(1.0, 2.0, 64)
    zg = default_zgrid(grid, "X")
    assert zg.nodes.shape == zg.weights.shape == zg.below.shape
    assert zg.cut_lo is not None
    assert np.all((zg.nodes < 1.0) | (zg.nodes > 2.0))
    zgz = default_zgrid(grid, "Z")
    assert zgz.cut_lo is None
    assert np.all(zgz.nodes > 0.0)
    with pytest.raises(ConfigError):
        default_zgrid(grid, "Q")


def test_harmonic_extension_of_unit_data(stable_ks, poisson_x_256):
    # f = 1 everywhere outside reproduces the full exit mass
    pt = poisson_x_256
    ones = np.ones_like(pt.zgrid.nodes)
    u = harmonic_extend(pt, ones, f_tail=(1.0, 0.0))
    # the X lower exterior also carries an analytic tail, add it directly
    u_full = u + pt.tail_lo
    assert np.allclose(u_full, pt.row_mass(), rtol=1e-5)


def test_harmonic_extension_validation(poisson_x_256):
    pt = poisson_x_256
    with pytest.raises(ConfigError):
        harmonic_extend(pt, np.ones(3))
    with pytest.raises(DomainError):
        harmonic_extend(pt, -np.ones_like(pt.zgrid.nodes))


def test_exit_alive_bracket(stable_ks):
    rep = exit_alive_prob(stable_ks, 1.0, [0.3, 0.5, 0.7])
    assert np.all(rep.lower <= rep.value) and np.all(rep.value <= rep.upper)
    assert np.all(rep.bracket < 0.02)
    assert np.all(np.diff(rep.value) > 0.0)  # increasing in x
    assert rep.shrank
    v, w = rep.scalars()
    assert v == pytest.approx(rep.value[0]) and w == pytest.approx(rep.bracket[0])


def test_exit_alive_validation(stable_ks):
    with pytest.raises(DomainError):
        exit_alive_prob(stable_ks, -1.0, 0.5)
    with pytest.raises(DomainError):
        exit_alive_prob(stable_ks, 1.0, 1.5)
    with pytest.raises(DomainError):
        exit_alive_prob(stable_ks, 1.0, 0.001)  # below the largest shelf
    with pytest.raises(ConfigError):
        exit_alive_prob(stable_ks, 1.0, 0.5, a_seq=())


def test_gauge_ratios_ordering(stable_ks):
    gs = {
        k: green_matrix(build_generator(stable_ks, Grid(1.0, 2.0, 64), k))
        for k in ("X", "Y", "Z")
    }
    rep = gauge_ratios(gs["X"], gs["Y"], gs["Z"])
    # deleting the down-crossing jumps (Y) can only raise the Green function;
    # folding them (Z) keeps the return routes, so Z sits between X and Y
    assert rep.inf_yx >= 1.0 - 1e-9
    assert rep.inf_zx >= 1.0 - 1e-9
    assert rep.sup_zy <= 1.0 + 1e-9
    assert rep.sup_zx >= rep.sup_zy - 1e-12
    with pytest.raises(ConfigError):
        gauge_ratios(gs["Y"], gs["X"], gs["Z"])


def test_three_g_kind_restriction(stable_ks, green_x_256):
    rep = three_g_sup(green_x_256, stable_ks)
    assert math.isfinite(rep.sup) and rep.sup > 0.0
    gz = green_matrix(build_generator(stable_ks, Grid(1.0, 2.0, 32), "Z"))
    with pytest.raises(ConfigError):
        three_g_sup(gz, stable_ks)


def test_harnack_constant(stable_ks):
    rep = harnack_sup_ratio(stable_ks, 1.0, n=128)
    assert rep.c6 > 1.0 and math.isfinite(rep.c6)
    assert rep.window[0] == pytest.approx(0.5) and rep.window[1] == pytest.approx(2.5)
    with pytest.raises(ConfigError):
        harnack_sup_ratio(stable_ks, 1.0, a_frac=1.5)
    with pytest.raises(DomainError):
        harnack_sup_ratio(stable_ks, -1.0)


def test_bhp_report(stable_ks):
    rep = bhp_sup_ratio(stable_ks, 1.0, n=256)
    assert rep.c7 > 1.0 and math.isfinite(rep.c7)
    assert rep.c7_upper >= rep.c7
    assert len(rep.per_f) == 5
    assert {p["name"] for p in rep.per_f} == {
        "step-3r-4r", "step-4r-6r", "bump-4r", "power-tail", "step-3r-3.3r",
    }
    with pytest.raises(ConfigError):
        bhp_sup_ratio(stable_ks, 1.0, n=256, a=0.2)  # shelf too big
    with pytest.raises(ConfigError):
        bhp_sup_ratio(stable_ks, 1.0, lambda1=0.7)


def test_small_interval_lower(stable_ks):
    rep = small_interval_lower(stable_ks, 1.0)
    assert rep.lambda2 > 0.0
    # shrinking the shelf grows the domain, so the floor can only rise
    rep2 = small_interval_lower(stable_ks, 1.0, a=0.002, window_lo=0.004)
    assert rep2.lambda2 >= rep.lambda2 - 1e-12


def test_green_drift_zero_on_self(stable_ks, green_x_256):
    assert green_drift(green_x_256, green_x_256) == pytest.approx(0.0, abs=1e-14)


def test_green_drift_coarse_fine(stable_ks, green_x_256):
    fine = green_matrix(build_generator(stable_ks, Grid(1.0, 2.0, 512), "X"))
    d = green_drift(green_x_256, fine)
    assert 0.0 < d < 0.05

"""Dense interval solvers for the three killed forms of the process.

Kinds:
  X : the free process killed on exiting the interval (a, b)
  Y : the half-line censored process killed on exiting (a, b)
  Z : the folded absolute-value process killed on exiting (a, b)

All three discretize the same way: midpoint lattice x_i = a + (i + 1/2) D,
off-diagonal generator entries kernel(x_i, x_j) * D for |i - j| >= 2, a
second-difference coefficient for the singular near-diagonal band, and an
exactly-integrated per-node killing rate so the row-sum identity
(-A) 1 = kappa holds to quadrature accuracy.  Everything downstream is dense
linear algebra: the Green matrix is the scaled inverse, Poisson kernels are
Green-kernel products against an exterior mesh, and the empirical
certificates (gauge ratios, 3G, Harnack, boundary ratios, small-interval
floor) are reductions over those matrices.

The left endpoint of (0, R) problems is always approximated from inside by a
small absorbing shelf a > 0; the shelf correction h(a)/h(R) brackets the
re-entry mass, following the same limit argument the continuum objects are
defined by.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, SolverError
from .kernels import KernelSet
from .quadrature import integrate_adaptive

__all__ = [
    "Grid",
    "GeneratorMatrix",
    "GreenMatrix",
    "ZGrid",
    "PoissonTable",
    "BoundaryData",
    "build_generator",
    "green_matrix",
    "exit_time",
    "default_zgrid",
    "poisson_kernel",
    "harmonic_extend",
    "exit_alive_prob",
    "gauge_ratios",
    "three_g_sup",
    "harnack_sup_ratio",
    "bhp_sup_ratio",
    "small_interval_lower",
    "green_drift",
    "default_boundary_fset",
]

# exterior integrals switch from quadrature to the closed power tail here
Z_MAX_FACTOR = 50.0

# near-origin probe fraction for boundary-ratio and small-interval checks
DEFAULT_LAMBDA1 = 0.25

# absorbing-shelf sequence for (0, R) bracketing
DEFAULT_A_SEQ = (0.004, 0.001, 0.00025)

_KINDS = ("X", "Y", "Z")


@dataclass(frozen=True)
class Grid:
    """Uniform midpoint lattice on (a, b): x_i = a + (i + 1/2) dx."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ConfigError("grid endpoints must be finite")
        if not (0.0 <= self.a < self.b):
            raise ConfigError(f"need 0 <= a < b, got ({self.a}, {self.b})")
        if int(self.n) < 1 or int(self.n) != self.n:
            raise ConfigError("n must be a positive integer")

    @property
    def dx(self):
        return (self.b - self.a) / self.n

    def nodes(self):
        return self.a + (np.arange(self.n) + 0.5) * self.dx


@dataclass
class GeneratorMatrix:
    kind: str
    grid: Grid
    A: np.ndarray = field(repr=False)
    kappa_vec: np.ndarray = field(repr=False)
    q_vec: np.ndarray = field(repr=False)
    F_diag: object = field(repr=False)  # F(x, y) = j(x + y) / j(|x - y|)


@dataclass
class GreenMatrix:
    kind: str
    grid: Grid
    G: np.ndarray = field(repr=False)
    asymmetry: float = 0.0


def _jt(ks, t, cutoff):
    return ks.jump_tail(float(t), cutoff)


def _wall_correction(ks: KernelSet, dx: float) -> float:
    """Extra wall-node kill mass from profile-weighted collocation.

    Solutions vanish like d^delta toward an absorbing wall while the kill
    rate grows like the jump tail; weighting the wall cell's rate by the
    d^delta profile (instead of sampling both at the midpoint) multiplies
    the singular component by gamma = avg(rate * d^dm) / (rate * d^dm at
    midpoint) > 1.  Returned is the additive correction (gamma - 1) * rate.
    """
    dm = ks.delta_max
    prof = integrate_adaptive(
        lambda d: ks.jump_tail_closed(d) * d**dm,
        0.0,
        dx,
        ks.quad,
        left_exponent=-dm,
    ).value
    near = float(ks.jump_tail_closed(0.5 * dx))
    gamma = prof / (dx * near * (0.5 * dx) ** dm)
    return (gamma - 1.0) * near


def build_generator(ks: KernelSet, grid: Grid, kind: str) -> GeneratorMatrix:
    """Assemble the discrete generator of one killed form.

    The diagonal is set to -(off-diagonal row sum + kappa_i), which makes
    the matrix symmetric by construction and pins the row-sum gap to the
    exactly-integrated killing rate: Poisson row masses then measure only
    the exterior-mesh quality, not assembly error.
    """
    kind = str(kind).upper()
    if kind not in _KINDS:
        raise ConfigError(f"kind must be one of {_KINDS}")
    if kind in ("Y", "Z") and grid.a <= 0.0:
        raise DomainError(f"kind {kind} needs a > 0 (forms live on the half line)")
    n = grid.n
    if n < 8:
        raise ConfigError("need at least 8 cells for the near-diagonal treatment")

    xs = grid.nodes()
    dx = grid.dx
    a, b = grid.a, grid.b
    cutoff = Z_MAX_FACTOR * (b - a)

    # exact per-cell kernel masses: the kernel is a power sum, so the cell
    # integral is a closed tail difference; midpoint sampling would carry an
    # O(1) relative error on the steep cells nearest the band
    D = np.abs(xs[:, None] - xs[None, :])
    np.fill_diagonal(D, 1.0)
    A = ks.jump_tail_closed(D - 0.5 * dx) - ks.jump_tail_closed(D + 0.5 * dx)
    del D
    # strip the band |i - j| <= 1; it is rebuilt from the cell treatment
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A[1:], 0.0)
    np.fill_diagonal(A[:, 1:], 0.0)

    # symmetric principal-value part within the band |y - x| < 3 dx / 2
    # (everything the far cells do not cover), as a second-difference
    # coefficient; exponent hint 1 - 2 delta_max
    c2r = integrate_adaptive(
        lambda u: u * u * ks.levy_j(u),
        0.0,
        1.5 * dx,
        ks.quad,
        left_exponent=1.0 - 2.0 * ks.delta_max,
    )
    c2 = c2r.value / (dx * dx)
    idx = np.arange(n - 1)
    A[idx, idx + 1] = c2
    A[idx + 1, idx] = c2

    if kind == "Z":
        # folded-part cell masses; the own-cell entry is overwritten when the
        # diagonal is rebuilt, so no correction is needed there
        S = xs[:, None] + xs[None, :]
        A += ks.jump_tail_closed(S - 0.5 * dx) - ks.jump_tail_closed(S + 0.5 * dx)
        del S

    jt_xa = np.array([_jt(ks, t, cutoff) for t in xs - a]) if a > 0.0 else None
    jt_x0a = np.array([_jt(ks, t, cutoff) for t in xs]) if a > 0.0 else None
    jt_bx = np.array([_jt(ks, t, cutoff) for t in b - xs])
    if a > 0.0:
        kappa1 = jt_xa + jt_bx
        kappa2 = (jt_xa - jt_x0a) + jt_bx
        jt_xpa = np.array([_jt(ks, t, cutoff) for t in xs + a])
        jt_xpb = np.array([_jt(ks, t, cutoff) for t in xs + b])
        q_vec = (jt_x0a - jt_xpa) + jt_xpb
    else:
        # a = 0: the lower exterior is empty on the half line
        jt_x0 = np.array([_jt(ks, t, cutoff) for t in xs])
        kappa1 = jt_x0 + jt_bx
        kappa2 = jt_bx
        jt_xpb = np.array([_jt(ks, t, cutoff) for t in xs + b])
        q_vec = jt_xpb
    kappa3 = kappa2 + q_vec

    kappa = {"X": kappa1, "Y": kappa2, "Z": kappa3}[kind].copy()

    # wall cells: the kill rate diverges like d^{-2 delta} toward the wall
    # while solutions vanish like d^delta, so midpoint collocation of kappa
    # in the first cell underweights the absorption there by an O(1) factor.
    # Reweight the singular wall-side component by the profile-averaged
    # collocation factor; this is the difference between first-order and
    # near-second-order wall accuracy.
    dk = _wall_correction(ks, dx)
    kappa[0] += dk
    kappa[n - 1] += dk

    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, -(A.sum(axis=1) + kappa))

    def F_diag(x, y):
        return ks.levy_j(np.asarray(x) + np.asarray(y)) / ks.levy_j(
            np.asarray(x) - np.asarray(y)
        )

    return GeneratorMatrix(kind=kind, grid=grid, A=A, kappa_vec=kappa, q_vec=q_vec, F_diag=F_diag)


def green_matrix(gen: GeneratorMatrix) -> GreenMatrix:
    """G = (-A)^{-1} / dx, symmetrized, with the raw asymmetry recorded."""
    M = -gen.A
    try:
        G0 = np.linalg.inv(M)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"generator inversion failed: {e}") from e
    scale = float(np.max(np.abs(G0)))
    asym = float(np.max(np.abs(G0 - G0.T))) / scale if scale > 0 else 0.0
    G = (0.5 / gen.grid.dx) * (G0 + G0.T)
    if not np.all(np.isfinite(G)):
        raise SolverError("Green matrix has non-finite entries")
    if np.min(G) <= 0.0:
        raise SolverError("Green matrix lost positivity; grid too coarse for this kernel")
    return GreenMatrix(kind=gen.kind, grid=gen.grid, G=G, asymmetry=asym)


def exit_time(green: GreenMatrix):
    """E[tau](x_i) = sum_j G[i][j] dx."""
    return green.G.sum(axis=1) * green.grid.dx


# -- exterior mesh and Poisson kernel ----------------------------------------


@dataclass
class ZGrid:
    """Exterior mesh: cell midpoints, widths, and the analytic-tail cuts.

    ``cut_hi`` is where the upper exterior switches to the closed power
    tail; ``cut_lo`` likewise for kind X (None when the lower exterior is
    the bounded set (0, a), which the mesh covers completely).
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    below: np.ndarray = field(repr=False)  # mask: exterior cell lies below the interval
    cut_lo: float | None
    cut_hi: float


def _graded_edges(start, width, m, reverse=False):
    # quartic grading toward `start`; cells of width ~ width/m^4 at the wall
    t = (np.arange(m + 1) / m) ** 4
    e = start + width * t
    return start - width * t if reverse else e


def default_zgrid(grid: Grid, kind: str, n_side: int | None = None) -> ZGrid:
    """Exterior mesh tied to the interior resolution.

    Each side gets a quartic-graded zone one interval-width deep (so the
    kernel singularity at the wall is resolved far below the interior cell
    scale) plus a geometric zone out to Z_MAX_FACTOR interval-widths.
    Beyond that the callers integrate the kernel tail in closed form.
    """
    kind = str(kind).upper()
    if kind not in _KINDS:
        raise ConfigError(f"kind must be one of {_KINDS}")
    a, b = grid.a, grid.b
    width = b - a
    m = n_side if n_side is not None else max(48, grid.n // 4)
    if m < 8:
        raise ConfigError("exterior mesh needs at least 8 graded cells per side")
    m2 = max(24, m // 3)
    cut_hi = b + Z_MAX_FACTOR * width

    up1 = _graded_edges(b, width, m)
    up2 = b + width * np.geomspace(1.0, Z_MAX_FACTOR, m2 + 1)
    up_edges = np.concatenate([up1, up2[1:]])

    if kind == "X":
        lo1 = _graded_edges(a, width, m, reverse=True)
        lo2 = a - width * np.geomspace(1.0, Z_MAX_FACTOR, m2 + 1)
        lo_edges = np.concatenate([lo1, lo2[1:]])[::-1]  # ascending
        cut_lo = a - Z_MAX_FACTOR * width
    else:
        # cover (0, a) entirely, graded toward the wall at a
        t = (np.arange(m + 1) / m) ** 4
        lo_edges = (a * (1.0 - t))[::-1]
        cut_lo = None

    def cells(edges):
        wdt = np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        keep = wdt > 0.0
        return mid[keep], wdt[keep]

    lo_n, lo_w = cells(lo_edges)
    up_n, up_w = cells(up_edges)
    nodes = np.concatenate([lo_n, up_n])
    wgt = np.concatenate([lo_w, up_w])
    below = np.concatenate([np.ones(lo_n.size, bool), np.zeros(up_n.size, bool)])
    return ZGrid(nodes=nodes, weights=wgt, below=below, cut_lo=cut_lo, cut_hi=cut_hi)


@dataclass
class PoissonTable:
    kind: str
    grid: Grid
    zgrid: ZGrid = field(repr=False)
    K: np.ndarray = field(repr=False)  # exit density over exterior cells
    tail_lo: np.ndarray = field(repr=False)
    tail_hi: np.ndarray = field(repr=False)
    green: GreenMatrix = field(repr=False)
    ks: KernelSet = field(repr=False)

    def row_mass(self):
        return self.K @ self.zgrid.weights + self.tail_lo + self.tail_hi

    def mass_below(self):
        m = self.zgrid.below
        return self.K[:, m] @ self.zgrid.weights[m] + self.tail_lo

    def mass_above(self):
        m = ~self.zgrid.below
        return self.K[:, m] @ self.zgrid.weights[m] + self.tail_hi

    def cdf(self, i: int):
        """Exit-position CDF for row i: returns (z, F) step samples.

        z is the ascending exterior node sequence; F[m] is the exit
        probability mass at or below cell m (lower analytic tail included),
        normalized by the row mass.
        """
        z = self.zgrid.nodes
        pm = self.K[i] * self.zgrid.weights
        F = np.cumsum(pm) + self.tail_lo[i]
        return z, F / self.row_mass()[i]


def poisson_kernel(green: GreenMatrix, ks: KernelSet, zgrid: ZGrid | None = None) -> PoissonTable:
    """Exit-position density table K[i][m] = sum_j dx G[i][j] kernel(x_j, z_m).

    The upper exterior beyond cut_hi enters through the closed kernel tail;
    for kind X the mirrored lower tail does the same.
    """
    grid = green.grid
    zg = zgrid if zgrid is not None else default_zgrid(grid, green.kind)
    z = zg.nodes
    if np.any((z >= grid.a) & (z <= grid.b)):
        raise ConfigError("exterior mesh overlaps the interval")
    if green.kind in ("Y", "Z") and np.any(z <= 0.0):
        raise DomainError(f"kind {green.kind} exterior lives on (0, inf)")

    xs = grid.nodes()
    KERN = ks.levy_j(np.abs(xs[:, None] - z[None, :]))
    if green.kind == "Z":
        KERN += ks.levy_j(xs[:, None] + z[None, :])

    # the generator carries extra wall-node kill mass (profile-weighted
    # collocation); that mass exits through the wall-side kernel, so scale
    # the wall rows' wall-side columns to keep row masses exact
    dk = _wall_correction(ks, grid.dx)
    cutoff = Z_MAX_FACTOR * (grid.b - grid.a)
    x0, xm = xs[0], xs[-1]
    if green.kind == "X":
        t_lo = _jt(ks, x0 - grid.a, cutoff)
    elif green.kind == "Y":
        t_lo = _jt(ks, x0 - grid.a, cutoff) - _jt(ks, x0, cutoff)
    else:
        t_lo = _jt(ks, x0 - grid.a, cutoff) - _jt(ks, x0 + grid.a, cutoff)
    t_hi = _jt(ks, grid.b - xm, cutoff)
    if green.kind == "Z":
        t_hi += _jt(ks, xm + grid.b, cutoff)
    s_lo = 1.0 + dk / t_lo
    s_hi = 1.0 + dk / t_hi
    KERN[0, zg.below] *= s_lo
    KERN[-1, ~zg.below] *= s_hi

    P = green.G * grid.dx  # = (-A)^{-1}
    K = P @ KERN

    hi_rate = ks.jump_tail_closed(zg.cut_hi - xs)
    if green.kind == "Z":
        hi_rate = hi_rate + ks.jump_tail_closed(zg.cut_hi + xs)
    hi_rate[-1] *= s_hi
    tail_hi = P @ hi_rate
    if green.kind == "X":
        lo_rate = ks.jump_tail_closed(xs - zg.cut_lo)
        lo_rate[0] *= s_lo
        tail_lo = P @ lo_rate
    else:
        tail_lo = np.zeros_like(tail_hi)

    return PoissonTable(
        kind=green.kind, grid=grid, zgrid=zg, K=K,
        tail_lo=tail_lo, tail_hi=tail_hi, green=green, ks=ks,
    )


def harmonic_extend(pt: PoissonTable, f, f_tail=None):
    """u(x_i) = sum_m K[i][m] f(z_m) w_m (+ declared tail term).

    ``f`` is a callable on exterior points or an array aligned with the
    mesh; it must be nonnegative.  ``f_tail = (c, p)`` declares
    f(z) ~ c z^{-p} beyond cut_hi, integrated against the leading kernel
    tail (the shelf at cut_hi = many interval widths keeps this term tiny,
    so the leading order suffices).
    """
    zg = pt.zgrid
    fz = np.asarray(f(zg.nodes) if callable(f) else f, dtype=float)
    if fz.shape != zg.nodes.shape:
        raise ConfigError("boundary data shape does not match the exterior mesh")
    if np.any(fz < 0.0):
        raise DomainError("harmonic extension needs nonnegative boundary data")
    u = pt.K @ (fz * zg.weights)
    if f_tail is not None:
        c, p = float(f_tail[0]), float(f_tail[1])
        if c < 0.0:
            raise DomainError("tail coefficient must be nonnegative")
        ks = pt.ks
        xs = pt.grid.nodes()
        rate = c * ks.jump_tail_closed(zg.cut_hi - xs, weight_exponent=p)
        if pt.kind == "Z":
            rate = rate + c * ks.jump_tail_closed(zg.cut_hi + xs, weight_exponent=p)
        u = u + (pt.green.G * pt.grid.dx) @ rate
    return u


# -- exit statistics over (0, R) ----------------------------------------------


@dataclass
class ExitAliveReport:
    """a -> 0 bracket for P_x(exit (0, R) through [R, inf) before dying at 0)."""

    x: np.ndarray
    R: float
    value: np.ndarray
    bracket: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    per_a: tuple
    shrank: bool

    def scalars(self):
        return float(self.value[0]), float(self.bracket[0])


def exit_alive_prob(
    ks: KernelSet,
    R: float,
    x,
    a_seq=DEFAULT_A_SEQ,
    *,
    n_cap: int = 4096,
    cells_per_shelf: float = 4.0,
) -> ExitAliveReport:
    """Bracketed P_x(exit (0, R) alive), approaching the origin by shelves.

    For each shelf a the kind=Z problem on (a, R) is solved for the
    harmonic extension of the indicator of [R, inf) (a lower bound: paths
    absorbed at the shelf might still have escaped), and the complementary
    mass is bounded by the h(a)/h(R) escape factor from below the shelf
    (the upper bound).  The literal exterior integrals enter as exact
    per-node jump-tail rates, so no exterior mesh is involved.
    """
    R = float(R)
    if not (R > 0.0):
        raise DomainError("R must be positive")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    a_list = sorted(float(av) for av in a_seq)
    if not a_list or a_list[0] <= 0.0:
        raise ConfigError("a_seq must contain positive shelf values")
    a_list = a_list[::-1]  # decreasing
    if np.any(x_arr >= R) or np.any(x_arr <= 0.0):
        raise DomainError("evaluation points must lie in (0, R)")
    if np.any(x_arr <= 2.0 * a_list[0]):
        raise DomainError("evaluation points must sit well above the largest shelf")

    hR = ks.h_comp(R)
    lowers, uppers, per_a = [], [], []
    for a in a_list:
        n = int(np.clip(round(cells_per_shelf * (R - a) / a), 256, n_cap))
        grid = Grid(a, R, n)
        gen = build_generator(ks, grid, "Z")
        xs = grid.nodes()
        cutoff = Z_MAX_FACTOR * (R - a)
        up = np.array([_jt(ks, R - v, cutoff) + _jt(ks, R + v, cutoff) for v in xs])
        down = np.array([_jt(ks, v - a, cutoff) - _jt(ks, v + a, cutoff) for v in xs])
        # match the generator's wall-corrected kill masses so that the two
        # exit routes partition the whole probability: p_up + p_shelf = 1
        dk = _wall_correction(ks, grid.dx)
        up[-1] += dk
        down[0] += dk
        try:
            sol = np.linalg.solve(-gen.A, np.column_stack([up, down]))
        except np.linalg.LinAlgError as e:
            raise SolverError(f"exit solve failed at shelf a={a}: {e}") from e
        p_up = np.interp(x_arr, xs, sol[:, 0])
        p_dn = np.interp(x_arr, xs, sol[:, 1])
        corr = ks.h_comp(a) / hR
        lowers.append(p_up)
        uppers.append(p_up + (1.0 - p_up) * corr)
        per_a.append({"a": a, "n": n, "p_exit": p_up, "p_shelf": p_dn})

    lower = np.maximum.reduce(lowers)
    upper = np.minimum.reduce(uppers)
    widths = [float(np.max(u - l)) for l, u in zip(lowers, uppers)]
    shrank = all(w2 <= w1 * (1.0 + 1e-9) for w1, w2 in zip(widths[:-1], widths[1:]))
    if not shrank:
        warnings.warn(
            "exit_alive_prob: bracket did not shrink along the shelf sequence",
            RuntimeWarning,
        )
    upper = np.maximum(upper, lower)
    return ExitAliveReport(
        x=x_arr,
        R=R,
        value=0.5 * (lower + upper),
        bracket=upper - lower,
        lower=lower,
        upper=upper,
        per_a=tuple(per_a),
        shrank=shrank,
    )


# -- comparability reductions --------------------------------------------------


@dataclass(frozen=True)
class GaugeReport:
    sup_yx: float
    inf_yx: float
    sup_zy: float
    inf_zy: float
    sup_zx: float
    inf_zx: float

    def to_dict(self):
        return {
            "sup_yx": self.sup_yx, "inf_yx": self.inf_yx,
            "sup_zy": self.sup_zy, "inf_zy": self.inf_zy,
            "sup_zx": self.sup_zx, "inf_zx": self.inf_zx,
        }


def gauge_ratios(gX: GreenMatrix, gY: GreenMatrix, gZ: GreenMatrix) -> GaugeReport:
    """Entrywise sup/inf of G^Y/G^X, G^Z/G^Y, G^Z/G^X on a common grid."""
    if not (gX.kind, gY.kind, gZ.kind) == ("X", "Y", "Z"):
        raise ConfigError("pass the three kinds in order (X, Y, Z)")
    for g in (gY, gZ):
        if g.grid != gX.grid:
            raise ConfigError("gauge ratios need a common grid")
    ryx = gY.G / gX.G
    rzy = gZ.G / gY.G
    rzx = gZ.G / gX.G
    return GaugeReport(
        sup_yx=float(ryx.max()), inf_yx=float(ryx.min()),
        sup_zy=float(rzy.max()), inf_zy=float(rzy.min()),
        sup_zx=float(rzx.max()), inf_zx=float(rzx.min()),
    )


@dataclass(frozen=True)
class ThreeGReport:
    sup: float
    arg: tuple
    n: int


def three_g_sup(green: GreenMatrix, ks: KernelSet) -> ThreeGReport:
    """sup over triples of G(x,y) G(y,z) / G(x,z) * dist(y)^2 / Phi(dist(y)).

    The weight tames the diagonal blow-up of the raw triple ratio; the
    supremum is a Kato-type constant expected finite and refinement-stable.
    """
    if green.kind != "X":
        raise ConfigError("the triple-ratio reduction is defined for kind X")
    G = green.G
    xs = green.grid.nodes()
    dist = np.minimum(xs - green.grid.a, green.grid.b - xs)
    wgt = dist * dist / ks.phi_cap(dist)
    best = -np.inf
    arg = (0, 0, 0)
    for k in range(xs.size):
        ratio = np.outer(G[:, k], G[k, :]) / G
        m = float(ratio.max())
        v = m * wgt[k]
        if v > best:
            i, j = np.unravel_index(int(ratio.argmax()), ratio.shape)
            best = v
            arg = (int(i), int(k), int(j))
    return ThreeGReport(sup=best, arg=arg, n=green.grid.n)


@dataclass(frozen=True)
class HarnackReport:
    c6: float
    r: float
    a_frac: float
    n: int
    interval: tuple
    window: tuple
    z_at_sup: float | None  # None when the analytic tail column attains it


def harnack_sup_ratio(ks: KernelSet, r: float, a_frac: float = 0.5, *, n: int = 512,
                      n_side: int | None = None) -> HarnackReport:
    """Worst Poisson-kernel column ratio over the middle window.

    Geometry: solve kind Z on (a_frac r / 2, (3 - a_frac/2) r) and compare
    kernel rows across interior points of (a_frac r, (3 - a_frac) r).  The
    resulting constant dominates u(x1)/u(x2) for every nonnegative function
    harmonic across the window, whatever its exterior data.
    """
    if not (r > 0.0):
        raise DomainError("r must be positive")
    if not (0.0 < a_frac < 1.0):
        raise ConfigError("a_frac must lie in (0, 1)")
    b1, b4 = 0.5 * a_frac * r, (3.0 - 0.5 * a_frac) * r
    if not (b1 < b4):
        raise ConfigError("degenerate geometry")
    grid = Grid(b1, b4, n)
    gen = build_generator(ks, grid, "Z")
    pt = poisson_kernel(green_matrix(gen), ks, default_zgrid(grid, "Z", n_side))
    xs = grid.nodes()
    w1, w2 = a_frac * r, (3.0 - a_frac) * r
    mask = (xs > w1) & (xs < w2)
    if mask.sum() < 2:
        raise ConfigError("interior window holds fewer than two nodes")
    Kin = pt.K[mask]
    col_ratio = Kin.max(axis=0) / Kin.min(axis=0)
    tail = pt.tail_hi[mask]
    tail_ratio = float(tail.max() / tail.min())
    c6 = float(col_ratio.max())
    z_at = float(pt.zgrid.nodes[int(col_ratio.argmax())])
    if tail_ratio > c6:
        c6, z_at = tail_ratio, None
    return HarnackReport(
        c6=c6, r=r, a_frac=a_frac, n=n,
        interval=(b1, b4), window=(w1, w2), z_at_sup=z_at,
    )


@dataclass(frozen=True)
class BoundaryData:
    """Nonnegative exterior data supported in [z_min, inf)."""

    name: str
    fn: object = field(repr=False)
    sup: float
    tail: tuple | None  # (c, p) power tail beyond the mesh, or None
    z_min: float


def default_boundary_fset(r: float):
    """Five qualitatively different data supported in [3r, inf)."""
    s = 3.0 * r

    def step(lo, hi):
        return lambda z: ((z >= lo) & (z <= hi)).astype(float)

    bump = lambda z: np.where(z >= s, np.exp(-(((z - 4.0 * r) / (0.5 * r)) ** 2)), 0.0)
    power = lambda z: np.where(z >= s, (np.maximum(z, s) / s) ** -3.0, 0.0)
    return [
        BoundaryData("step-3r-4r", step(s, 4.0 * r), 1.0, None, s),
        BoundaryData("step-4r-6r", step(4.0 * r, 6.0 * r), 1.0, None, s),
        BoundaryData("bump-4r", bump, 1.0, None, s),
        BoundaryData("power-tail", power, 1.0, (s**3.0, 3.0), s),
        BoundaryData("step-3r-3.3r", step(s, 3.3 * r), 1.0, None, s),
    ]


@dataclass(frozen=True)
class BhpReport:
    c7: float
    c7_upper: float
    per_f: tuple
    r: float
    lambda1: float
    a: float
    n: int
    n_window: int


def bhp_sup_ratio(
    ks: KernelSet,
    r: float,
    lambda1: float = DEFAULT_LAMBDA1,
    fset=None,
    *,
    n: int = 512,
    a: float | None = None,
) -> BhpReport:
    """Boundary ratio constant: sup of u(x) h(y) / (u(y) h(x)) near the origin.

    Solves kind Z on (a, 3r) with a shelf a ~ 4 cells wide, extends each
    exterior datum harmonically, and compares the profile to h over every
    node below lambda1 r.  The shelf correction gives a bracketed variant:
    paths absorbed below a could still reach the data, adding at most
    mass_below * h(a)/h(3r) * sup f to u.
    """
    if not (r > 0.0):
        raise DomainError("r must be positive")
    if not (0.0 < lambda1 < 0.5):
        raise ConfigError("lambda1 must lie in (0, 1/2)")
    if a is None:
        a = 12.0 * r / n  # about 4 cells wide
    if not (0.0 < a < lambda1 * r / 4.0):
        raise ConfigError("shelf a must be small against the probe window")
    fset = default_boundary_fset(r) if fset is None else fset
    if not fset:
        raise ConfigError("need at least one boundary datum")

    grid = Grid(a, 3.0 * r, n)
    gen = build_generator(ks, grid, "Z")
    pt = poisson_kernel(green_matrix(gen), ks, default_zgrid(grid, "Z"))
    zg = pt.zgrid
    xs = grid.nodes()
    wmask = xs < lambda1 * r
    if wmask.sum() < 2:
        raise ConfigError("probe window holds fewer than two nodes")
    h_vec = ks.h_many(xs[wmask])
    shelf_corr = ks.h_comp(a) / ks.h_comp(3.0 * r)
    dmass = pt.mass_below()[wmask]

    sup_all, sup_up_all, per_f = 0.0, 0.0, []
    for bd in fset:
        fz = np.asarray(bd.fn(zg.nodes), dtype=float)
        inside = zg.nodes < bd.z_min
        if np.any(fz[inside] != 0.0):
            raise DomainError(f"boundary datum {bd.name} has support below {bd.z_min}")
        u = harmonic_extend(pt, fz, f_tail=bd.tail)
        uw = u[wmask]
        if np.min(uw) <= 0.0:
            raise SolverError(f"boundary datum {bd.name} is invisible from the window")
        rho = uw / h_vec
        sup_f = float(rho.max() / rho.min())
        rho_up = (uw + dmass * shelf_corr * bd.sup) / h_vec
        sup_f_up = float(rho_up.max() / rho.min())
        per_f.append({"name": bd.name, "sup": sup_f, "sup_upper": sup_f_up})
        sup_all = max(sup_all, sup_f)
        sup_up_all = max(sup_up_all, sup_f_up)

    return BhpReport(
        c7=sup_all, c7_upper=sup_up_all, per_f=tuple(per_f),
        r=r, lambda1=lambda1, a=a, n=n, n_window=int(wmask.sum()),
    )


@dataclass(frozen=True)
class SmallIntervalReport:
    lambda2: float
    R: float
    a: float
    lambda1: float
    n: int
    n_window: int


def small_interval_lower(
    ks: KernelSet,
    R: float,
    lambda1: float = DEFAULT_LAMBDA1,
    a: float = 0.004,
    *,
    n: int = 512,
    window_lo: float | None = None,
) -> SmallIntervalReport:
    """Certified floor: min over the near-origin window of G^Z / h(R).

    Domain monotonicity (the (a, R) Green function sits below the (0, R)
    one) makes this a valid lower certificate for the shelf-free object.
    ``window_lo`` pins the probe window when sweeping a, so shrinking the
    shelf compares like with like.
    """
    if not (R > 0.0):
        raise DomainError("R must be positive")
    if not (0.0 < lambda1 < 0.5):
        raise ConfigError("lambda1 must lie in (0, 1/2)")
    if not (0.0 < a < lambda1 * R / 4.0):
        raise ConfigError("shelf a must satisfy a < lambda1 R / 4")
    grid = Grid(a, R, n)
    green = green_matrix(build_generator(ks, grid, "Z"))
    xs = grid.nodes()
    wl = a if window_lo is None else float(window_lo)
    mask = (xs > wl) & (xs < lambda1 * R)
    if mask.sum() < 1:
        raise ConfigError("no grid nodes inside the probe window")
    sub = green.G[np.ix_(mask, mask)]
    lam2 = float(sub.min() / ks.h_comp(R))
    return SmallIntervalReport(
        lambda2=lam2, R=R, a=a, lambda1=lambda1, n=n, n_window=int(mask.sum()),
    )


# -- refinement diagnostics ----------------------------------------------------


def _bilinear(green: GreenMatrix, px):
    xs = green.grid.nodes()
    n = xs.size
    i = np.clip(np.searchsorted(xs, px) - 1, 0, n - 2)
    t = (px - xs[i]) / green.grid.dx
    t = np.clip(t, 0.0, 1.0)
    G = green.G
    ii, jj = np.meshgrid(i, i, indexing="ij")
    ti, tj = np.meshgrid(t, t, indexing="ij")
    out = (
        (1 - ti) * (1 - tj) * G[ii, jj]
        + ti * (1 - tj) * G[ii + 1, jj]
        + (1 - ti) * tj * G[ii, jj + 1]
        + ti * tj * G[ii + 1, jj + 1]
    )
    # on the diagonal, bilinear cells straddle the |x - y| kink of the
    # Green function; interpolate along the diagonal section instead
    k = np.arange(px.size)
    out[k, k] = np.interp(px, xs, np.diag(G))
    return out


def green_drift(coarse: GreenMatrix, fine: GreenMatrix, n_probe: int = 16) -> float:
    """Sup relative Green difference over a fixed interior probe lattice.

    Probes at a + (b - a)(k + 1/2)/n_probe with interpolation on both
    lattices; comparing raw corner entries instead would pin distinct
    continuum points against each other and never converge.
    """
    ga, gb = coarse.grid, fine.grid
    if (ga.a, ga.b) != (gb.a, gb.b):
        raise ConfigError("refinement drift needs a common interval")
    px = ga.a + (ga.b - ga.a) * (np.arange(n_probe) + 0.5) / n_probe
    Pc = _bilinear(coarse, px)
    Pf = _bilinear(fine, px)
    return float(np.max(np.abs(Pc - Pf) / Pf))

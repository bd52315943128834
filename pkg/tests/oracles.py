"""Independent reference values and the recipes that regenerate them.

Everything here is computed by routes disjoint from the package code:
special-function closed forms, a convergent alternating series for the
one-sided stable law, and the classical interval exit laws of the
symmetric stable process.  Frozen constants carry their regeneration
function; tests assert the two agree, so a stale constant cannot hide.
"""

import math


# -- closed forms for the pure stable family (alpha = 2 delta) ---------------------


def h1_closed(delta):
    """h(1) for psi(xi) = xi^(2 delta), delta in (1/2, 1).

    (1/pi) int_0^inf (1 - cos u) u^(-2 delta) du
        = Gamma(2 - 2 delta) cos(pi (2 delta - 1) / 2) / ((2 delta - 1) pi).
    """
    s = 2.0 * delta - 1.0
    return math.gamma(2.0 - 2.0 * delta) * math.cos(0.5 * math.pi * s) / (s * math.pi)


def uq0_closed(q, alpha):
    """u^q(0) = (1/pi) int_0^inf dxi/(q + xi^alpha) = q^(1/alpha - 1)/(alpha sin(pi/alpha))."""
    return q ** (1.0 / alpha - 1.0) / (alpha * math.sin(math.pi / alpha))


def levy_c_closed(alpha):
    """Jump-density constant: j(x) = c(alpha) |x|^(-1-alpha) with
    c(alpha) = alpha 2^(alpha-1) Gamma((alpha+1)/2) / (sqrt(pi) Gamma(1 - alpha/2))."""
    return (
        alpha
        * 2.0 ** (alpha - 1.0)
        * math.gamma(0.5 * (alpha + 1.0))
        / (math.sqrt(math.pi) * math.gamma(1.0 - 0.5 * alpha))
    )


def getoor_exit(alpha, R, u):
    """Mean exit time of the symmetric alpha-stable process from (-R, R),
    started at u: (R^2 - u^2)^(alpha/2) Gamma(1/2) / (2^alpha Gamma((1+alpha)/2) Gamma(1+alpha/2))."""
    lam = (
        2.0 ** alpha
        * math.gamma(0.5 * (1.0 + alpha))
        * math.gamma(1.0 + 0.5 * alpha)
        / math.gamma(0.5)
    )
    return (R * R - u * u) ** (0.5 * alpha) / lam


def bgr_density(alpha, x, v):
    """Exit-position density from (-1, 1) for the symmetric alpha-stable
    process started at x: sin(pi alpha/2)/pi (1-x^2)^(a/2) (v^2-1)^(-a/2) / |v - x|."""
    C = math.sin(0.5 * math.pi * alpha) / math.pi
    return C * (1.0 - x * x) ** (0.5 * alpha) * (v * v - 1.0) ** (-0.5 * alpha) / abs(v - x)


# -- one-sided stable law by convergent series --------------------------------------


def stable_tail_series(delta, x, kmax=400):
    """P(S > x) for the standard delta-stable subordinator.

    Alternating series (1/pi) sum_k (-1)^(k+1) Gamma(k delta) sin(pi k delta)
    x^(-k delta) / k!; convergent for every x > 0, but floating point loses
    the alternation once terms outgrow ~e^40, so small x raises instead of
    silently returning noise.  At delta = 1/2 this reproduces erf(1/(2 sqrt(x)))
    to machine precision.
    """
    tot = 0.0
    for k in range(1, kmax + 1):
        lg = math.lgamma(k * delta) - math.lgamma(k + 1) - k * delta * math.log(x)
        if lg > 40.0:
            raise ValueError(f"series unstable at x={x} for delta={delta}")
        term = math.sin(math.pi * k * delta) * math.exp(lg)
        tot += -term if k % 2 == 0 else term
    return tot / math.pi


def stable_median_series(delta, lo=0.5, hi=50.0):
    """Median of the standard delta-stable subordinator by bisection on the series."""
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if stable_tail_series(delta, mid) > 0.5:
            lo = mid
        else:
            hi = mid
    return mid


# -- frozen values -------------------------------------------------------------------

# regenerate: stable_median_series(delta)
STABLE_MEDIAN = {
    0.6: 0.9787367133941359,
    0.75: 0.8915880177298795,
    0.9: 0.886770167717133,
}

# regenerate: stable_tail_series(0.75, 100.0)
STABLE_TAIL_100_D075 = 0.008864448265886015

# regenerate: h1_closed(delta)
H1_CLOSED = {
    0.6: 1.7622403312499397,
    0.75: 0.7978845608028654,  # = sqrt(2/pi)
    0.9: 0.5644623929465977,
}

# regenerate: uq0_closed(q, 1.5)
UQ0_ALPHA15 = {
    1.0: 0.769800358919501,
    2.0: 0.6109909497771566,
    0.25: 1.2219818995543135,
}

# regenerate: levy_c_closed(1.5)
LEVY_C_ALPHA15 = 0.2992067103010746

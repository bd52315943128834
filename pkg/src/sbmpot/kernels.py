"""Kernel catalog bound to one Bernstein function.

A KernelSet owns a PhiSpec plus a quadrature contract and exposes the
kernels the interval solvers and verification checks consume:

* ``psi``            characteristic exponent psi(xi) = phi(xi^2)
* ``levy_j``         jump density of the subordinate process
* ``uq``             q-resolvent kernel on the line
* ``h_comp``         compensated potential kernel (renewal-type, increasing)
* ``green_free_x0``  Green function of the process absorbed at the origin
* ``green_free_z``   Green function of the origin-absorbed process folded
                     onto the half line (symmetrized jumps)
* ``jump_i``         folded jump kernel i(x, y) = j(|x-y|) + j(x+y)
* ``phi_cap``        scale function Phi(x) = 1/phi(x^{-2}) and its inverse
* ``gx_estimate``    two-sided Green comparator built from Phi

The jump density reduces exactly to a finite power sum: substituting
u = x^2/(4s) in the subordination integral gives

    j(x) = sum_i w_i (d_i/Gamma(1-d_i)) 4^{d_i} I(d_i) / sqrt(pi)
           * |x|^{-1-2 d_i},
    I(d) = int_0^inf u^{d-1/2} e^{-u} du,

because the Levy density of each mixture term is itself a pure power.  The
I(d) factors are computed once per instance by the adaptive engine; after
that ``levy_j`` is a vectorized power sum, cheap enough to fill dense
generator matrices.  Scalar kernels obtained by oscillatory quadrature
(``uq``, ``h_comp``) are memoized per instance.
"""

from __future__ import annotations

import math

import numpy as np

from .bernstein import PhiSpec, phi_eval
from .errors import ConfigError, DomainError, QuadratureError
from .quadrature import (
    DEFAULT_QUADSPEC,
    QuadSpec,
    integrate_adaptive,
    integrate_oscillatory_cos,
)

__all__ = ["KernelSet"]

_SQRT_PI = math.sqrt(math.pi)

# e^{-u} below ~1e-52 contributes nothing at double precision
_GAMMA_CUT = 120.0


def _key(x):
    # 12 significant digits; collapses float noise without aliasing distinct args
    return "%.12e" % float(x)


class KernelSet:
    """All kernels derived from one Bernstein function.

    Parameters
    ----------
    phi : PhiSpec
    quad : QuadSpec, optional
        Accuracy contract used for every internal integral.
    kappa_rec : float, optional
        Killing mass of the absorbed process at infinity.  The admitted
        scaling window forces recurrence, so only 0.0 is accepted; the
        parameter exists to keep the formulas honest about where the term
        would enter.
    """

    def __init__(self, phi: PhiSpec, quad: QuadSpec | None = None, kappa_rec: float = 0.0):
        if not isinstance(phi, PhiSpec):
            raise ConfigError("phi must be a PhiSpec")
        if kappa_rec != 0.0:
            raise ConfigError(
                "kappa_rec must be 0; the admitted families are recurrent"
            )
        self.phi = phi
        self.quad = quad or DEFAULT_QUADSPEC
        self.kappa_rec = 0.0
        self.delta_min = phi.delta_min
        self.delta_max = phi.delta_max
        self._jump_coefs = None  # [(coef, 2*d)] per mixture term
        self._h_memo = {}
        self._uq_memo = {}
        self._jt_memo = {}

    # -- characteristic exponent -------------------------------------------

    def psi(self, xi):
        """psi(xi) = phi(xi^2), even, psi(0) = 0."""
        arr = np.asarray(xi, dtype=float)
        out = np.zeros_like(arr)
        nz = arr != 0.0
        if np.any(nz):
            out[nz] = phi_eval(self.phi, arr[nz] * arr[nz])
        return out if isinstance(xi, np.ndarray) else float(out)

    # -- jump density and its tails ----------------------------------------

    def _coefs(self):
        if self._jump_coefs is None:
            coefs = []
            for w, d in zip(self.phi.weights(), self.phi.exponents()):
                le = d - 0.5
                r = integrate_adaptive(
                    lambda u, _d=d: np.power(u, _d - 0.5) * np.exp(-u),
                    0.0,
                    _GAMMA_CUT,
                    self.quad,
                    left_exponent=le,
                )
                if not r.converged:
                    raise QuadratureError(
                        f"gamma-type factor for exponent {d} did not converge",
                        err_est=r.err_est,
                    )
                c = w * (d / math.gamma(1.0 - d)) * (4.0**d) * r.value / _SQRT_PI
                coefs.append((c, 2.0 * d))
            self._jump_coefs = tuple(coefs)
        return self._jump_coefs

    def levy_j(self, x):
        """Jump density j(|x|); strictly decreasing in |x|, blows up at 0."""
        arr = np.abs(np.asarray(x, dtype=float))
        if arr.size and not np.all(arr > 0.0):
            raise DomainError("levy_j is singular at 0; arguments must be nonzero")
        out = np.zeros_like(arr)
        for c, a in self._coefs():
            out += c * np.power(arr, -1.0 - a)
        return out if isinstance(x, np.ndarray) else float(out)

    def jump_tail_closed(self, t, weight_exponent=0.0):
        """int_t^inf j(z) z^{-p} dz in closed form (power sum), t > 0."""
        arr = np.asarray(t, dtype=float)
        if arr.size and not np.all(arr > 0.0):
            raise DomainError("tail start must be positive")
        p = float(weight_exponent)
        out = np.zeros_like(arr)
        for c, a in self._coefs():
            out += c * np.power(arr, -(a + p)) / (a + p)
        return out if isinstance(t, np.ndarray) else float(out)

    def jump_tail(self, t, cutoff):
        """int_t^inf j(z) dz: adaptive quadrature on [t, t+cutoff], closed
        power tail beyond.  Memoized; the interval solvers hammer this with
        lattice-aligned arguments."""
        t = float(t)
        if not (t > 0.0):
            raise DomainError("tail start must be positive")
        if not (cutoff > 0.0):
            raise ConfigError("cutoff must be positive")
        k = (_key(t), _key(cutoff))
        hit = self._jt_memo.get(k)
        if hit is not None:
            return hit
        r = integrate_adaptive(self.levy_j, t, t + cutoff, self.quad)
        if not r.converged:
            raise QuadratureError(
                f"jump tail integral at t={t} did not converge", err_est=r.err_est
            )
        val = r.value + self.jump_tail_closed(t + cutoff)
        self._jt_memo[k] = val
        return val

    # -- resolvent and compensated kernels ----------------------------------

    def uq(self, q, x):
        """q-resolvent kernel u^q(x) = (1/pi) int_0^inf cos(lam x)/(q + psi(lam)) dlam."""
        q = float(q)
        if not (q > 0.0):
            raise DomainError("resolvent parameter q must be positive")
        x = abs(float(x))
        k = (_key(q), _key(x))
        hit = self._uq_memo.get(k)
        if hit is not None:
            return hit
        g = lambda lam: 1.0 / (q + phi_eval(self.phi, lam * lam))
        r = integrate_oscillatory_cos(
            g, x, self.quad, mode="cos", tail_exponent=2.0 * self.delta_max
        )
        if not r.converged:
            raise QuadratureError(f"uq({q}, {x}) did not converge", err_est=r.err_est)
        val = r.value / math.pi
        self._uq_memo[k] = val
        return val

    def h_comp(self, x):
        """Compensated potential kernel h(x) = (1/pi) int (1 - cos(lam x))/psi(lam) dlam.

        Increasing in |x| with h(0) = 0; the q->0 limit of u^q(0) - u^q(x).
        """
        x = abs(float(x))
        if x == 0.0:
            return 0.0
        k = _key(x)
        hit = self._h_memo.get(k)
        if hit is not None:
            return hit
        g = lambda lam: 1.0 / phi_eval(self.phi, lam * lam)
        r = integrate_oscillatory_cos(
            g,
            x,
            self.quad,
            mode="one_minus_cos",
            left_exponent=-2.0 * self.delta_min,
            tail_exponent=2.0 * self.delta_max,
        )
        if not r.converged:
            raise QuadratureError(f"h({x}) did not converge", err_est=r.err_est)
        val = r.value / math.pi
        self._h_memo[k] = val
        return val

    def h_many(self, xs):
        """Vectorized convenience wrapper over the memoized scalar h."""
        arr = np.asarray(xs, dtype=float)
        flat = arr.ravel()
        out = np.array([self.h_comp(v) for v in flat])
        return out.reshape(arr.shape)

    # -- free Green functions ------------------------------------------------

    def green_free_x0(self, x, y):
        """Green function of the line process absorbed at the origin.

        G(x, y) = h(x) + h(y) - h(x - y) for x, y != 0.  Under recurrence the
        product correction -kappa_rec h(x) h(y) vanishes identically.
        """
        x = float(x)
        y = float(y)
        if x == 0.0 or y == 0.0:
            raise DomainError("green_free_x0 needs nonzero arguments")
        return self.h_comp(x) + self.h_comp(y) - self.h_comp(x - y)

    def green_free_z(self, x, y):
        """Green function of the absorbed process folded onto the half line.

        G(x, y) = 2h(x) + 2h(y) - h(x - y) - h(x + y) for x, y > 0; equals
        the absorbed-process Green function summed over both sign choices.
        """
        x = float(x)
        y = float(y)
        if not (x > 0.0 and y > 0.0):
            raise DomainError("green_free_z lives on the open half line")
        return (
            2.0 * self.h_comp(x)
            + 2.0 * self.h_comp(y)
            - self.h_comp(x - y)
            - self.h_comp(x + y)
        )

    def jump_i(self, x, y):
        """Folded jump kernel i(x, y) = j(|x - y|) + j(x + y), x, y > 0, x != y."""
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if (xa.size and not np.all(xa > 0.0)) or (ya.size and not np.all(ya > 0.0)):
            raise DomainError("jump_i lives on the open half line")
        if np.any(xa == ya):
            raise DomainError("jump_i is singular on the diagonal")
        out = self.levy_j(xa - ya) + self.levy_j(xa + ya)
        scalar = not (isinstance(x, np.ndarray) or isinstance(y, np.ndarray))
        return float(out) if scalar else out

    # -- scale function and comparator ---------------------------------------

    def phi_cap(self, x):
        """Phi(x) = 1/phi(x^{-2}), increasing on (0, inf)."""
        arr = np.asarray(x, dtype=float)
        if arr.size and not np.all(arr > 0.0):
            raise DomainError("phi_cap needs positive arguments")
        out = 1.0 / phi_eval(self.phi, np.power(arr, -2.0))
        return out if isinstance(x, np.ndarray) else float(out)

    def phi_cap_inv(self, y):
        """Inverse of phi_cap, solved by bisection on log(x^{-2}).

        Brackets come in closed form from the extreme mixture terms, then
        100 bisection steps pin the root to full double precision.  The
        round trip phi_cap(phi_cap_inv(y)) = y holds to ~1e-13 relative.
        """
        arr = np.asarray(y, dtype=float)
        if arr.size and not np.all((arr > 0.0) & np.isfinite(arr)):
            raise DomainError("phi_cap_inv needs positive finite arguments")
        u = 1.0 / arr  # solve phi(t) = u, then x = t^{-1/2}
        ws = np.asarray(self.phi.weights())
        ds = np.asarray(self.phi.exponents())
        kk = float(len(ws))
        # phi(t) >= w_i t^{d_i} gives the upper bracket; phi(t) <= k max_i w_i t^{d_i}
        # gives the lower one
        cand_hi = np.min(
            np.power(u[..., None] / ws, 1.0 / ds), axis=-1
        )
        cand_lo = np.min(
            np.power(u[..., None] / (kk * ws), 1.0 / ds), axis=-1
        )
        s_lo = np.log(cand_lo)
        s_hi = np.log(cand_hi)
        for _ in range(100):
            s_mid = 0.5 * (s_lo + s_hi)
            too_low = phi_eval(self.phi, np.exp(s_mid)) < u
            s_lo = np.where(too_low, s_mid, s_lo)
            s_hi = np.where(too_low, s_hi, s_mid)
        t = np.exp(0.5 * (s_lo + s_hi))
        out = 1.0 / np.sqrt(t)
        return out if isinstance(y, np.ndarray) else float(out)

    def gx_estimate(self, a, b, x, y):
        """Two-sided Green comparator on the interval (a, b).

        With dist(x) = min(x - a, b - x) and A = sqrt(Phi(dist x) Phi(dist y)),
        returns min(A / PhiInv(A), A / |x - y|), the second branch dropped on
        the diagonal.  Strictly positive and finite for interior points.
        """
        a = float(a)
        b = float(b)
        if not (a < b) or not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError("need a finite interval a < b")
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if np.any((xa <= a) | (xa >= b) | (ya <= a) | (ya >= b)):
            raise DomainError("points must lie strictly inside (a, b)")
        dx = np.minimum(xa - a, b - xa)
        dy = np.minimum(ya - a, b - ya)
        amp = np.sqrt(self.phi_cap(dx) * self.phi_cap(dy))
        base = amp / self.phi_cap_inv(amp)
        gap = np.abs(xa - ya)
        with np.errstate(divide="ignore"):
            alt = np.where(gap > 0.0, amp / np.where(gap > 0.0, gap, 1.0), np.inf)
        out = np.minimum(base, alt)
        scalar = not (isinstance(x, np.ndarray) or isinstance(y, np.ndarray))
        return float(out) if scalar else out

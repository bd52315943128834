"""Skeleton-walk Monte Carlo for the subordinate random walk.

The process is simulated on a fixed time lattice: each step adds a Gaussian
increment with conditional variance twice the subordinator increment over
dt, so the one-step characteristic function is exp(-dt phi(xi^2)) exactly.
Only the exit detection is approximate (the walk can straddle the interval
boundary between lattice times), which biases exit times upward by O(dt)
and is the object of the dt-sweep cross-checks.

Every path owns a counter-based RNG substream keyed by (seed, path index),
so results are bitwise reproducible and independent of batching or
execution order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bernstein import PhiSpec
from .errors import ConfigError, DomainError

__all__ = [
    "PathConfig",
    "ExitStats",
    "sample_stable_subordinator",
    "sample_increment",
    "simulate_exit",
]

# growth schedule for per-path step chunks
_CHUNK_MIN = 256
_CHUNK_MAX = 8192


@dataclass(frozen=True)
class PathConfig:
    """Walk parameters: lattice step, horizon, start, interval, paths, seed.

    ``fold`` runs the walk on the absolute value (reflection at the origin),
    matching the folded form of the interval problems.
    """

    dt: float
    t_max: float
    x0: float
    interval: tuple
    n_paths: int
    seed: int
    fold: bool = False

    def __post_init__(self):
        a, b = float(self.interval[0]), float(self.interval[1])
        object.__setattr__(self, "interval", (a, b))
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive and finite")
        if not (self.t_max > self.dt):
            raise ConfigError("t_max must exceed dt")
        if not (a < b):
            raise ConfigError("interval must satisfy a < b")
        if self.fold and a < 0.0:
            raise ConfigError("folded walks need a >= 0")
        if not (a < self.x0 < b):
            raise DomainError("x0 must start inside the interval")
        if int(self.n_paths) < 1:
            raise ConfigError("n_paths must be positive")


@dataclass
class ExitStats:
    """First-exit record per path; censored paths carry NaN entries."""

    n_paths: int
    dt: float
    interval: tuple
    exited: np.ndarray = field(repr=False)  # bool mask
    exit_pos: np.ndarray = field(repr=False)
    exit_time: np.ndarray = field(repr=False)

    @property
    def censored(self) -> int:
        return int(self.n_paths - np.count_nonzero(self.exited))

    def creep_count(self, eps: float) -> int:
        """Exited paths landing within eps of either interval endpoint."""
        a, b = self.interval
        p = self.exit_pos[self.exited]
        return int(np.count_nonzero(np.minimum(np.abs(p - a), np.abs(p - b)) < eps))


def sample_stable_subordinator(delta: float, size, rng) -> np.ndarray:
    """Draws of the standard stable subordinator S with E exp(-lam S) = exp(-lam^delta).

    Uses the product representation
        A(u) = [sin(delta pi u)^delta sin((1-delta) pi u)^(1-delta) / sin(pi u)]^(1/(1-delta)),
        S = (A(U) / E)^((1-delta)/delta),
    with U uniform on (0,1) and E unit exponential.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0,1)")
    u = rng.random(size)
    # keep u strictly inside (0,1); endpoint draws would divide by sin(0)
    np.clip(u, 1e-16, 1.0 - 1e-16, out=u)
    e = rng.standard_exponential(size)
    pu = math.pi * u
    logA = (
        delta * np.log(np.sin(delta * pu))
        + (1.0 - delta) * np.log(np.sin((1.0 - delta) * pu))
        - np.log(np.sin(pu))
    ) / (1.0 - delta)
    return np.exp((1.0 - delta) / delta * (logA - np.log(e)))


def sample_increment(spec: PhiSpec, dt: float, size, rng) -> np.ndarray:
    """One lattice increment of the walk: N(0, 2 S_dt) with S_dt the
    subordinator increment; for mixtures the terms add as independent
    subordinators with time scales (w_i dt)^(1/delta_i)."""
    if dt <= 0.0:
        raise ConfigError("dt must be positive")
    s = np.zeros(size)
    for w, d in zip(spec.weights(), spec.exponents()):
        s += (w * dt) ** (1.0 / d) * sample_stable_subordinator(d, size, rng)
    return np.sqrt(2.0 * s) * rng.standard_normal(size)


def _walk_one(spec, cfg, rng):
    """Walk a single path to first exit; returns (pos, time) or None."""
    a, b = cfg.interval
    x = cfg.x0
    n_max = int(math.ceil(cfg.t_max / cfg.dt))
    done = 0
    chunk = _CHUNK_MIN
    while done < n_max:
        m = min(chunk, n_max - done)
        inc = sample_increment(spec, cfg.dt, m, rng)
        raw = x + np.cumsum(inc)
        pos = np.abs(raw) if cfg.fold else raw
        out = (pos <= a) | (pos >= b)
        k = int(np.argmax(out))
        if out[k]:
            return float(pos[k]), (done + k + 1) * cfg.dt
        x = float(raw[-1])  # carry the unfolded coordinate
        done += m
        chunk = min(chunk * 2, _CHUNK_MAX)
    return None


def simulate_exit(cfg: PathConfig, spec: PhiSpec) -> ExitStats:
    """First-exit statistics over cfg.n_paths independent walks.

    Path i uses the Philox substream keyed (seed, i); identical seeds give
    bitwise-identical results whatever the execution order.  All paths
    censoring at t_max is downgraded to a warning result.
    """
    n = int(cfg.n_paths)
    exited = np.zeros(n, bool)
    epos = np.full(n, np.nan)
    etime = np.full(n, np.nan)
    for i in range(n):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([cfg.seed, i], dtype=np.uint64))
        )
        hit = _walk_one(spec, cfg, rng)
        if hit is not None:
            exited[i] = True
            epos[i], etime[i] = hit
    if not exited.any():
        warnings.warn(
            "simulate_exit: every path was censored at t_max", RuntimeWarning
        )
    return ExitStats(
        n_paths=n, dt=cfg.dt, interval=cfg.interval,
        exited=exited, exit_pos=epos, exit_time=etime,
    )

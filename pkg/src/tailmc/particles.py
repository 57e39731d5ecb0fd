"""Poisson particle system, argmax path construction and max-stability.

A pool realizes a truncated Poisson point process whose mean measure is
the represented tail measure: either one Frechet-ordered stack of
particles ``gamma_i Z^(i)`` (spectral kind) or an independent stack per
integer shift (moving-shift kind).  The stationary series records at
each time the position of the particle with the largest pseudonorm.
Truncation is certified, not heuristic: every pool carries an upper
bound on the probability that a discarded particle exceeds the working
threshold anywhere on the horizon.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import poisson

from . import kernels
from .cone import Cone, ConeElement
from .models import WindowBatch
from .representations import RepSampler, TildeZSampler
from .rng import stream

__all__ = [
    "ParticlePool",
    "Path",
    "PathEnsemble",
    "build_pool",
    "build_pool_moving_shift",
    "truncation_bound",
    "default_pool_size",
    "construct_x_argmax",
    "max_stable_path",
    "m_dependent_path",
    "odot",
    "odot_combine",
    "simulate_ensemble",
]

_CHUNK_STACKS = 8192
DEFAULT_CERT_TOL = 1e-4
DEFAULT_UMIN_FRAC = 0.05


@dataclass(frozen=True)
class ParticlePool:
    """Truncated particle system with its truncation certificate.

    ``gammas[s, i]`` is the i-th Frechet weight of stack s (strictly
    decreasing in i); stack s is anchored at integer shift ``tvals[s]``
    and its particles carry windows over lags ``tvals[s] + lo ..``.
    Spectral pools have a single stack at shift 0.
    """

    kind: str
    alpha: float
    cone: Cone
    gammas: np.ndarray
    tvals: np.ndarray
    lo: int
    norms: np.ndarray
    values: np.ndarray
    norm_bound: Optional[float]
    cert_u_min: Optional[float] = None
    cert_bound: Optional[float] = None
    meta: dict = field(default_factory=dict)

    @property
    def n_stacks(self) -> int:
        return self.gammas.shape[0]

    @property
    def n_per_stack(self) -> int:
        return self.gammas.shape[1]

    @property
    def width(self) -> int:
        return self.norms.shape[2]

    @property
    def hi(self) -> int:
        return self.lo + self.width - 1

    def with_certificate(self, u_min: float) -> "ParticlePool":
        b = truncation_bound(self, u_min)
        return ParticlePool(self.kind, self.alpha, self.cone, self.gammas,
                            self.tvals, self.lo, self.norms, self.values,
                            self.norm_bound, u_min, b, self.meta)


def _gamma_stacks(n_stacks: int, n: int, rng: np.random.Generator, alpha: float):
    g = np.cumsum(rng.standard_exponential((n_stacks, n)), axis=1)
    return g ** (-1.0 / alpha)


def build_pool(rep: RepSampler, n_particles: int, rng: np.random.Generator,
               u_min: Optional[float] = None) -> ParticlePool:
    """Single-stack pool ``{gamma_i Z^(i)}`` from a polar Z sampler."""
    if n_particles < 1:
        raise ValueError("need at least one particle")
    if not rep.is_z_kind:
        raise ValueError("spectral pools are built from Z-kind samplers")
    gammas = _gamma_stacks(1, n_particles, rng, rep.alpha)
    batch = rep.sample(n_particles, rng)
    norms = batch.norms[None, :, :]
    values = batch.values[None, :, :]
    pool = ParticlePool("spectral", rep.alpha, rep.cone, gammas,
                        np.zeros(1, dtype=np.int64), batch.lo, norms, values,
                        rep.norm_bound, meta={"rep": rep.describe()})
    if u_min is not None and rep.norm_bound is not None:
        pool = pool.with_certificate(u_min)
    return pool


def build_pool_moving_shift(tz: TildeZSampler, horizon: int, n_per_shift: int,
                            rng: np.random.Generator,
                            u_min: Optional[float] = None) -> ParticlePool:
    """One independent Frechet stack per shift whose window meets the horizon.

    Shifts run over ``[-hi, horizon - 1 - lo]`` for a particle window
    ``lo..hi``; any other shift cannot touch lags ``0..horizon-1``.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if n_per_shift < 1:
        raise ValueError("need at least one particle per shift")
    if not isinstance(tz, TildeZSampler):
        raise ValueError("moving-shift pools are built from tilde-Z samplers")
    t_lo, t_hi = -tz.hi, horizon - 1 - tz.lo
    tvals = np.arange(t_lo, t_hi + 1, dtype=np.int64)
    S = len(tvals)
    gammas = _gamma_stacks(S, n_per_shift, rng, tz.alpha)
    batch = tz.sample(S * n_per_shift, rng)
    norms = batch.norms.reshape(S, n_per_shift, -1)
    if tz.cone.is_scalar:
        values = norms
    else:
        values = batch.values.reshape(S, n_per_shift, norms.shape[2], tz.cone.dim)
    pool = ParticlePool("moving-shift", tz.alpha, tz.cone, gammas, tvals,
                        batch.lo, norms, values, tz.norm_bound,
                        meta={"rep": tz.describe(), "horizon": horizon})
    if u_min is None:
        u_min = DEFAULT_UMIN_FRAC * horizon ** (1.0 / tz.alpha)
    return pool.with_certificate(u_min)


def _stack_tail_bound(x: float, n_kept: int) -> float:
    """``E[(Pois(x) - N)^+]``: expected discarded particles below level x.

    The Frechet weights of one stack below ``gamma = x^(-1/alpha)`` are
    Poisson(x) many; discarding all but the first N leaves at most
    ``(Pois(x) - N)^+`` relevant ones, and Markov's inequality turns the
    expectation into a probability bound.
    """
    return float(x * poisson.sf(n_kept - 1, x) - n_kept * poisson.sf(n_kept, x))


def truncation_bound(pool: ParticlePool, u_min: float) -> float:
    """Certified bound on any discarded particle exceeding ``u_min``.

    A discarded particle of a stack exceeds ``u_min`` somewhere only if
    its Frechet weight exceeds ``u_min / b`` with ``b`` the almost-sure
    norm bound of the sampler, hence only if its Poisson point falls
    below ``x = (b / u_min)^alpha``.  Summing the expected count of such
    points over stacks bounds the probability.
    """
    if u_min <= 0:
        raise ValueError("u_min must be positive")
    if pool.norm_bound is None:
        raise ValueError("norm moments unavailable: the sampler declares no "
                         "almost-sure norm bound, so no certificate exists")
    x = (pool.norm_bound / u_min) ** pool.alpha
    return min(1.0, pool.n_stacks * _stack_tail_bound(x, pool.n_per_stack))


def default_pool_size(norm_bound: float, alpha: float, n_stacks: int,
                      u_min: float, tol: float = DEFAULT_CERT_TOL,
                      n_max: int = 512) -> int:
    """Smallest per-stack count whose certificate meets ``tol`` at ``u_min``."""
    x = (norm_bound / u_min) ** alpha
    for n in range(1, n_max + 1):
        if n_stacks * _stack_tail_bound(x, n) <= tol:
            return n
    raise ValueError("no particle count up to n_max meets the tolerance")


@dataclass(frozen=True)
class Path:
    """One realized path: values, pseudonorms, winning particle ids."""

    cone: Cone
    lo: int
    values: np.ndarray
    norms: np.ndarray
    winner: np.ndarray
    ties: int

    def __len__(self) -> int:
        return len(self.norms)


def _extract(pool: ParticlePool, out_lo: int, n_out: int,
             offsets: Optional[tuple] = None) -> Path:
    """Scatter-max all pool contributions onto output lags ``out_lo..``.

    ``offsets`` optionally restricts particle window offsets to a
    sub-range (used by the m-dependent approximation).
    """
    path = np.zeros(n_out)
    winner = np.full(n_out, -1, dtype=np.int64)
    d0, d1 = (0, pool.width - 1) if offsets is None else offsets
    d0 = max(d0, 0)
    d1 = min(d1, pool.width - 1)
    ties = 0
    N = pool.n_per_stack
    if d1 >= d0:
        for s0 in range(0, pool.n_stacks, _CHUNK_STACKS):
            s1 = min(s0 + _CHUNK_STACKS, pool.n_stacks)
            contrib = pool.gammas[s0:s1, :, None] * pool.norms[s0:s1, :, d0:d1 + 1]
            contrib = np.ascontiguousarray(contrib)
            ties += kernels.scatter_max_path(
                contrib, pool.tvals[s0:s1],
                pool.lo + d0 - out_lo, path, winner, s0 * N)
    if pool.cone.is_scalar:
        values = path
    else:
        values = np.zeros((n_out, pool.cone.dim))
        hit = winner >= 0
        if hit.any():
            w = winner[hit]
            s, i = w // N, w % N
            lags = out_lo + np.arange(n_out)[hit]
            d = lags - pool.tvals[s] - pool.lo
            values[hit] = pool.gammas[s, i, None] * pool.values[s, i, d]
    return Path(pool.cone, out_lo, values, path, winner, int(ties))


def _check_certificate(pool: ParticlePool, cert_tol: Optional[float]):
    if cert_tol is None:
        return
    if pool.cert_bound is None:
        raise ValueError("pool carries no truncation certificate")
    if pool.cert_bound > cert_tol:
        raise ValueError(
            f"truncation certificate {pool.cert_bound:.3g} exceeds the "
            f"tolerance {cert_tol:.3g} at u_min = {pool.cert_u_min:.3g}")


def construct_x_argmax(pool: ParticlePool, horizon: Optional[int] = None,
                       cert_tol: Optional[float] = 1e-3) -> Path:
    """The stationary series: at each lag, the position of the largest particle.

    Exact float ties resolve to the smallest (stack, particle) index and
    are counted (an almost-surely null event; nonzero counts flag rng
    misuse).  Lags where every particle vanishes yield the zero element.
    """
    _check_certificate(pool, cert_tol)
    if pool.kind == "spectral":
        return _extract(pool, pool.lo, pool.width)
    if horizon is None:
        horizon = int(pool.meta.get("horizon", 0))
    if horizon < 1:
        raise ValueError("moving-shift pools need an explicit horizon")
    return _extract(pool, 0, horizon)


def max_stable_path(pool: ParticlePool, horizon: Optional[int] = None,
                    cert_tol: Optional[float] = 1e-3) -> np.ndarray:
    """Norm path ``M_h = sup_i gamma_i ||Z_h||``; max-stable by construction."""
    return construct_x_argmax(pool, horizon, cert_tol).norms


def m_dependent_path(pool: ParticlePool, m: int,
                     horizon: Optional[int] = None,
                     cert_tol: Optional[float] = 1e-3) -> Path:
    """Argmax path keeping only particles with ``|h - T_i| <= m``.

    The result is an (2m + width)-dependent series; with m at least the
    window half-width it coincides with :func:`construct_x_argmax`.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if pool.kind != "moving-shift":
        raise ValueError("the m-dependent approximation needs a moving-shift pool")
    _check_certificate(pool, cert_tol)
    if horizon is None:
        horizon = int(pool.meta.get("horizon", 0))
    # offset d corresponds to relative lag pool.lo + d
    return _extract(pool, 0, horizon, offsets=(-m - pool.lo, m - pool.lo))


def odot(x: ConeElement, y: ConeElement) -> ConeElement:
    """Norm-dominance selection: x unless y has strictly larger norm."""
    if x.cone != y.cone:
        raise ValueError("elements live on different cones")
    return x if x.norm >= y.norm else y


def odot_combine(norms: np.ndarray, values: Optional[np.ndarray],
                 alpha: float) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Componentwise odot over i.i.d. replicate paths, scaled by ``n^(-1/alpha)``.

    ``norms`` has shape (n_replicates, horizon); the winner at each lag
    is the replicate with the largest norm (smallest index on ties).
    Returns the combined (norms, values).
    """
    k = norms.shape[0]
    scale = k ** (-1.0 / alpha)
    win = np.argmax(norms, axis=0)
    cols = np.arange(norms.shape[1])
    out_norms = scale * norms[win, cols]
    out_values = None
    if values is not None:
        out_values = scale * values[win, cols]
    return out_norms, out_values


@dataclass(frozen=True)
class PathEnsemble:
    """Replicated simulated paths over a common horizon."""

    cone: Cone
    horizon: int
    norms: np.ndarray
    values: np.ndarray
    seed: int
    meta: dict = field(default_factory=dict)
    ties: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def replicates(self) -> int:
        return self.norms.shape[0]

    def to_csv(self, path) -> None:
        """Write rows ``replicate, h, components..., norm``."""
        with open(path, "w") as f:
            d = 1 if self.cone.is_scalar else self.cone.dim
            cols = ",".join(f"x{j}" for j in range(d))
            f.write(f"replicate,h,{cols},norm\n")
            for r in range(self.replicates):
                for h in range(self.horizon):
                    if self.cone.is_scalar:
                        comp = f"{self.values[r, h]!r}"
                    else:
                        comp = ",".join(repr(v) for v in self.values[r, h])
                    f.write(f"{r},{h},{comp},{self.norms[r, h]!r}\n")


_REPLICATE_TAG = 101


def simulate_ensemble(tz: TildeZSampler, horizon: int, replicates: int,
                      seed: int, n_per_shift: Optional[int] = None,
                      u_min: Optional[float] = None,
                      cert_tol: float = DEFAULT_CERT_TOL,
                      workers: int = 1, m: Optional[int] = None) -> PathEnsemble:
    """Simulate independent argmax paths from per-replicate seeded streams.

    The per-stack particle count defaults to the smallest one whose
    truncation certificate meets ``cert_tol`` at the working threshold
    ``u_min`` (default ``0.05 n^(1/alpha)``).  Results do not depend on
    ``workers``.
    """
    if u_min is None:
        u_min = DEFAULT_UMIN_FRAC * horizon ** (1.0 / tz.alpha)
    if n_per_shift is None:
        n_stacks = horizon - 1 - tz.lo + tz.hi + 1
        n_per_shift = default_pool_size(tz.norm_bound, tz.alpha, n_stacks,
                                        u_min, cert_tol)
        n_per_shift = max(n_per_shift, 2)

    def one(r: int) -> Path:
        rng = stream(seed, _REPLICATE_TAG, r)
        pool = build_pool_moving_shift(tz, horizon, n_per_shift, rng, u_min)
        if m is None:
            return construct_x_argmax(pool, horizon, cert_tol=None)
        return m_dependent_path(pool, m, horizon, cert_tol=None)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            paths = list(ex.map(one, range(replicates)))
    else:
        paths = [one(r) for r in range(replicates)]
    norms = np.stack([p.norms for p in paths])
    values = np.stack([p.values for p in paths])
    ties = np.array([p.ties for p in paths], dtype=np.int64)
    # recompute the certificate once for the ensemble record
    cert = None
    if tz.norm_bound is not None:
        n_stacks = horizon - 1 - tz.lo + tz.hi + 1
        x = (tz.norm_bound / u_min) ** tz.alpha
        cert = min(1.0, n_stacks * _stack_tail_bound(x, n_per_shift))
    meta = {
        "rep": tz.describe(), "n_per_shift": n_per_shift, "u_min": u_min,
        "cert_bound": cert, "m": m,
    }
    return PathEnsemble(tz.cone, horizon, norms, values, seed, meta, ties)

"""Maximal and extremal indices: analytic, representation-based, empirical.

The maximal index of a normalized 1-homogeneous functional tau is the
subadditive limit of block exceedance masses; for dissipative tail
measures it has three equivalent representation formulas (moving-shift
sup, spectral ratio, argmax-conditioned) and, for tau the norm at lag 0,
coincides with the candidate extremal index and with the extremal index
of the simulated series.  Every estimator here carries its standard
error so the mutual agreement checks are quantitative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d

from .cone import TauFunctional, infargmax_norms
from .models import SpectralModel
from .particles import PathEnsemble
from .representations import TildeZSampler

__all__ = [
    "IndexEstimate",
    "normalize_tau",
    "maximal_index_limit",
    "maximal_index_limit_exact",
    "maximal_index_dissipative",
    "maximal_index_spectral",
    "maximal_index_infargmax",
    "candidate_extremal_index",
    "smith_weissman_check",
    "blocks_extremal_index",
    "m_dep_ratio_index",
    "anti_clustering_diagnostic",
]


@dataclass(frozen=True)
class IndexEstimate:
    """An index estimate with its standard error and method tag.

    The estimand lives in [0, 1].  Values are never clamped; an estimate
    outside [0 - 4 se, 1 + 4 se] is rejected as an error since no
    sampling fluctuation explains it.
    """

    value: float
    se: float
    method: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        slack = 4.0 * self.se
        if not (-slack <= self.value <= 1.0 + slack):
            raise ValueError(
                f"index estimate {self.value} ({self.method}) is outside [0, 1] "
                "beyond statistical noise")

    def as_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "method": self.method,
                "n": self.n, "params": self.params}


def _tau_shift_range(tz_lo: int, tz_hi: int, tau: TauFunctional) -> np.ndarray:
    """Shifts j for which ``tau(B^j w)`` can be nonzero on window ``lo..hi``."""
    extra = tau.q.halfwidth if tau.kind == "supq" and tau.q is not None else 0
    if tau.kind == "custom":
        extra = max(-tz_lo, tz_hi)
    return np.arange(-tz_hi - extra, -tz_lo + extra + 1)


def _tau_alpha_profile(norms: np.ndarray, lo: int, tau: TauFunctional,
                       alpha: float, shifts: np.ndarray) -> np.ndarray:
    """Matrix ``tau^alpha(B^j w_i)`` over samples i and shifts j."""
    prof = tau.shifted_profile(norms, lo, shifts)
    return prof**alpha


def normalize_tau(tz: TildeZSampler, tau: TauFunctional, n: int,
                  rng: np.random.Generator) -> tuple[TauFunctional, float, float]:
    """Rescale tau so the represented measure of ``{tau > 1}`` is one.

    That mass equals ``sum_h E[tau^alpha(B^h tilde Z)]``; the rescaled
    functional divides by its 1/alpha power.  Returns the rescaled tau,
    the mass estimate and its standard error.
    """
    shifts = _tau_shift_range(tz.lo, tz.hi, tau)
    batch = tz.sample(n, rng)
    v = _tau_alpha_profile(batch.norms, batch.lo, tau, tz.alpha, shifts)
    per_sample = v.sum(axis=1)
    s = float(per_sample.mean())
    se = float(per_sample.std() / math.sqrt(n))
    if s <= 0:
        raise ValueError("tau vanishes on the representation support")
    scaled = tau.with_scale(tau.scale / s ** (1.0 / tz.alpha))
    return scaled, s, se


def _require_normalized(tau: TauFunctional, tz: TildeZSampler, rng, n=20_000,
                        tol=4.0):
    _, s, se = normalize_tau(tz, tau, n, rng)
    if abs(s - 1.0) > tol * max(se, 1e-12):
        raise ValueError(
            f"tau is not normalized: nu(tau > 1) is about {s:.4g}; "
            "call normalize_tau first")


def maximal_index_limit(tz: TildeZSampler, tau: TauFunctional,
                        n_values: Sequence[int], samples: int,
                        rng: np.random.Generator) -> dict:
    """Monte Carlo block-mass sequence ``u_n / n`` converging to the index.

    Uses the moving-shift form ``u_n = sum_h E[max over a length-n block
    of tau^alpha(B^(k+h) tilde Z)]``, checks the subadditive consistency
    ``u_n / n >= inf_m u_m / m`` and reports the trend.
    """
    _require_normalized(tau, tz, rng)
    shifts = _tau_shift_range(tz.lo, tz.hi, tau)
    batch = tz.sample(samples, rng)
    v = _tau_alpha_profile(batch.norms, batch.lo, tau, tz.alpha, shifts)
    rows = []
    for n in n_values:
        if n < 1:
            raise ValueError("block lengths must be positive")
        padded = np.pad(v, ((0, 0), (n - 1, 0)))
        win = _forward_window_max(padded, n)
        per_sample = win.sum(axis=1)
        est = float(per_sample.mean()) / n
        se = float(per_sample.std() / math.sqrt(samples)) / n
        rows.append({"n": int(n), "value": est, "se": se})
    inf_val = min(r["value"] for r in rows)
    fekete_ok = all(r["value"] >= inf_val - 4 * r["se"] - 1e-12 for r in rows)
    return {"rows": rows, "fekete_consistent": fekete_ok,
            "nonincreasing_trend": all(
                rows[i + 1]["value"] <= rows[i]["value"] + 4 *
                math.hypot(rows[i]["se"], rows[i + 1]["se"])
                for i in range(len(rows) - 1))}


def _forward_window_max(a: np.ndarray, n: int) -> np.ndarray:
    """Row-wise ``out[t] = max(a[t .. t+n-1])`` with zero fill."""
    if n == 1:
        return a.copy()
    origin = -(n // 2) + (0 if n % 2 == 1 else 0)
    out = maximum_filter1d(a, size=n, axis=-1, mode="constant", cval=0.0,
                           origin=min(n // 2, (n - 1) // 2))
    return out


def maximal_index_limit_exact(model: SpectralModel, tau: TauFunctional,
                              n_values: Sequence[int]) -> list[dict]:
    """Exact ``u_n / n`` by enumeration for models with finite support.

    Also returns the raw ``u_n`` so subadditivity can be checked exactly.
    """
    enum = model.enumerate_norms()
    if enum is None:
        raise ValueError("model does not support exact enumeration")
    probs, norms = enum
    s = float(np.sum(norms**model.alpha, axis=1) @ probs)  # guard: tilde-Z scaling
    tilde = norms / np.sum(norms**model.alpha, axis=1, keepdims=True) ** (1 / model.alpha)
    shifts = _tau_shift_range(model.lo, model.hi, tau)
    v = _tau_alpha_profile(tilde, model.lo, tau, model.alpha, shifts)
    out = []
    for n in n_values:
        padded = np.pad(v, ((0, 0), (n - 1, 0)))
        win = _forward_window_max(padded, n)
        u_n = float(win.sum(axis=1) @ probs)
        out.append({"n": int(n), "u_n": u_n, "value": u_n / n})
    return out


def maximal_index_dissipative(tz: TildeZSampler, tau: TauFunctional,
                              samples: int, rng: np.random.Generator,
                              check_normalized: bool = True) -> IndexEstimate:
    """``E[sup_h tau^alpha(B^h tilde Z)]`` over the moving-shift representation."""
    if check_normalized:
        _require_normalized(tau, tz, rng)
    shifts = _tau_shift_range(tz.lo, tz.hi, tau)
    batch = tz.sample(samples, rng)
    v = _tau_alpha_profile(batch.norms, batch.lo, tau, tz.alpha, shifts).max(axis=1)
    return IndexEstimate(float(v.mean()), float(v.std() / math.sqrt(samples)),
                         "dissipative-tildeZ", samples, {"tau": tau.name})


def maximal_index_spectral(model: SpectralModel, tau: TauFunctional,
                           samples: int, rng: np.random.Generator) -> IndexEstimate:
    """``E[sup_h tau^alpha(B^h Theta) / sum_h ||Theta_h||^alpha]``."""
    batch = model.sample(samples, rng)
    shifts = _tau_shift_range(model.lo, model.hi, tau)
    num = _tau_alpha_profile(batch.norms, batch.lo, tau, model.alpha, shifts).max(axis=1)
    den = np.sum(batch.norms**model.alpha, axis=1)
    v = num / den
    return IndexEstimate(float(v.mean()), float(v.std() / math.sqrt(samples)),
                         "spectral-ratio", samples, {"tau": tau.name})


def maximal_index_infargmax(model: SpectralModel, tau: TauFunctional,
                            samples: int, rng: np.random.Generator) -> IndexEstimate:
    """``P(I(Theta) = 0) E[sup_h tau^alpha(B^h Q)]`` in one pass.

    The product equals ``E[1{I(Theta) = 0} sup_h tau^alpha(B^h Theta)]``,
    so a single batch yields the estimate with a clean standard error;
    the acceptance rate is reported alongside.
    """
    batch = model.sample(samples, rng)
    lags, valid = infargmax_norms(batch.norms, batch.lo)
    accept = (lags == 0) & valid
    shifts = _tau_shift_range(model.lo, model.hi, tau)
    sup = _tau_alpha_profile(batch.norms, batch.lo, tau, model.alpha, shifts).max(axis=1)
    v = np.where(accept, sup, 0.0)
    return IndexEstimate(float(v.mean()), float(v.std() / math.sqrt(samples)),
                         "infargmax-Q", samples,
                         {"tau": tau.name, "acceptance_rate": float(accept.mean())})


def candidate_extremal_index(model: SpectralModel, samples: int,
                             rng: np.random.Generator) -> IndexEstimate:
    """``P(sup_(i>=1) R ||Theta_i|| <= 1)`` with the Pareto radius integrated out.

    Conditionally on Theta the probability is ``(1 - M^alpha)^+`` with
    M the forward sup, which removes the radius noise.
    """
    batch = model.sample(samples, rng)
    cols = [j - batch.lo for j in range(1, batch.hi + 1)]
    if cols:
        m = batch.norms[:, cols].max(axis=1)
    else:
        m = np.zeros(len(batch))
    v = np.where(m <= 1.0, 1.0 - m**model.alpha, 0.0)
    return IndexEstimate(float(v.mean()), float(v.std() / math.sqrt(samples)),
                         "candidate", samples, {})


def smith_weissman_check(u, n_values: Sequence[int]) -> list[dict]:
    """Exact sliding-block averages of a finitely supported sequence.

    For each n evaluates ``(1/n) sum_h max over the length-n block at h``
    of u, the limit ``sup u`` and the gap, and verifies the finite-support
    bound ``gap <= support width * sup / n``.  Integer inputs are handled
    in exact rational arithmetic.
    """
    if isinstance(u, dict):
        lags = sorted(u)
        lo, values = lags[0], [u.get(j, 0) for j in range(lags[0], lags[-1] + 1)]
    else:
        lo, values = u
    vals = list(values)
    if any(v < 0 for v in vals):
        raise ValueError("sequence must be nonnegative")
    if not any(v > 0 for v in vals):
        vals = [0]
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    conv = Fraction if exact else float
    vals = [conv(v) for v in vals]
    hi = lo + len(vals) - 1
    sup = max(vals)
    width = len(vals)
    out = []
    for n in n_values:
        total = conv(0)
        for h in range(lo - n + 1, hi + 1):
            block = [vals[j - lo] for j in range(h, h + n) if lo <= j <= hi]
            if block:
                total += max(block)
        value = total / n if exact else total / float(n)
        gap = sup - value if sup >= value else conv(0)
        out.append({
            "n": int(n),
            "value": value,
            "sup": sup,
            "gap": gap,
            "gap_bound_ok": abs(gap) <= Fraction(width) * sup / n if exact
            else abs(gap) <= width * float(sup) / n + 1e-12,
        })
    return out


def blocks_extremal_index(ens: PathEnsemble, alpha: float, r: int,
                          H: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                          bootstrap: int = 500,
                          rng: Optional[np.random.Generator] = None) -> IndexEstimate:
    """Disjoint-blocks extremal index of ``H(X)`` at threshold ``a_r = r^(1/alpha)``.

    Per replicate computes ``log P(max over a block <= a_r) /
    (r log P(H(X_0) <= a_r))``, averages over replicates and reports a
    bootstrap standard error over replicates.  Replicates with
    degenerate blocks (all above or all below threshold) are excluded
    and counted.
    """
    if r < 1 or r > ens.horizon:
        raise ValueError("block length must be in [1, horizon]")
    x = ens.norms if H is None else np.asarray(H(ens.values))
    nb = ens.horizon // r
    a_r = r ** (1.0 / alpha)
    used = x[:, : nb * r].reshape(ens.replicates, nb, r)
    block_ok = (used.max(axis=2) <= a_r).mean(axis=1)
    marg_ok = (used.reshape(ens.replicates, -1) <= a_r).mean(axis=1)
    good = (block_ok > 0) & (block_ok < 1) & (marg_ok > 0) & (marg_ok < 1)
    degenerate = int((~good).sum())
    if not good.any():
        raise ValueError("all replicates are degenerate at this block length")
    theta_rep = np.log(block_ok[good]) / (r * np.log(marg_ok[good]))
    value = float(theta_rep.mean())
    if rng is None:
        rng = np.random.default_rng(0)
    k = len(theta_rep)
    if k > 1 and bootstrap > 0:
        idx = rng.integers(0, k, size=(bootstrap, k))
        se = float(np.std(theta_rep[idx].mean(axis=1)))
    else:
        se = float(theta_rep.std() / math.sqrt(max(k, 1)))
    return IndexEstimate(value, se, "blocks-empirical", int(ens.replicates),
                         {"r": int(r), "a_r": a_r, "degenerate": degenerate,
                          "replicates_used": k})


def m_dep_ratio_index(tz: TildeZSampler, m: int, samples: int,
                      rng: np.random.Generator,
                      hbar: Optional[Callable[[np.ndarray], np.ndarray]] = None
                      ) -> IndexEstimate:
    """Extremal index of the m-dependent approximation, by the ratio formula.

    ``E[max over |h| <= m of Hbar^alpha(tilde Z_h)] /
    E[sum over |h| <= m of Hbar^alpha(tilde Z_h)]`` with Hbar the
    pseudonorm by default.  Nondecreasing in m and equal to the maximal
    index once m covers the window.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    batch = tz.sample(samples, rng)
    g = batch.norms if hbar is None else np.asarray(hbar(batch.values))
    a = max(batch.lo, -m) - batch.lo
    b = min(batch.hi, m) - batch.lo
    if b < a:
        raise ValueError("the window does not meet [-m, m]")
    sub = g[:, a : b + 1] ** tz.alpha
    num = sub.max(axis=1)
    den = sub.sum(axis=1)
    mden = float(den.mean())
    if mden <= 0:
        raise ValueError("degenerate H: zero denominator")
    value = float(num.mean()) / mden
    # delta-method standard error for the ratio of correlated means
    cov = np.cov(num, den)
    grad = np.array([1.0 / mden, -float(num.mean()) / mden**2])
    se = float(math.sqrt(max(grad @ cov @ grad, 0.0) / samples))
    return IndexEstimate(value, se, "m-dep-ratio", samples, {"m": int(m)})


def anti_clustering_diagnostic(ens: PathEnsemble, alpha: float, u: float,
                               m_values: Sequence[int], r_n: int,
                               min_events: int = 50) -> dict:
    """Empirical anti-clustering curve of the simulated series.

    For each m estimates ``P(max over m <= |h| <= r_n of ||X_(t+h)|| >
    u a_n | ||X_t|| > u a_n)`` pooling all conditioning events away from
    the horizon edges.  The curve decaying to zero in m is the
    computable trace of the anti-clustering condition.
    """
    if r_n >= ens.horizon // 2:
        raise ValueError("r_n must be small relative to the horizon")
    for m in m_values:
        if m < 1 or m > r_n:
            raise ValueError("each m must satisfy 1 <= m <= r_n")
    a_n = ens.horizon ** (1.0 / alpha)
    thresh = u * a_n
    exc = ens.norms > thresh
    centers = exc[:, r_n : ens.horizon - r_n]
    n_events = int(centers.sum())
    curve = []
    for m in m_values:
        width = r_n - m + 1
        hits = 0
        for rrow in range(ens.replicates):
            e = exc[rrow].astype(np.uint8)
            left = _forward_window_max(e[None, :], width)[0]
            # left[t] = any exceedance in [t, t + width - 1]
            t = np.arange(r_n, ens.horizon - r_n)
            sel = e[t] == 1
            if not sel.any():
                continue
            ts = t[sel]
            left_band = left[ts - r_n]  # covers [t - r_n, t - m]
            right_band = left[ts + m]   # covers [t + m, t + r_n]
            hits += int(np.count_nonzero(left_band | right_band))
        p = hits / n_events if n_events else float("nan")
        curve.append({"m": int(m), "prob": p})
    return {
        "u": u, "a_n": a_n, "r_n": int(r_n), "events": n_events,
        "enough_events": n_events >= min_events, "curve": curve,
    }

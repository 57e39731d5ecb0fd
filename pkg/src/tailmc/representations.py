"""Stochastic representations of the tail measure built from a spectral model.

The tail measure itself is never materialized: it is represented by
samplers Z (polar representation), tilde-Z (moving shift) and Q
(conditioned on the argmax location), together with the Pareto-radius
identity that turns integrals over ``{||x_h|| > 1}`` into plain
expectations.  Agreement checks across constructions are the numerical
content of the uniqueness results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cone import Cone, SeqWindow, WeightSeq, infargmax_norms
from .models import (
    SpectralModel,
    TcfReport,
    TestFunctionFamily,
    WindowBatch,
    _finalize_report,
)

__all__ = [
    "RepSampler",
    "ShiftLaw",
    "NuEstimate",
    "make_z_fully_supported",
    "make_tilde_z",
    "make_q_conditioned",
    "make_z_from_tilde_z",
    "make_z_general",
    "pareto_radius",
    "sample_local_tail",
    "sample_local_tail_batch",
    "nu_integral_at",
    "check_tsf",
    "ProbeEvent",
    "default_probes",
    "cross_construction_agreement",
    "dissipativity_check",
]


def pareto_radius(n: int, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Pareto(alpha) radii by inversion: ``R = U^(-1/alpha)``, U in (0, 1]."""
    u = 1.0 - rng.random(n)
    return u ** (-1.0 / alpha)


@dataclass(frozen=True)
class ShiftLaw:
    """A probability law on a finite set of integer shifts, positive on it."""

    lo: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise ValueError("probs must be a non-empty 1-d array")
        if np.any(p <= 0):
            raise ValueError("shift law must be strictly positive on its support")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("shift probabilities must sum to 1")
        p = p / p.sum()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def hi(self) -> int:
        return self.lo + len(self.probs) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def prob(self, k: int) -> float:
        if self.lo <= k <= self.hi:
            return float(self.probs[k - self.lo])
        return 0.0

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "ShiftLaw":
        if hi < lo:
            raise ValueError("empty support")
        m = hi - lo + 1
        return cls(lo, np.full(m, 1.0 / m))


class RepSampler:
    """Base class for tail-measure representation samplers.

    ``kind`` is one of ``z-full``, ``z-lift``, ``z-general`` (polar Z
    kinds with ``E||Z_0||^alpha = 1``), ``tilde-z`` (moving shift kind
    with ``sum_h E||Z_h||^alpha = 1``) or ``q-cond``.  ``norm_bound`` is
    an almost-sure upper bound on ``sup_h ||Z_h||`` when one is known;
    particle pools use it for certified truncation.
    """

    kind = "z-general"

    def __init__(self, model: SpectralModel):
        self.model = model
        self.alpha = model.alpha
        self.cone = model.cone
        self.lo = model.lo
        self.hi = model.hi
        self.norm_bound: Optional[float] = None

    @property
    def is_z_kind(self) -> bool:
        return self.kind.startswith("z-")

    @property
    def halfwidth(self) -> int:
        return max(self.hi, -self.lo)

    def sample(self, n: int, rng: np.random.Generator) -> WindowBatch:
        raise NotImplementedError

    def sample_norms(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.sample(n, rng).norms

    def describe(self) -> dict:
        return {"kind": self.kind, "model": self.model.describe()}


def _rescale_batch(batch: WindowBatch, factors: np.ndarray) -> WindowBatch:
    norms = batch.norms * factors[:, None]
    if batch.cone.is_scalar:
        return WindowBatch(batch.cone, batch.lo, norms, norms)
    values = batch.values * factors[:, None, None]
    return WindowBatch(batch.cone, batch.lo, values, norms)


class FullSupportZSampler(RepSampler):
    """Z = Theta, valid when every lag is nonzero almost surely."""

    kind = "z-full"

    def sample(self, n, rng):
        return self.model.sample(n, rng)


class TildeZSampler(RepSampler):
    """Moving-shift representation ``tilde Z = Theta / (sum_k ||Theta_k||^alpha)^(1/alpha)``."""

    kind = "tilde-z"

    def __init__(self, model):
        super().__init__(model)
        # sum_h ||tilde Z_h||^alpha = 1 a.s., so every norm is <= 1
        self.norm_bound = 1.0

    def sample(self, n, rng):
        batch = self.model.sample(n, rng)
        s = np.sum(batch.norms**self.alpha, axis=1)
        return _rescale_batch(batch, s ** (-1.0 / self.alpha))


class QSampler(RepSampler):
    """Rejection sampler for ``L(Theta | infargmax(Theta) = 0)``."""

    kind = "q-cond"

    def __init__(self, model, max_rejects: int = 10_000):
        super().__init__(model)
        self.max_rejects = int(max_rejects)
        # the argmax sits at lag 0 with ||Q_0|| = 1, so norms are <= 1
        self.norm_bound = 1.0

    def sample_with_stats(self, n: int, rng: np.random.Generator):
        """Return ``(batch, acceptance_rate, total_draws)``.

        Raises ``RuntimeError`` when ``max_rejects`` draws per accepted
        sample are exhausted; the message carries the acceptance bound.
        """
        chunks_v, chunks_n = [], []
        got, draws = 0, 0
        budget = self.max_rejects * n
        while got < n:
            take = min(max(2 * (n - got), 1024), budget - draws)
            if take <= 0:
                rate_bound = max(got, 1) / draws
                raise RuntimeError(
                    f"rejection budget exhausted after {draws} draws; "
                    f"acceptance rate is below about {rate_bound:.2e}"
                )
            batch = self.model.sample(take, rng)
            draws += take
            lags, valid = infargmax_norms(batch.norms, batch.lo)
            keep = (lags == 0) & valid
            got += int(keep.sum())
            chunks_n.append(batch.norms[keep])
            chunks_v.append(batch.values[keep])
        norms = np.concatenate(chunks_n)[:n]
        values = np.concatenate(chunks_v)[:n]
        rate = got / draws
        return WindowBatch(self.cone, self.lo, values, norms), rate, draws

    def sample(self, n, rng):
        return self.sample_with_stats(n, rng)[0]

    def acceptance_rate(self, n: int, rng: np.random.Generator):
        """Estimate ``P(infargmax(Theta) = 0)`` with its standard error."""
        batch = self.model.sample(n, rng)
        lags, valid = infargmax_norms(batch.norms, batch.lo)
        hit = ((lags == 0) & valid).astype(float)
        return float(hit.mean()), float(hit.std() / math.sqrt(n))


class ShiftedZSampler(RepSampler):
    """Random-shift lift ``Z = p_K^(-1/alpha) B^K tilde Z`` with ``K ~ p``.

    The shift law must cover the lag window of tilde Z; otherwise the
    construction asks for a shift of probability zero and the identity
    ``E||Z_0||^alpha = sum_k E||tilde Z_(-k)||^alpha = 1`` breaks.
    """

    kind = "z-lift"

    def __init__(self, tz: TildeZSampler, p: ShiftLaw):
        if not isinstance(tz, TildeZSampler):
            raise TypeError("make_z_from_tilde_z needs a tilde-Z sampler")
        if p.lo > -tz.hi or p.hi < -tz.lo:
            raise ValueError(
                "shift law support must cover the tilde-Z window "
                f"[{-tz.hi}, {-tz.lo}]; a zero-probability shift was requested"
            )
        super().__init__(tz.model)
        self.tz = tz
        self.p = p
        self.lo = tz.lo + p.lo
        self.hi = tz.hi + p.hi
        pmin = float(p.probs.min())
        if tz.norm_bound is not None:
            self.norm_bound = tz.norm_bound * pmin ** (-1.0 / self.alpha)

    def sample(self, n, rng):
        base = self.tz.sample(n, rng)
        ks = rng.choice(self.p.support, size=n, p=self.p.probs)
        width = self.hi - self.lo + 1
        norms = np.zeros((n, width))
        if self.cone.is_scalar:
            values = norms
        else:
            values = np.zeros((n, width, self.cone.dim))
        scale = self.p.probs[ks - self.p.lo] ** (-1.0 / self.alpha)
        src_w = base.norms.shape[1]
        for k in self.p.support:
            rows = ks == k
            if not rows.any():
                continue
            c0 = (self.tz.lo + k) - self.lo
            norms[rows, c0 : c0 + src_w] = base.norms[rows] * scale[rows, None]
            if not self.cone.is_scalar:
                values[rows, c0 : c0 + src_w] = base.values[rows] * scale[rows, None, None]
        if self.cone.is_scalar:
            values = norms
        return WindowBatch(self.cone, self.lo, values, norms)

    def describe(self):
        d = super().describe()
        d["shift_support"] = [int(self.p.lo), int(self.p.hi)]
        return d


class GeneralZSampler(RepSampler):
    """Weighted-shift representation ``Z = B^K Theta / ||B^K Theta||_(q,alpha)``.

    K is drawn from the normalized weights; this is the sampler form of
    the general construction, valid for any positive weight window.
    """

    kind = "z-general"

    def __init__(self, model, q: WeightSeq):
        super().__init__(model)
        self.q = q
        self.lo = model.lo + q.lo
        self.hi = model.hi + q.hi
        qmin = float(q.weights.min() / q.weights.sum())
        self.norm_bound = qmin ** (-1.0 / self.alpha)

    def sample(self, n, rng):
        base = self.model.sample(n, rng)
        probs = self.q.weights / self.q.weights.sum()
        ks = rng.choice(np.arange(self.q.lo, self.q.hi + 1), size=n, p=probs)
        width = self.hi - self.lo + 1
        norms = np.zeros((n, width))
        values = norms if self.cone.is_scalar else np.zeros((n, width, self.cone.dim))
        src_w = base.norms.shape[1]
        for k in range(self.q.lo, self.q.hi + 1):
            rows = ks == k
            if not rows.any():
                continue
            # || B^k Theta ||_(q,alpha)^alpha = sum_l q_(l+k) ||Theta_l||^alpha
            qa = _normalized_aligned(self.q, base.lo + k, base.hi + k)
            denom = (base.norms[rows] ** self.alpha) @ qa
            scale = denom ** (-1.0 / self.alpha)
            c0 = (base.lo + k) - self.lo
            norms[rows, c0 : c0 + src_w] = base.norms[rows] * scale[:, None]
            if not self.cone.is_scalar:
                values[rows, c0 : c0 + src_w] = base.values[rows] * scale[:, None, None]
        if self.cone.is_scalar:
            values = norms
        return WindowBatch(self.cone, self.lo, values, norms)


def _normalized_aligned(q: WeightSeq, lo: int, hi: int) -> np.ndarray:
    return q.aligned(lo, hi) / q.total()


def make_z_fully_supported(model: SpectralModel) -> FullSupportZSampler:
    """Polar representation Z = Theta; needs full support at every lag."""
    if not model.fully_supported:
        raise ValueError(
            "model is not flagged as fully supported; "
            "Z = Theta requires P(||Theta_h|| > 0) = 1 at every lag"
        )
    return FullSupportZSampler(model)


def make_tilde_z(model: SpectralModel, edge_tol: float = 1e-4,
                 rng: Optional[np.random.Generator] = None,
                 probe_n: int = 20_000) -> TildeZSampler:
    """Moving-shift representation sampler.

    Refuses models whose moment profile has not decayed below
    ``edge_tol`` at the window edge, since the representation would then
    be visibly biased by the truncation.
    """
    edge = model.edge_moment()
    if edge is None:
        if rng is None:
            rng = np.random.default_rng(0)
        norms = model.sample_norms(probe_n, rng)
        edge = float(max(np.mean(norms[:, 0] ** model.alpha),
                         np.mean(norms[:, -1] ** model.alpha)))
    if edge > edge_tol:
        raise ValueError(
            f"moment profile at the window edge is {edge:.3g} > {edge_tol:.3g}; "
            "the moving-shift representation would be biased"
        )
    return TildeZSampler(model)


def make_q_conditioned(model: SpectralModel, max_rejects: int = 10_000) -> QSampler:
    """Rejection sampler for the law of Theta given its argmax sits at 0."""
    return QSampler(model, max_rejects)


def make_z_from_tilde_z(tz: TildeZSampler, p: ShiftLaw) -> ShiftedZSampler:
    """Lift a moving-shift sampler to a polar Z via a random shift K ~ p."""
    return ShiftedZSampler(tz, p)


def make_z_general(model: SpectralModel, q: WeightSeq) -> GeneralZSampler:
    return GeneralZSampler(model, q)


# ---------------------------------------------------------------------------
# local tail process and nu-integrals


def sample_local_tail_batch(model: SpectralModel, h: int, n: int,
                            rng: np.random.Generator):
    """Batch of local tail windows ``Y = R B^h Theta`` plus the radii."""
    if abs(h) > model.halfwidth:
        raise ValueError("lag exceeds the model window")
    batch = model.sample(n, rng)
    r = pareto_radius(n, model.alpha, rng)
    scaled = _rescale_batch(batch, r)
    return WindowBatch(scaled.cone, scaled.lo + h, scaled.values, scaled.norms), r


def sample_local_tail(model: SpectralModel, h: int,
                      rng: np.random.Generator) -> SeqWindow:
    """One local tail window at lag h; its norm at lag h is the Pareto radius."""
    batch, _ = sample_local_tail_batch(model, h, 1, rng)
    return batch.window(0)


@dataclass(frozen=True)
class NuEstimate:
    value: float
    se: float
    n: int
    description: str = ""

    def as_dict(self) -> dict:
        return {"value": self.value, "se": self.se, "n": self.n,
                "description": self.description}


def nu_integral_at(model: SpectralModel, h: int,
                   H: Callable[[np.ndarray, int], np.ndarray],
                   n: int, rng: np.random.Generator,
                   bound: float, description: str = "") -> NuEstimate:
    """Monte Carlo value of ``integral of H over {||x_h|| > 1}`` against nu.

    Uses the Pareto-radius identity: the integral equals
    ``E[H(R B^h Theta)]`` with R an independent Pareto(alpha) radius.
    ``H`` acts on batch norm matrices and must be bounded by ``bound``.
    """
    if not (bound is not None and np.isfinite(bound)):
        raise ValueError("H must come with a finite declared bound")
    batch, _ = sample_local_tail_batch(model, h, n, rng)
    x = np.asarray(H(batch.norms, batch.lo), dtype=float)
    if np.any(np.abs(x) > bound * (1 + 1e-12)):
        raise ValueError("H exceeded its declared bound")
    return NuEstimate(float(np.mean(x)), float(np.std(x) / math.sqrt(n)), n,
                      description)


def check_tsf(rep: RepSampler, fam: TestFunctionFamily, h_range, n: int,
              rng: np.random.Generator, z: float = 4.0) -> TcfReport:
    """Certify the tilt shift formula of a polar Z sampler.

    Compares ``E[||Z_0||^alpha H(B^h Z)]`` against
    ``E[||Z_h||^alpha H(Z)]`` for each (h, H); passing certifies the
    shift-invariance of the represented tail measure.
    """
    if n < 100:
        raise ValueError("need at least 100 samples for a meaningful standard error")
    if not rep.is_z_kind:
        raise ValueError("the tilt shift formula applies to Z-kind samplers")
    h_values = h_range if not isinstance(h_range, int) else range(-h_range, h_range + 1)
    batch = rep.sample(n, rng)
    alpha = rep.alpha
    w0 = batch.norm_col(0) ** alpha
    pairs = []
    for h in h_values:
        wh = batch.norm_col(h) ** alpha
        for tf in fam:
            lhs = w0 * tf(batch.norms, batch.lo + h)
            rhs = wh * tf(batch.norms, batch.lo)
            pairs.append((h, tf.name, lhs, rhs))
    return _finalize_report("tsf", pairs, z, n)


# ---------------------------------------------------------------------------
# cross-construction agreement


@dataclass(frozen=True)
class ProbeEvent:
    """A measurable event inside some ``{||x_h|| > 1}``, possibly split.

    ``anchors`` lists ``(h, event)`` pieces with pairwise-disjoint events,
    each contained in ``{||x_h|| > 1}`` for its anchor lag h; ``event``
    maps a batch norm matrix to a boolean row mask.
    """

    name: str
    anchors: tuple

    @classmethod
    def exceed(cls, lag: int, u: float = 1.0) -> "ProbeEvent":
        if u < 1.0:
            raise ValueError("probe level must be >= 1 to sit inside the unit event")

        def ev(norms, lo, lag=lag, u=u):
            j = lag - lo
            if 0 <= j < norms.shape[1]:
                return norms[:, j] > u
            return np.zeros(len(norms), dtype=bool)

        return cls(f"norm[{lag}]>{u:g}", ((lag, ev),))

    @classmethod
    def joint(cls, u0: float = 1.0, u1: float = 1.0) -> "ProbeEvent":
        def ev(norms, lo):
            j0, j1 = -lo, 1 - lo
            ok0 = norms[:, j0] > u0 if 0 <= j0 < norms.shape[1] else np.zeros(len(norms), bool)
            ok1 = norms[:, j1] > u1 if 0 <= j1 < norms.shape[1] else np.zeros(len(norms), bool)
            return ok0 & ok1

        return cls(f"norm[0]>{u0:g}&norm[1]>{u1:g}", ((0, ev),))

    @classmethod
    def running_max(cls, halfwidth: int, u: float = 1.0) -> "ProbeEvent":
        """``{max over |h| <= halfwidth of ||x_h|| > u}`` split by first exceedance."""
        anchors = []
        for a in range(-halfwidth, halfwidth + 1):
            def ev(norms, lo, a=a, u=u):
                hi = lo + norms.shape[1] - 1
                out = np.ones(len(norms), dtype=bool)
                j = a - lo
                if 0 <= j < norms.shape[1]:
                    out &= norms[:, j] > u
                else:
                    return np.zeros(len(norms), dtype=bool)
                for b in range(-halfwidth, a):
                    jb = b - lo
                    if 0 <= jb < norms.shape[1]:
                        out &= norms[:, jb] <= u
                return out

            anchors.append((a, ev))
        return cls(f"runmax[{halfwidth}]>{u:g}", tuple(anchors))


def default_probes(model: SpectralModel) -> tuple:
    """Single-lag, rescaled, joint-lag and running-max probe events."""
    return (
        ProbeEvent.exceed(0, 1.0),
        ProbeEvent.exceed(0, 2.0),
        ProbeEvent.joint(1.0, 1.0),
        ProbeEvent.running_max(model.halfwidth, 1.0),
    )


def _nuq_weighted_shift(model, q, probes, n, rng):
    """nu_q estimates via the weighted-shift construction, per probe."""
    batch = model.sample(n, rng)
    r = pareto_radius(n, model.alpha, rng)
    probs = q.weights / q.weights.sum()
    ks = rng.choice(np.arange(q.lo, q.hi + 1), size=n, p=probs)
    alpha = model.alpha
    acc = {p.name: np.zeros(n) for p in probes}
    for k in range(q.lo, q.hi + 1):
        rows = ks == k
        if not rows.any():
            continue
        nb = batch.norms[rows]
        qa = _normalized_aligned(q, batch.lo + k, batch.hi + k)
        denom = (nb**alpha) @ qa
        for probe in probes:
            out = np.zeros(rows.sum())
            for h, ev in probe.anchors:
                j = (h - k) - batch.lo
                if not (0 <= j < nb.shape[1]):
                    continue
                anchor = nb[:, j]
                pos = anchor > 0
                if not pos.any():
                    continue
                w = anchor[pos] ** alpha / denom[pos]
                scaled = nb[pos] * (r[rows][pos] / anchor[pos])[:, None]
                hit = ev(scaled, batch.lo + k)
                out[pos] += w * hit
            acc[probe.name][rows] = out
    return {name: (float(v.mean()), float(v.std() / math.sqrt(n))) for name, v in acc.items()}


def _nuq_infargmax(model, q, probes, n, rng):
    """nu_q estimates via the infargmax construction, per probe."""
    batch = model.sample(n, rng)
    r = pareto_radius(n, model.alpha, rng)
    alpha = model.alpha
    acc = {p.name: np.zeros(n) for p in probes}
    anchor_lags = {h for p in probes for h, _ in p.anchors}
    # a shift j contributes to anchor h only when ||Theta_(h-j)|| can be > 0
    j_lo = min(anchor_lags) - model.hi
    j_hi = max(anchor_lags) - model.lo
    for j in range(j_lo, j_hi + 1):
        # indicator that the q-weighted argmax of B^j Theta falls at j
        qa = q.aligned(batch.lo + j, batch.hi + j)
        lags, valid = infargmax_norms(batch.norms * qa[None, :], batch.lo)
        at_zero = (lags == 0) & valid
        if not at_zero.any():
            continue
        for probe in probes:
            for h, ev in probe.anchors:
                col = (h - j) - batch.lo
                if not (0 <= col < batch.norms.shape[1]):
                    continue
                anchor = batch.norms[:, col]
                rows = at_zero & (anchor > 0)
                if not rows.any():
                    continue
                w = anchor[rows] ** alpha
                scaled = batch.norms[rows] * (r[rows] / anchor[rows])[:, None]
                hit = ev(scaled, batch.lo + j)
                acc[probe.name][rows] += w * hit
    return {name: (float(v.mean()), float(v.std() / math.sqrt(n))) for name, v in acc.items()}


@dataclass(frozen=True)
class AgreementReport:
    probes: tuple
    routes: tuple
    estimates: dict
    z: float
    n: int

    @property
    def passed(self) -> bool:
        for probe in self.probes:
            vals = [self.estimates[r][probe] for r in self.routes]
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    (a, sa), (b, sb) = vals[i], vals[j]
                    tol = max(self.z * math.hypot(sa, sb), 1e-12)
                    if abs(a - b) > tol:
                        return False
        return True

    def as_dict(self) -> dict:
        return {
            "z": self.z, "n": self.n, "passed": self.passed,
            "estimates": {r: {p: list(v) for p, v in d.items()}
                          for r, d in self.estimates.items()},
        }


def cross_construction_agreement(model: SpectralModel, q1: WeightSeq, q2: WeightSeq,
                                 probes: Optional[Sequence[ProbeEvent]] = None,
                                 n: int = 100_000,
                                 rng: Optional[np.random.Generator] = None,
                                 z: float = 4.0) -> AgreementReport:
    """Check that nu_q does not depend on q, against the argmax construction.

    Estimates each probe event under the weighted-shift construction with
    q1 and q2 and under the infargmax construction (with q1); all pairs
    must agree within ``z`` combined standard errors.
    """
    if rng is None:
        raise ValueError("an explicit rng is required")
    for q in (q1, q2):
        if np.any(q.weights <= 0):
            raise ValueError("weights must be strictly positive")
    probes = tuple(probes) if probes is not None else default_probes(model)
    est = {
        "weighted-shift-q1": _nuq_weighted_shift(model, q1, probes, n, rng),
        "weighted-shift-q2": _nuq_weighted_shift(model, q2, probes, n, rng),
        "infargmax-q1": _nuq_infargmax(model, q1, probes, n, rng),
    }
    return AgreementReport(tuple(p.name for p in probes), tuple(est), est, z, n)


def dissipativity_check(model: SpectralModel, n: int,
                        rng: np.random.Generator, edge_tol: float = 1e-4) -> dict:
    """Support diagnostics for the dissipative/moving-shift dichotomy.

    Estimates where the argmax lands, the moment decay at the window
    edge and a geometric extrapolation of the tail mass outside the
    window.  Verdict ``dissipative-at-window`` requires the edge moments
    below ``edge_tol`` and the argmax strictly inside the window.
    """
    batch = model.sample(n, rng)
    lags, valid = infargmax_norms(batch.norms, batch.lo)
    interior = valid & (lags > batch.lo) & (lags < batch.hi)
    p_interior = float(interior.mean())
    m = (batch.norms**model.alpha).mean(axis=0)
    edge = float(max(m[0], m[-1]))
    # geometric extrapolation of the forward/backward mass outside the window
    tails = []
    for a, b in ((m[-2], m[-1]), (m[1], m[0])):
        if b <= 0:
            tails.append(0.0)
        elif a <= b:
            tails.append(math.inf)
        else:
            rho = b / a
            tails.append(b * rho / (1 - rho))
    tail_mass = float(max(tails))
    se_edge = float(max(np.std(batch.norms[:, 0] ** model.alpha),
                        np.std(batch.norms[:, -1] ** model.alpha)) / math.sqrt(n))
    verdict = "dissipative-at-window" if (
        edge <= edge_tol + 4 * se_edge and p_interior >= 1.0 - 4.0 / math.sqrt(n)
    ) else "inconclusive"
    return {
        "p_argmax_interior": p_interior,
        "edge_moment": edge,
        "edge_moment_se": se_edge,
        "tail_mass_extrapolated": tail_mass,
        "verdict": verdict,
        "n": n,
    }

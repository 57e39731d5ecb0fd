"""Spectral tail process samplers with analytic ground truth.

A spectral model samples finite windows of a process Theta with
``||Theta_0|| = 1`` almost surely.  The built-in laws (iid, max-AR,
moving maxima) are standard in the extremes literature; they are never
assumed correct but certified by the Monte Carlo time-change-formula
check :func:`check_tcf` before use.  The log-Gaussian model is the
fully-supported (non-dissipative) example.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .cone import Cone, SeqWindow, WeightSeq, infargmax_norms

__all__ = [
    "SpectralModel",
    "IIDModel",
    "ArmaxModel",
    "MovingMaximaModel",
    "LogGaussianModel",
    "WindowBatch",
    "TestFunction",
    "TestFunctionFamily",
    "default_family",
    "localized_family",
    "TcfReport",
    "check_tcf",
    "moment_profile",
    "sample_theta",
    "make_model",
]

EDGE_EPS = 1e-6  # target forward moment mass outside the window


@dataclass(frozen=True)
class WindowBatch:
    """A batch of sequence windows sharing the lag range ``lo..hi``.

    ``norms`` has shape ``(n, W)``; ``values`` equals ``norms`` for the
    nonneg cone and has shape ``(n, W, d)`` for the vector cone.
    """

    cone: Cone
    lo: int
    values: np.ndarray
    norms: np.ndarray

    @property
    def hi(self) -> int:
        return self.lo + self.norms.shape[1] - 1

    def __len__(self) -> int:
        return self.norms.shape[0]

    def window(self, i: int) -> SeqWindow:
        return SeqWindow(self.cone, self.lo, self.values[i])

    def norm_col(self, lag: int) -> np.ndarray:
        """Norms at ``lag`` (zeros outside the window)."""
        if self.lo <= lag <= self.hi:
            return self.norms[:, lag - self.lo]
        return np.zeros(len(self))


def _unit_angles(cone: Cone, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random directions on the unit sphere of the configured norm."""
    g = rng.standard_normal((n, cone.dim))
    nrm = cone.norm_of(g)
    bad = nrm == 0
    if np.any(bad):
        g[bad] = 1.0
        nrm = cone.norm_of(g)
    return g / nrm[:, None]


class SpectralModel:
    """Base class; subclasses implement ``sample_norms``.

    For the vector cone a direction is drawn once per sample from the
    angular law and reused at all lags, so windows are collinear and the
    pseudonorm sequence has the same law as in the scalar case.
    """

    tag = "custom"
    fully_supported = False
    dissipative = True

    def __init__(self, alpha: float, halfwidth: int, cone: Optional[Cone] = None):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = float(alpha)
        self.halfwidth = int(halfwidth)
        self.cone = cone if cone is not None else Cone()

    @property
    def lo(self) -> int:
        return -self.halfwidth

    @property
    def hi(self) -> int:
        return self.halfwidth

    @property
    def width(self) -> int:
        return 2 * self.halfwidth + 1

    def sample_norms(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> WindowBatch:
        norms = self.sample_norms(n, rng)
        if self.cone.is_scalar:
            return WindowBatch(self.cone, self.lo, norms, norms)
        angles = _unit_angles(self.cone, n, rng)
        values = norms[:, :, None] * angles[:, None, :]
        return WindowBatch(self.cone, self.lo, values, norms)

    # Analytic ground truth; None where no closed form is available.
    def moment_alpha(self, h: int) -> Optional[float]:
        return None

    def maximal_index_norm0(self) -> Optional[float]:
        return None

    def edge_moment(self) -> Optional[float]:
        """Largest ``E||Theta_h||^alpha`` on the window boundary."""
        m_lo = self.moment_alpha(self.lo)
        m_hi = self.moment_alpha(self.hi)
        if m_lo is None or m_hi is None:
            return None
        return max(m_lo, m_hi)

    def enumerate_norms(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """Exact law as ``(probs, norm windows)`` when the support is finite.

        Used by brute-force oracles; the tiny tail mass beyond the window
        is dropped for the max-AR model (below ``EDGE_EPS``).
        """
        return None

    def describe(self) -> dict:
        return {"tag": self.tag, "alpha": self.alpha, "halfwidth": self.halfwidth}


class IIDModel(SpectralModel):
    """Spectral tail process of an iid sequence: a single spike at lag 0."""

    tag = "iid"
    dissipative = True

    def __init__(self, alpha: float, cone: Optional[Cone] = None, halfwidth: int = 2):
        super().__init__(alpha, halfwidth, cone)

    def sample_norms(self, n, rng):
        norms = np.zeros((n, self.width))
        norms[:, self.halfwidth] = 1.0
        return norms

    def moment_alpha(self, h):
        return 1.0 if h == 0 else 0.0

    def maximal_index_norm0(self):
        return 1.0

    def enumerate_norms(self):
        w = np.zeros((1, self.width))
        w[0, self.halfwidth] = 1.0
        return np.ones(1), w


class ArmaxModel(SpectralModel):
    """Spectral tail process of the max-autoregressive model.

    ``Theta_h = phi^h`` for ``h >= -K`` and 0 below, with K geometric:
    ``P(K = k) = (1 - phi^alpha) phi^(k alpha)``.  The window half-width
    is chosen so the forward moment ``phi^(h alpha)`` is below
    ``EDGE_EPS`` outside; K is truncated to the window (mass below
    ``EDGE_EPS * phi^alpha``).
    """

    tag = "armax"
    dissipative = True

    def __init__(self, phi: float, alpha: float, cone: Optional[Cone] = None,
                 halfwidth: Optional[int] = None):
        if not 0 < phi < 1:
            raise ValueError("phi must be in (0, 1)")
        self.phi = float(phi)
        if halfwidth is None:
            halfwidth = math.ceil(math.log(EDGE_EPS) / (alpha * math.log(phi)))
        super().__init__(alpha, halfwidth, cone)
        self._pa = self.phi**self.alpha

    def sample_norms(self, n, rng):
        # inverse-CDF geometric draw, clipped to the window
        u = rng.random(n)
        k = np.floor(np.log(u) / np.log(self._pa)).astype(np.int64)
        k = np.minimum(k, self.halfwidth)
        lags = np.arange(self.lo, self.hi + 1)
        return np.where(lags[None, :] >= -k[:, None], self.phi ** lags[None, :].astype(float), 0.0)

    def moment_alpha(self, h):
        # E||Theta_h||^a = phi^(h a) for h >= 0 and phi^(-h a) * P(K >= -h) = 1 for h < 0
        if h > self.halfwidth or h < self.lo:
            return 0.0
        return self._pa**h if h >= 0 else 1.0

    def maximal_index_norm0(self):
        return 1.0 - self._pa

    def edge_moment(self):
        # backward moments stay at 1 inside the window but K is truncated
        # there; the relevant escaping mass is the forward one.
        return self._pa**self.halfwidth

    def enumerate_norms(self):
        ks = np.arange(0, self.halfwidth + 1)
        probs = (1 - self._pa) * self._pa ** ks.astype(float)
        probs[-1] += 1.0 - probs.sum()  # lump the truncated tail on K = L
        lags = np.arange(self.lo, self.hi + 1)
        wins = np.where(lags[None, :] >= -ks[:, None], self.phi ** lags[None, :].astype(float), 0.0)
        return probs, wins

    def describe(self):
        d = super().describe()
        d["phi"] = self.phi
        return d


class MovingMaximaModel(SpectralModel):
    """Spectral tail process of a finite moving-maxima filter ``c_0..c_m``.

    ``P(J = j) = c_j^alpha / sum c_k^alpha`` and ``Theta_h = c_(J+h)/c_J``
    (zero out of range).
    """

    tag = "moving_maxima"
    dissipative = True

    def __init__(self, coeffs: Sequence[float], alpha: float, cone: Optional[Cone] = None):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or len(c) == 0 or np.any(c < 0) or c.sum() == 0:
            raise ValueError("coefficients must be nonnegative with at least one positive")
        self.coeffs = c
        # halfwidth m covers all reachable lags [-m, m]; keep at least 1
        # so shift checks have room even for a single coefficient
        super().__init__(alpha, max(len(c) - 1, 1), cone)
        self._pj = c**self.alpha / np.sum(c**self.alpha)

    def _window_for(self, js: np.ndarray) -> np.ndarray:
        m = len(self.coeffs) - 1
        lags = np.arange(self.lo, self.hi + 1)
        idx = js[:, None] + lags[None, :]
        ok = (idx >= 0) & (idx <= m)
        cj = self.coeffs[js]
        vals = np.where(ok, self.coeffs[np.clip(idx, 0, m)], 0.0)
        return vals / cj[:, None]

    def sample_norms(self, n, rng):
        js = rng.choice(len(self.coeffs), size=n, p=self._pj)
        return self._window_for(js)

    def moment_alpha(self, h):
        m = len(self.coeffs) - 1
        ca = self.coeffs**self.alpha
        tot = ca.sum()
        acc = 0.0
        for j in range(m + 1):
            if 0 <= j + h <= m and self.coeffs[j] > 0:
                acc += ca[j] / tot * (self.coeffs[j + h] / self.coeffs[j]) ** self.alpha
        return acc

    def maximal_index_norm0(self):
        ca = self.coeffs**self.alpha
        return float(ca.max() / ca.sum())

    def edge_moment(self):
        return 0.0

    def enumerate_norms(self):
        keep = self._pj > 0
        js = np.arange(len(self.coeffs))[keep]
        return self._pj[keep], self._window_for(js)

    def describe(self):
        d = super().describe()
        d["coeffs"] = [float(c) for c in self.coeffs]
        return d


class LogGaussianModel(SpectralModel):
    """Fully supported spectral tail process of Brown-Resnick type.

    Built from a stationary Gaussian AR(1) field W with variance sigma^2
    and lag correlation rho^|h|:
    ``Theta_h = exp(W_h - W_0 + alpha (c_h - c_0))`` with
    ``c_h = Cov(W_0, W_h)``.  Every lag is positive almost surely and
    ``E||Theta_h||^alpha = 1`` for all h, so the model is not
    dissipative.  Certify with a localized test family: the whole-window
    infargmax functional is not a local functional of this process.
    """

    tag = "log_gaussian"
    fully_supported = True
    dissipative = False

    def __init__(self, rho: float, sigma: float, alpha: float,
                 cone: Optional[Cone] = None, halfwidth: int = 8):
        if not 0 < rho < 1:
            raise ValueError("rho must be in (0, 1)")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        self.rho = float(rho)
        self.sigma = float(sigma)
        super().__init__(alpha, halfwidth, cone)
        lags = np.arange(self.lo, self.hi + 1)
        cov = sigma**2 * rho ** np.abs(lags[:, None] - lags[None, :]).astype(float)
        self._chol = np.linalg.cholesky(cov + 1e-12 * np.eye(len(lags)))
        self._drift = alpha * (sigma**2 * rho ** np.abs(lags).astype(float) - sigma**2)

    def sample_norms(self, n, rng):
        w = rng.standard_normal((n, self.width)) @ self._chol.T
        logs = w - w[:, [self.halfwidth]] + self._drift[None, :]
        return np.exp(logs)

    def moment_alpha(self, h):
        return 1.0 if abs(h) <= self.halfwidth else 0.0

    def describe(self):
        d = super().describe()
        d.update(rho=self.rho, sigma=self.sigma)
        return d


def sample_theta(model: SpectralModel, rng: np.random.Generator) -> SeqWindow:
    """Draw one spectral window; ``||Theta_0|| = 1`` exactly."""
    return model.sample(1, rng).window(0)


# ---------------------------------------------------------------------------
# test function family and the TCF certificate


@dataclass(frozen=True)
class TestFunction:
    """A bounded 0-homogeneous functional of the window pseudonorms.

    ``fn(norms, lo)`` maps a batch norm matrix to values in ``[0, bound]``
    and must vanish on rows with ``||x_0|| = 0``.
    """

    name: str
    fn: Callable[[np.ndarray, int], np.ndarray]
    bound: float = 1.0

    def __call__(self, norms: np.ndarray, lo: int) -> np.ndarray:
        return self.fn(np.atleast_2d(norms), lo)


def _col(norms: np.ndarray, lo: int, lag: int) -> np.ndarray:
    j = lag - lo
    if 0 <= j < norms.shape[1]:
        return norms[:, j]
    return np.zeros(len(norms))


def _h_indicator(norms, lo):
    return (_col(norms, lo, 0) > 0).astype(float)


def _h_ratio1(norms, lo):
    n0 = _col(norms, lo, 0)
    n1 = _col(norms, lo, 1)
    out = np.zeros(len(norms))
    pos = n0 > 0
    out[pos] = np.minimum(n1[pos] / n0[pos], 1.0)
    return out


def _h_argmax0(norms, lo):
    lags, valid = infargmax_norms(norms, lo)
    return ((lags == 0) & valid).astype(float)


def _make_h_supq(q: WeightSeq, cap: float):
    def h(norms, lo):
        qa = q.aligned(lo, lo + norms.shape[1] - 1)
        sup = np.max(norms * qa, axis=1)
        n0 = _col(norms, lo, 0)
        out = np.zeros(len(norms))
        pos = n0 > 0
        out[pos] = np.minimum(sup[pos] / n0[pos], cap)
        return out

    return h


class TestFunctionFamily(tuple):
    """An immutable list of :class:`TestFunction`."""

    def __new__(cls, functions: Sequence[TestFunction]):
        return super().__new__(cls, tuple(functions))


def default_family(cap: float = 10.0, q: Optional[WeightSeq] = None) -> TestFunctionFamily:
    """The default certification family.

    Indicator of a nonzero lag 0, the capped forward ratio, the
    infargmax-at-0 indicator, and a capped weighted running sup; all
    bounded, 0-homogeneous and vanishing on ``{||x_0|| = 0}``, jointly
    sensitive to forward and backward lags.
    """
    q = q if q is not None else WeightSeq.geometric(8)
    return TestFunctionFamily([
        TestFunction("ind_nonzero_0", _h_indicator, 1.0),
        TestFunction("ratio_lag1", _h_ratio1, 1.0),
        TestFunction("argmax_at_0", _h_argmax0, 1.0),
        TestFunction("sup_q_ratio", _make_h_supq(q, cap), cap),
    ])


def localized_family(radius: int = 3, cap: float = 10.0) -> TestFunctionFamily:
    """A family reading only lags ``|j| <= radius``.

    For fully supported models the whole-window infargmax is not a local
    functional, so certification uses a restricted argmax instead.
    """

    def h_argmax_local(norms, lo):
        hi = lo + norms.shape[1] - 1
        a = max(lo, -radius)
        b = min(hi, radius)
        sub = norms[:, a - lo : b - lo + 1]
        lags, valid = infargmax_norms(sub, a)
        return ((lags == 0) & valid).astype(float)

    q = WeightSeq.geometric(radius)
    return TestFunctionFamily([
        TestFunction("ind_nonzero_0", _h_indicator, 1.0),
        TestFunction("ratio_lag1", _h_ratio1, 1.0),
        TestFunction(f"argmax_at_0_r{radius}", h_argmax_local, 1.0),
        TestFunction("sup_q_ratio_local", _make_h_supq(q, cap), cap),
    ])


@dataclass(frozen=True)
class CheckLine:
    h: int
    name: str
    lhs: float
    rhs: float
    se: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "h": self.h, "name": self.name, "lhs": self.lhs, "rhs": self.rhs,
            "se": self.se, "passed": self.passed,
        }


@dataclass(frozen=True)
class TcfReport:
    """Two-sided Monte Carlo comparison per (lag, test function)."""

    lines: tuple
    z: float
    n: int
    kind: str = "tcf"

    @property
    def passed(self) -> bool:
        return all(line.passed for line in self.lines)

    def worst(self) -> CheckLine:
        def score(line):
            return abs(line.lhs - line.rhs) / line.se if line.se > 0 else (
                0.0 if line.lhs == line.rhs else math.inf)
        return max(self.lines, key=score)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "z": self.z, "n": self.n, "passed": self.passed,
            "lines": [line.as_dict() for line in self.lines],
        }


def check_tcf(model: SpectralModel, fam: TestFunctionFamily, h_range,
              n: int, rng: np.random.Generator, z: float = 4.0) -> TcfReport:
    """Certify the time change formula by Monte Carlo.

    For each lag h and 0-homogeneous H vanishing on ``{||x_0|| = 0}``,
    compares ``E[H(B^h Theta) 1{||Theta_(-h)|| > 0}]`` against
    ``E[||Theta_h||^alpha H(Theta)]`` with a paired z-test at level
    ``z`` pooled standard errors.
    """
    if n < 100:
        raise ValueError("need at least 100 samples for a meaningful standard error")
    h_values = _as_h_values(h_range)
    if any(abs(h) > model.halfwidth for h in h_values):
        raise ValueError("lag range exceeds the model window")
    batch = model.sample(n, rng)
    alpha = model.alpha
    pairs = []
    for h in h_values:
        # B^h Theta is the same window re-anchored at lo + h
        guard = (batch.norm_col(-h) > 0).astype(float)
        wh = batch.norm_col(h) ** alpha
        for tf in fam:
            lhs = tf(batch.norms, batch.lo + h) * guard
            rhs = wh * tf(batch.norms, batch.lo)
            pairs.append((h, tf.name, lhs, rhs))
    return _finalize_report("tcf", pairs, z, n)


def _finalize_report(kind, pairs, z, n):
    lines = []
    for (h, name, a, b) in pairs:
        diff = a - b
        se = float(np.std(diff) / math.sqrt(len(diff)))
        mean_diff = float(np.mean(diff))
        lines.append(CheckLine(int(h), name, float(np.mean(a)), float(np.mean(b)),
                               se, bool(abs(mean_diff) <= z * se)))
    return TcfReport(tuple(lines), z, n, kind)


def _as_h_values(h_range):
    if isinstance(h_range, int):
        return list(range(-h_range, h_range + 1))
    return [int(h) for h in h_range]


@dataclass(frozen=True)
class MomentProfile:
    lags: tuple
    estimates: tuple
    ses: tuple
    n: int

    @property
    def passed(self) -> bool:
        """Every lag must satisfy ``E||Theta_h||^alpha <= 1`` up to 4 SE."""
        return all(e <= 1.0 + 4.0 * s for e, s in zip(self.estimates, self.ses))

    def as_dict(self) -> dict:
        return {
            "lags": list(self.lags),
            "estimates": list(self.estimates),
            "ses": list(self.ses),
            "n": self.n,
            "passed": self.passed,
        }


def moment_profile(model: SpectralModel, h_range, n: int,
                   rng: np.random.Generator) -> MomentProfile:
    """Monte Carlo table of ``E||Theta_h||^alpha`` with standard errors."""
    h_values = _as_h_values(h_range)
    if any(abs(h) > model.halfwidth for h in h_values):
        raise ValueError("lag range exceeds the model window")
    batch = model.sample(n, rng)
    est, ses = [], []
    for h in h_values:
        x = batch.norm_col(h) ** model.alpha
        est.append(float(np.mean(x)))
        ses.append(float(np.std(x) / math.sqrt(n)))
    return MomentProfile(tuple(h_values), tuple(est), tuple(ses), n)


def make_model(spec: dict, cone: Optional[Cone] = None) -> SpectralModel:
    """Build a model from a tag plus named numeric parameters."""
    kind = spec.get("kind")
    alpha = float(spec.get("alpha", 1.0))
    if kind == "iid":
        return IIDModel(alpha, cone)
    if kind == "armax":
        return ArmaxModel(float(spec["phi"]), alpha, cone,
                          halfwidth=spec.get("halfwidth"))
    if kind == "moving_maxima":
        return MovingMaximaModel(spec["coeffs"], alpha, cone)
    if kind == "log_gaussian":
        return LogGaussianModel(float(spec.get("rho", 0.7)),
                                float(spec.get("sigma", 1.0)), alpha, cone,
                                halfwidth=int(spec.get("halfwidth", 8)))
    raise ValueError(f"unknown model kind {kind!r}")

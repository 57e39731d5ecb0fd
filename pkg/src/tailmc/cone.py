"""Cone space, sequence windows and homogeneous functionals.

The state space is a cone ``E`` with a 1-homogeneous pseudonorm: either
the half line ``[0, inf)`` with the identity norm, or ``R^d`` with a
Euclidean or sup norm.  A :class:`SeqWindow` is a finite lag window of a
two-sided E-valued sequence, implicitly zero outside the window; every
"sup over all lags" functional is evaluated over the window, with
truncation error controlled separately by the model's tail decay.

All objects here are immutable and all operations pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Cone",
    "ConeElement",
    "SeqWindow",
    "WeightSeq",
    "TauFunctional",
    "pseudonorm",
    "shift",
    "q_alpha_norm",
    "infargmax",
    "infargmax_norms",
    "seq_distance",
    "tau_eval",
]

MAX_DIM = 8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Cone:
    """Configuration of the cone E: variant, dimension and norm.

    ``variant="nonneg"`` is the half line with the identity pseudonorm;
    ``variant="vector"`` is R^d with the Euclidean or sup norm.  The
    metric on E is ``d(x, y) = ||x - y||`` in the configured norm, so
    that ``d(0, x) = ||x||`` as required of a homogeneous metric.
    """

    variant: str = "nonneg"
    dim: int = 1
    norm: str = "euclidean"

    def __post_init__(self):
        if self.variant not in ("nonneg", "vector"):
            raise ValueError(f"unknown cone variant {self.variant!r}")
        if self.norm not in ("euclidean", "sup"):
            raise ValueError(f"unknown norm {self.norm!r}")
        if self.variant == "vector" and not (1 <= self.dim <= MAX_DIM):
            raise ValueError(f"vector dimension must be in [1, {MAX_DIM}]")
        if self.variant == "nonneg" and self.dim != 1:
            raise ValueError("nonneg cone is one-dimensional")

    @property
    def is_scalar(self) -> bool:
        return self.variant == "nonneg"

    def zero(self):
        if self.is_scalar:
            return 0.0
        return np.zeros(self.dim)

    def norm_of(self, values: np.ndarray) -> np.ndarray:
        """Pseudonorm applied along the last axis (elementwise for nonneg)."""
        values = np.asarray(values, dtype=float)
        if self.is_scalar:
            return values
        if self.norm == "euclidean":
            return np.sqrt(np.sum(values * values, axis=-1))
        return np.max(np.abs(values), axis=-1)

    def metric(self, x, y) -> np.ndarray:
        """Homogeneous metric ``d(x, y) = ||x - y||`` (abs difference on [0, inf))."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.is_scalar:
            return np.abs(x - y)
        return self.norm_of(x - y)

    def validate_value(self, value) -> np.ndarray:
        v = np.asarray(value, dtype=float)
        if self.is_scalar:
            if v.ndim != 0:
                raise ValueError("nonneg cone element must be a scalar")
            if v < 0:
                raise ValueError("nonneg cone element must be >= 0")
        else:
            if v.shape != (self.dim,):
                raise ValueError(
                    f"vector cone element must have shape ({self.dim},), got {v.shape}"
                )
        return v


@dataclass(frozen=True)
class ConeElement:
    """A single point of E together with its cone configuration."""

    cone: Cone
    value: np.ndarray

    def __post_init__(self):
        v = self.cone.validate_value(self.value)
        object.__setattr__(self, "value", _frozen(v))

    @property
    def norm(self) -> float:
        return float(self.cone.norm_of(self.value))

    def scale(self, u: float) -> "ConeElement":
        if u <= 0:
            raise ValueError("scalar action is defined for u > 0")
        return ConeElement(self.cone, u * np.asarray(self.value))

    def is_zero(self) -> bool:
        return self.norm == 0.0


@dataclass(frozen=True)
class SeqWindow:
    """Finite lag window ``lo..hi`` of an E-valued sequence, zero outside.

    ``values`` has shape ``(hi - lo + 1,)`` for the nonneg cone and
    ``(hi - lo + 1, d)`` for the vector cone.
    """

    cone: Cone
    lo: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        expected_ndim = 1 if self.cone.is_scalar else 2
        if v.ndim != expected_ndim:
            raise ValueError(f"window values must be {expected_ndim}-d, got {v.ndim}-d")
        if not self.cone.is_scalar and v.shape[1] != self.cone.dim:
            raise ValueError("window dimension does not match cone")
        if self.cone.is_scalar and np.any(v < 0):
            raise ValueError("nonneg cone window must be elementwise >= 0")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def norms(self) -> np.ndarray:
        return self.cone.norm_of(self.values)

    def at(self, lag: int):
        """Value at ``lag`` (the zero element outside the window)."""
        if self.lo <= lag <= self.hi:
            return self.values[lag - self.lo]
        return self.cone.zero()

    def norm_at(self, lag: int) -> float:
        if self.lo <= lag <= self.hi:
            return float(self.cone.norm_of(self.values[lag - self.lo]))
        return 0.0

    def scale(self, u: float) -> "SeqWindow":
        if u <= 0:
            raise ValueError("scalar action is defined for u > 0")
        return SeqWindow(self.cone, self.lo, u * np.asarray(self.values))

    def is_zero(self) -> bool:
        return bool(np.all(self.norms() == 0.0))


def pseudonorm(x: ConeElement) -> float:
    """Pseudonorm of a cone element; 0 iff the element is zero."""
    return x.norm


def shift(w: SeqWindow, k: int) -> SeqWindow:
    """Backshift by ``k``: the result has value ``w[h - k]`` at lag ``h``."""
    return SeqWindow(w.cone, w.lo + int(k), w.values)


@dataclass(frozen=True)
class WeightSeq:
    """Strictly positive weight sequence on a finite lag window.

    Lags outside ``[lo, lo + len(weights) - 1]`` carry weight zero.
    """

    kind: str
    lo: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("weights must be a non-empty 1-d array")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be strictly positive and finite")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def hi(self) -> int:
        return self.lo + len(self.weights) - 1

    @property
    def halfwidth(self) -> int:
        return max(self.hi, -self.lo)

    def at(self, j: int) -> float:
        if self.lo <= j <= self.hi:
            return float(self.weights[j - self.lo])
        return 0.0

    def aligned(self, lo: int, hi: int) -> np.ndarray:
        """Weights on lags ``lo..hi`` as an array (zero off support)."""
        out = np.zeros(hi - lo + 1)
        a = max(lo, self.lo)
        b = min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self.weights[a - self.lo : b - self.lo + 1]
        return out

    def total(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def geometric(cls, halfwidth: int, ratio: float = 0.5, normalize: bool = True) -> "WeightSeq":
        """Default weights ``q_k = c * ratio^{|k|}`` on ``[-halfwidth, halfwidth]``.

        With ``normalize=True`` the constant ``c`` makes the weights sum to 1.
        """
        if not 0 < ratio < 1:
            raise ValueError("ratio must be in (0, 1)")
        k = np.arange(-halfwidth, halfwidth + 1)
        w = ratio ** np.abs(k).astype(float)
        if normalize:
            w = w / w.sum()
        return cls("geometric", -halfwidth, w)

    @classmethod
    def dirac(cls) -> "WeightSeq":
        return cls("dirac", 0, np.ones(1))

    @classmethod
    def ones(cls, halfwidth: int, normalize: bool = False) -> "WeightSeq":
        w = np.ones(2 * halfwidth + 1)
        if normalize:
            w = w / w.sum()
        return cls("ones", -halfwidth, w)

    @classmethod
    def table(cls, lo: int, weights) -> "WeightSeq":
        return cls("table", lo, np.asarray(weights, dtype=float))


def q_alpha_norm(w: SeqWindow, q: WeightSeq, alpha: float) -> float:
    """Weighted alpha-norm ``(sum_j q_j ||w_j||^alpha)^(1/alpha)``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    qa = q.aligned(w.lo, w.hi)
    s = float(np.sum(qa * w.norms() ** alpha))
    return s ** (1.0 / alpha)


def q_alpha_norm_batch(norms: np.ndarray, lo: int, q: WeightSeq, alpha: float) -> np.ndarray:
    """Batch version of :func:`q_alpha_norm` on an ``(n, W)`` norm matrix."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    qa = q.aligned(lo, lo + norms.shape[1] - 1)
    s = (norms**alpha) @ qa
    return s ** (1.0 / alpha)


def infargmax(w: SeqWindow) -> Optional[int]:
    """Leftmost lag attaining the maximal norm; ``None`` for the zero window."""
    n = w.norms()
    m = n.max() if len(n) else 0.0
    if m == 0.0:
        return None
    return int(w.lo + int(np.argmax(n)))


def infargmax_norms(norms: np.ndarray, lo: int) -> tuple[np.ndarray, np.ndarray]:
    """Batch leftmost-argmax lags of an ``(n, W)`` norm matrix.

    Returns ``(lags, valid)`` where rows that are identically zero are
    flagged invalid (the functional is undefined there).
    """
    m = norms.max(axis=1)
    lags = lo + np.argmax(norms, axis=1)
    return lags, m > 0.0


def seq_distance(w1: SeqWindow, w2: SeqWindow) -> float:
    """Metric ``sum_j 2^(-|j|) (d_E(w1_j, w2_j) ^ 1)`` over the union of supports."""
    if w1.cone != w2.cone:
        raise ValueError("windows live on different cones")
    lo = min(w1.lo, w2.lo)
    hi = max(w1.hi, w2.hi)
    lags = np.arange(lo, hi + 1)
    d = np.array([w1.cone.metric(w1.at(j), w2.at(j)) for j in lags])
    return float(np.sum(2.0 ** (-np.abs(lags)) * np.minimum(d, 1.0)))


@dataclass(frozen=True)
class TauFunctional:
    """A 1-homogeneous functional of a sequence window.

    Built-in variants: ``norm0`` is the norm at lag 0; ``supq`` is the
    weighted running sup ``sup_h q_h ||x_h||``.  A custom variant wraps a
    callable ``fn(norms, lo) -> (n,)`` acting on batch norm matrices and
    must itself be 1-homogeneous in the norms.  ``scale`` multiplies the
    functional; index computations use it to normalize ``nu(tau > 1) = 1``.
    """

    kind: str = "norm0"
    q: Optional[WeightSeq] = None
    scale: float = 1.0
    fn: Optional[Callable[[np.ndarray, int], np.ndarray]] = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("norm0", "supq", "custom"):
            raise ValueError(f"unknown tau kind {self.kind!r}")
        if self.kind == "supq" and self.q is None:
            raise ValueError("supq functional needs a weight sequence")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom functional needs fn")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    def with_scale(self, scale: float) -> "TauFunctional":
        return TauFunctional(self.kind, self.q, scale, self.fn, self.name)

    def eval_norms(self, norms: np.ndarray, lo: int) -> np.ndarray:
        """Evaluate on a batch ``(n, W)`` of window pseudonorms."""
        norms = np.atleast_2d(norms)
        hi = lo + norms.shape[1] - 1
        if self.kind == "norm0":
            if lo <= 0 <= hi:
                out = norms[:, -lo].copy()
            else:
                out = np.zeros(len(norms))
        elif self.kind == "supq":
            qa = self.q.aligned(lo, hi)
            out = np.max(norms * qa, axis=1)
        else:
            out = np.asarray(self.fn(norms, lo), dtype=float)
        return self.scale * out

    def shifted_profile(self, norms: np.ndarray, lo: int, shifts: np.ndarray) -> np.ndarray:
        """Evaluate ``tau(B^j w)`` for every j in ``shifts``; returns ``(n, len(shifts))``.

        Shifting the window by j moves lag ``h`` of the input to lag
        ``h + j``, so the functional reads the original window at lags
        shifted by ``-j``.
        """
        norms = np.atleast_2d(norms)
        n, width = norms.shape
        out = np.empty((n, len(shifts)))
        for c, j in enumerate(shifts):
            out[:, c] = self.eval_norms(norms, lo + int(j)) / self.scale
        return self.scale * out


def tau_eval(tau: TauFunctional, w: SeqWindow) -> float:
    """Evaluate a tau functional on a single window."""
    return float(tau.eval_norms(w.norms()[None, :], w.lo)[0])

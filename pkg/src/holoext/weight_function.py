"""The weight function of a log-convex sequence and its discrete duality.

For a log-convex K with K_0 = 1 the weight function is

    w(r) = sup_m ln(r^m / K_m)   for r > 0,     w(0) = 0.

Because ln K_m is convex in m, the supremum over the stored window is
attained at the largest index whose entry slope ln K_m - ln K_{m-1} stays
below ln r; that trace index is a binary search away, and once it is
interior the stored maximum equals the true supremum over all m.  When the
trace index hits the stored boundary the value is only a lower bound and
every consumer receives a truncation flag.

The inverse direction is the discrete duality

    sup_{r>0} ( N ln r - w(r) ) = ln K_N,

attained on the slope interval of index N, which recovers the sequence
from its weight function and yields the minimizer of e^{w(r)}/r^N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .sequences import DualSequence


class WeightValue(NamedTuple):
    value: float
    trace_index: int
    truncated: bool


class LemmaGap(NamedTuple):
    gap: float
    truncated: bool
    w_r: float
    w_scaled: float


@dataclass
class AssociatedWeight:
    """Evaluator state: slope table and cumulative ln K (treat as immutable)."""

    dual: DualSequence
    ratios: np.ndarray   # ratios[i] = ln K_{i+1} - ln K_i, nondecreasing
    log_k: np.ndarray    # log_k[m] = ln K_m

    @property
    def m_max(self) -> int:
        return len(self.log_k) - 1


def from_dual(dual: DualSequence) -> AssociatedWeight:
    return AssociatedWeight(
        dual=dual,
        ratios=np.asarray(dual.step_ratios, dtype=float),
        log_k=np.asarray(dual.log_terms, dtype=float),
    )


def trace_index(weight: AssociatedWeight, r: float) -> tuple[int, bool]:
    """Largest m with slope(m) <= ln r (0 if none); flag = hit the boundary.

    Ties resolve to the larger index; the objective value is equal there.
    """
    if not (r >= 0.0) or math.isinf(r):
        raise ValueError("radius must be finite and nonnegative")
    if r == 0.0:
        return 0, False
    ln_r = math.log(r)
    m_star = int(np.searchsorted(weight.ratios, ln_r, side="right"))
    return m_star, m_star == weight.m_max


def eval_w(weight: AssociatedWeight, r: float) -> WeightValue:
    """w(r) = max over stored m of (m ln r - ln K_m); w(0) = 0."""
    m_star, truncated = trace_index(weight, r)
    if r == 0.0:
        return WeightValue(0.0, 0, False)
    ln_r = math.log(r)
    value = m_star * ln_r - float(weight.log_k[m_star])
    return WeightValue(value, m_star, truncated)


def eval_w_grid(weight: AssociatedWeight, r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized eval_w: returns (values, trace indices, truncation mask)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(~np.isfinite(r)):
        raise ValueError("radii must be finite and nonnegative")
    pos = r > 0.0
    ln_r = np.zeros_like(r)
    np.log(r, out=ln_r, where=pos)
    m_star = np.searchsorted(weight.ratios, ln_r, side="right").astype(np.int64)
    m_star[~pos] = 0
    values = m_star * ln_r - weight.log_k[m_star]
    values[~pos] = 0.0
    return values, m_star, (m_star == weight.m_max) & pos


def legendre_recover(weight: AssociatedWeight, n: int) -> float:
    """sup_{r>0} (n ln r - w(r)), evaluated at the attainment slope.

    Equals ln K_n exactly for the stored log-convex sequence; the float
    products cancel term for term, so the recovery is bitwise clean when
    the trace index is n itself.
    """
    if not (0 <= n < weight.m_max):
        raise IndexError("index must satisfy 0 <= n < m_max")
    if n == 0:
        return 0.0
    ln_r = float(weight.ratios[n - 1])
    m_star = int(np.searchsorted(weight.ratios, ln_r, side="right"))
    w_val = m_star * ln_r - float(weight.log_k[m_star])
    return n * ln_r - w_val


def optimal_radius(weight: AssociatedWeight, n: int) -> float:
    """Minimizer r* = K_n / K_{n-1} of e^{w(r)} / r^n."""
    if not (1 <= n < weight.m_max):
        raise IndexError("index must satisfy 1 <= n < m_max")
    return math.exp(float(weight.ratios[n - 1]))


def lemma_gap(weight: AssociatedWeight, r: float) -> LemmaGap:
    """w(e t2^2 r) + 3 ln t1 - 2 w(r); nonnegative wherever unflagged."""
    dual = weight.dual
    scaled = math.e * dual.t2 * dual.t2 * r
    w1 = eval_w(weight, r)
    w2 = eval_w(weight, scaled)
    gap = w2.value + 3.0 * dual.ln_t1 - 2.0 * w1.value
    return LemmaGap(gap, w1.truncated or w2.truncated, w1.value, w2.value)


def lemma_gap_grid(weight: AssociatedWeight, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized lemma gap sweep: (gaps, truncation mask)."""
    dual = weight.dual
    r = np.asarray(r, dtype=float)
    w1, _, t1mask = eval_w_grid(weight, r)
    w2, _, t2mask = eval_w_grid(weight, math.e * dual.t2 * dual.t2 * r)
    return w2 + 3.0 * dual.ln_t1 - 2.0 * w1, t1mask | t2mask

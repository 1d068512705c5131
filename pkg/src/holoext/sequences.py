"""Weight sequences, their growth conditions, and the dual log-convex sequence.

A weight sequence M = (M_k) with M_0 = 1 is stored entirely in the log
domain (ln M_k next to a table of ln k! built by cumulative summation), so
every check below is an exact float comparison with no overflow for
k <= 1000 and beyond.

The checks:
  * log-convexity         M_k^2 <= M_{k-1} M_{k+1}
  * superlinear growth    ln M_k / k -> infinity      (finite-sample proxy)
  * factorial domination  M_k <= a_eps eps^k k! for every eps > 0 (proxy)

and the derived object: the greatest log-convex minorant K of m!/M_m with
K_0 = 1, together with the smallest sandwich constants t1, t2 > 1 such that

    t1^{-1} t2^{-m} K_m  <=  m!/M_m  <=  t1 t2^m K_m    for all stored m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

#: minimal admissible value of ln t1 and ln t2 (the constants must exceed 1)
LN_T_FLOOR = 1e-6
#: search cap for ln t1, ln t2 in the sandwich fit
LN_T_CAP = 10.0

DEFAULT_K_MAX = 120


class DualFitError(ValueError):
    """No sandwich constants below the configured cap fit the sequence."""


def log_factorials(k_max: int) -> list[float]:
    """ln k! for k = 0..k_max by cumulative summation of ln j.

    Deliberately not a Stirling approximation: successive entries differ by
    exactly fl(ln k), so ratios of factorials compare reproducibly.
    """
    out = [0.0] * (k_max + 1)
    acc = 0.0
    for k in range(1, k_max + 1):
        acc += math.log(k)
        out[k] = acc
    return out


@dataclass(frozen=True)
class SequenceSpec:
    """How a weight sequence is generated.

    kind = "gevrey"           : M_k = (k!)^s            (param s)
    kind = "geometric-gevrey" : M_k = c^k (k!)^s        (params c, s)
    kind = "explicit"         : ln M_k given as a list

    The two named kinds can be evaluated at any index, which the analytic
    envelope bounds use to scan past the stored window.
    """

    kind: str
    s: float | None = None
    c: float | None = None
    log_terms: tuple[float, ...] | None = None
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self) -> None:
        if self.kind not in ("gevrey", "geometric-gevrey", "explicit"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind in ("gevrey", "geometric-gevrey"):
            if self.s is None or not (0.0 < self.s < 1.0):
                raise ValueError("exponent s must lie in (0, 1)")
        if self.kind == "geometric-gevrey" and (self.c is None or self.c <= 0):
            raise ValueError("geometric factor c must be positive")
        if self.kind == "explicit":
            if not self.log_terms:
                raise ValueError("explicit sequence needs log terms")
            if self.log_terms[0] != 0.0:
                raise ValueError("ln M_0 must be 0")
        if self.k_max < 8:
            raise ValueError("k_max must be at least 8")

    @property
    def extendable(self) -> bool:
        return self.kind != "explicit"

    def log_term(self, k: int, log_fact: Sequence[float]) -> float:
        """ln M_k; `log_fact` must cover index k for the named kinds."""
        if self.kind == "gevrey":
            return self.s * log_fact[k]
        if self.kind == "geometric-gevrey":
            return k * math.log(self.c) + self.s * log_fact[k]
        if k >= len(self.log_terms):
            raise IndexError(f"explicit sequence stores only k <= {len(self.log_terms) - 1}")
        return self.log_terms[k]


@dataclass(frozen=True)
class WeightSequence:
    """The sequence M in log domain: log_terms[k] = ln M_k."""

    log_terms: tuple[float, ...]
    log_fact: tuple[float, ...]
    spec: SequenceSpec | None = None

    def __post_init__(self) -> None:
        if len(self.log_terms) < 2:
            raise ValueError("need at least M_0, M_1")
        if self.log_terms[0] != 0.0:
            raise ValueError("M_0 must equal 1 (ln M_0 = 0)")
        if any(not math.isfinite(v) for v in self.log_terms):
            raise ValueError("all ln M_k must be finite")
        if len(self.log_fact) != len(self.log_terms):
            raise ValueError("log_fact must align with log_terms")

    @property
    def k_max(self) -> int:
        return len(self.log_terms) - 1


def from_spec(spec: SequenceSpec) -> WeightSequence:
    lf = log_factorials(spec.k_max)
    terms = tuple(spec.log_term(k, lf) for k in range(spec.k_max + 1))
    return WeightSequence(log_terms=terms, log_fact=tuple(lf), spec=spec)


def gevrey(s: float, k_max: int = DEFAULT_K_MAX) -> WeightSequence:
    """M_k = (k!)^s with 0 < s < 1."""
    return from_spec(SequenceSpec(kind="gevrey", s=s, k_max=k_max))


def geometric_gevrey(c: float, s: float, k_max: int = DEFAULT_K_MAX) -> WeightSequence:
    """M_k = c^k (k!)^s."""
    return from_spec(SequenceSpec(kind="geometric-gevrey", c=c, s=s, k_max=k_max))


def explicit_sequence(log_terms: Sequence[float]) -> WeightSequence:
    spec = SequenceSpec(
        kind="explicit",
        log_terms=tuple(float(v) for v in log_terms),
        k_max=max(8, len(log_terms) - 1),
    )
    lf = log_factorials(len(spec.log_terms) - 1)
    return WeightSequence(log_terms=spec.log_terms, log_fact=tuple(lf), spec=spec)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a single validation sweep."""

    name: str
    passed: bool
    failure_index: int | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "failure_index": self.failure_index,
            "details": self.details,
        }


def validate_alpha1(seq: WeightSequence) -> CheckReport:
    """Log-convexity: 2 ln M_k <= ln M_{k-1} + ln M_{k+1}, zero tolerance."""
    if seq.k_max < 2:
        raise ValueError("need k_max >= 2")
    lt = seq.log_terms
    for k in range(1, seq.k_max):
        if 2.0 * lt[k] > lt[k - 1] + lt[k + 1]:
            return CheckReport("alpha1", False, failure_index=k,
                               details={"lhs": 2.0 * lt[k], "rhs": lt[k - 1] + lt[k + 1]})
    return CheckReport("alpha1", True, details={"k_checked": seq.k_max})


# Margin separating a genuinely monotone trend from float noise on ratios
# of magnitude <= ~10; constant sequences wobble by ~1e-16 per entry.
_TREND_MARGIN = 1e-12


def validate_growth(seq: WeightSequence, threshold: float = 1.0) -> CheckReport:
    """Finite-sample proxy for ln M_k / k -> infinity.

    Passes when the ratio ln M_k / k increases strictly over the tail half
    of the stored range and exceeds `threshold` at k_max.  A limit cannot
    be decided from finitely many terms; the report records the checked
    range and the mean tail slope so the caller can judge the evidence.
    """
    if seq.k_max < 8:
        raise ValueError("need k_max >= 8")
    ratios = [seq.log_terms[k] / k for k in range(1, seq.k_max + 1)]
    tail_start = len(ratios) // 2
    tail = ratios[tail_start:]
    increasing = all(b > a + _TREND_MARGIN for a, b in zip(tail, tail[1:]))
    tail_slope = (tail[-1] - tail[0]) / (len(tail) - 1)
    passed = increasing and ratios[-1] > threshold
    failure = None
    if not increasing:
        for i, (a, b) in enumerate(zip(tail, tail[1:])):
            if not b > a + _TREND_MARGIN:
                failure = tail_start + i + 2  # ratio index i maps to k = i + 1
                break
    elif not passed:
        failure = seq.k_max
    return CheckReport(
        "growth", passed, failure_index=failure,
        details={
            "ratio_at_k_max": ratios[-1],
            "threshold": threshold,
            "tail_slope": tail_slope,
            "tail_start_k": tail_start + 1,
            "k_checked": seq.k_max,
        },
    )


@dataclass(frozen=True)
class Alpha2Certificate:
    """Witness for M_k <= a_eps eps^k k! over the stored range.

    a_eps is the exact max of M_k / (eps^k k!); it is reported both as a
    float (may overflow to inf for tiny eps) and in the log domain.  The
    root trend (M_k/k!)^{1/k} must fall strictly toward 0 for the bound to
    be plausible for *every* eps; `root_trend_ok` records that proxy.
    """

    epsilon: float
    a_eps: float
    log_a_eps: float
    arg_k: int
    k_checked: int
    root_trend: tuple[float, ...]
    root_trend_ok: bool

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "a_eps": self.a_eps,
            "log_a_eps": self.log_a_eps,
            "arg_k": self.arg_k,
            "k_checked": self.k_checked,
            "root_trend_ok": self.root_trend_ok,
            "root_trend_tail": list(self.root_trend[-4:]),
        }


def validate_alpha2(seq: WeightSequence, epsilons: Sequence[float]) -> list[Alpha2Certificate]:
    """Fit a_eps = max_k M_k/(eps^k k!) per eps, all in the log domain."""
    certs = []
    lt, lf = seq.log_terms, seq.log_fact
    roots = tuple(math.exp((lt[k] - lf[k]) / k) for k in range(1, seq.k_max + 1))
    tail = roots[len(roots) // 2:]
    trend_ok = all(b < a - _TREND_MARGIN for a, b in zip(tail, tail[1:]))
    for eps in epsilons:
        if eps <= 0:
            raise ValueError("eps must be positive")
        ln_eps = math.log(eps)
        log_a, arg_k = 0.0, 0  # k = 0 term is exactly 0
        for k in range(1, seq.k_max + 1):
            v = lt[k] - k * ln_eps - lf[k]
            if v > log_a:
                log_a, arg_k = v, k
        certs.append(Alpha2Certificate(
            epsilon=eps,
            a_eps=math.exp(log_a) if log_a < 709.0 else math.inf,
            log_a_eps=log_a,
            arg_k=arg_k,
            k_checked=seq.k_max,
            root_trend=roots,
            root_trend_ok=trend_ok,
        ))
    return certs


@dataclass(frozen=True)
class DualSequence:
    """The log-convex minorant K of m!/M_m with its sandwich constants.

    log_terms[m] = ln K_m is built cumulatively from `step_ratios`, the
    per-step slopes ln K_m - ln K_{m-1}; the slopes are constant on each
    hull segment, so they are nondecreasing *exactly* as stored floats.
    """

    log_terms: tuple[float, ...]
    step_ratios: tuple[float, ...]  # step_ratios[m-1] = ln K_m - ln K_{m-1}
    t1: float
    t2: float
    ln_t1: float
    ln_t2: float

    def __post_init__(self) -> None:
        if self.log_terms[0] != 0.0:
            raise ValueError("K_0 must equal 1")
        if len(self.step_ratios) != len(self.log_terms) - 1:
            raise ValueError("step_ratios must have one entry per step")
        if any(b < a for a, b in zip(self.step_ratios, self.step_ratios[1:])):
            raise ValueError("K must be log-convex (nondecreasing step ratios)")
        if not (self.t1 > 1.0 and self.t2 > 1.0):
            raise ValueError("sandwich constants must exceed 1")

    @property
    def m_max(self) -> int:
        return len(self.log_terms) - 1


def _lower_hull_vertices(values: Sequence[float]) -> list[int]:
    """Indices of the lower convex hull of (m, values[m]); collinear kept."""
    verts: list[int] = []
    for m, y in enumerate(values):
        while len(verts) >= 2:
            m1, m2 = verts[-2], verts[-1]
            y1, y2 = values[m1], values[m2]
            # pop the middle vertex when it sits strictly above the chord
            if (y2 - y1) * (m - m2) > (y - y2) * (m2 - m1):
                verts.pop()
            else:
                break
        verts.append(m)
    return verts


def _fit_sandwich(gaps: Sequence[float], ln_floor: float, ln_cap: float) -> tuple[float, float]:
    """Smallest (ln t1, ln t2) with ln t1 + m ln t2 >= gaps[m] for all m.

    For fixed v = ln t2 the minimal feasible u = ln t1 is
    max(ln_floor, max_m(gaps[m] - m v)); the tie-break objective
    J(v) = u(v) + m_max * v is convex piecewise linear, so a coarse scan
    plus golden-section refinement on the bracket finds the minimum.
    """
    m_max = len(gaps) - 1

    def u_of(v: float) -> float:
        return max(ln_floor, max(g - m * v for m, g in enumerate(gaps)))

    def objective(v: float) -> float:
        return u_of(v) + m_max * v

    grid = [ln_floor + i * (ln_cap - ln_floor) / 64 for i in range(65)]
    best = min(range(len(grid)), key=lambda i: objective(grid[i]))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    for _ in range(120):
        if objective(c) <= objective(d):
            b, d = d, c
            c = b - invphi * (b - a)
        else:
            a, c = c, d
            d = a + invphi * (b - a)
    v = max(ln_floor, 0.5 * (a + b))
    u = u_of(v)
    if u > ln_cap or v > ln_cap:
        raise DualFitError(
            f"no sandwich constants with ln t <= {ln_cap} fit (needed ln t1 = {u:.3g})")
    return u, v


def derive_dual(seq: WeightSequence,
                ln_floor: float = LN_T_FLOOR,
                ln_cap: float = LN_T_CAP) -> DualSequence:
    """Greatest log-convex minorant of m!/M_m plus fitted (t1, t2).

    The minorant is the lower convex hull of the points (m, ln(m!/M_m)),
    normalized through (0, 0) automatically because M_0 = 1.  Constants
    are the smallest pair above exp(ln_floor) satisfying the sandwich on
    the stored window, ties broken by minimizing ln t1 + m_max ln t2.
    """
    rep = validate_alpha1(seq)
    if not rep.passed:
        raise ValueError(f"sequence is not log-convex (fails at k={rep.failure_index})")
    h = [seq.log_fact[m] - seq.log_terms[m] for m in range(seq.k_max + 1)]
    verts = _lower_hull_vertices(h)

    slopes: list[float] = []
    for i1, i2 in zip(verts, verts[1:]):
        slope = (h[i2] - h[i1]) / (i2 - i1)
        slopes.extend([slope] * (i2 - i1))
    # exact nondecreasing order can be disturbed only by the division
    # rounding on collinear segments; restore it without changing values
    for i in range(1, len(slopes)):
        if slopes[i] < slopes[i - 1]:
            slopes[i] = slopes[i - 1]

    log_k = [0.0]
    for s in slopes:
        log_k.append(log_k[-1] + s)

    gaps = [max(0.0, h[m] - log_k[m]) for m in range(len(h))]
    u, v = _fit_sandwich(gaps, ln_floor, ln_cap)

    dual = DualSequence(
        log_terms=tuple(log_k),
        step_ratios=tuple(slopes),
        t1=math.exp(u),
        t2=math.exp(v),
        ln_t1=u,
        ln_t2=v,
    )
    # sandwich must hold as stored; u was fitted as a running max so only
    # degenerate rounding could break it
    for m in range(len(h)):
        if abs(h[m] - log_k[m]) > u + m * v + 1e-9:
            raise DualFitError(f"sandwich violated at m={m} after fit")
    return dual


def check_supermultiplicative(seq: WeightSequence, p_max: int) -> CheckReport:
    """M_{p+q} >= M_p M_q for all 0 <= p, q <= p_max (log domain, exact)."""
    if p_max > seq.k_max // 2:
        raise ValueError("p_max must not exceed k_max/2")
    lt = seq.log_terms
    for p in range(p_max + 1):
        for q in range(p_max + 1):
            if lt[p + q] < lt[p] + lt[q]:
                return CheckReport("supermultiplicative", False, failure_index=p,
                                   details={"p": p, "q": q})
    return CheckReport("supermultiplicative", True, details={"p_max": p_max})


def check_K_submultiplicative(dual: DualSequence, p_max: int) -> CheckReport:
    """K_{p+q} <= t1^3 (e t2^2)^{p+q} K_p K_q for all 0 <= p, q <= p_max."""
    if p_max > dual.m_max // 2:
        raise ValueError("p_max must not exceed m_max/2")
    lk = dual.log_terms
    slack = 3.0 * dual.ln_t1
    rate = 1.0 + 2.0 * dual.ln_t2
    for p in range(p_max + 1):
        for q in range(p_max + 1):
            if lk[p + q] > slack + (p + q) * rate + lk[p] + lk[q]:
                return CheckReport("K-submultiplicative", False, failure_index=p,
                                   details={"p": p, "q": q})
    return CheckReport("K-submultiplicative", True, details={"p_max": p_max})

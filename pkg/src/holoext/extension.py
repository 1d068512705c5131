"""Entire extension by Taylor summation in powers of the imaginary part.

The extension of a smooth f at z = x + iy expands around x:

    F(z) = sum_alpha  D^alpha f(x) / alpha!  *  (iy)^alpha,

grade by grade.  Per-grade sums use exactly rounded compensated summation
(math.fsum) on real and imaginary parts, and compensated summation again
across grades, so the value is independent of enumeration order bit for
bit.

The discarded tail is certified through the class-level derivative bound
|D^alpha f(x)| <= p * eps^{|alpha|} M_{|alpha|} e^{phi(x)}: after the
multinomial collapse, grade N' contributes at most

    t(N') = p e^{phi(x)} (eps n ||y||)^{N'} M_{N'} / N'!

and once the consecutive-term ratio drops below 1/2 and keeps falling,
the geometric majorant t(N+1)/(1 - ratio) bounds everything beyond N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import analytic_bounds
from .models import ModelPair, OracleDepthError, SmoothModel
from .multiindex import compositions, multi_factorial
from .phi_families import PhiFamily
from .sequences import WeightSequence
from .weight_function import AssociatedWeight, eval_w_grid


class TailError(ValueError):
    """The tail certificate is unavailable at this truncation order."""


def multinomial_sum(dim: int, total: int) -> Fraction:
    """sum over |alpha| = total of 1/alpha!, exact; equals dim^total/total!."""
    if dim < 1 or total < 0:
        raise ValueError("need dim >= 1 and total >= 0")
    acc = Fraction(0)
    for alpha in compositions(total, dim):
        acc += Fraction(1, multi_factorial(alpha))
    return acc


@dataclass(frozen=True)
class ExtensionResult:
    value: complex
    n_used: int
    tail_bound: float | None   # None when no certificate was requested
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "n_used": self.n_used,
            "tail_bound": self.tail_bound,
            "flags": list(self.flags),
        }


def _smooth(model: ModelPair | SmoothModel) -> SmoothModel:
    return model.smooth if isinstance(model, ModelPair) else model


def extend(model: ModelPair | SmoothModel, z: Sequence[complex], order: int) -> ExtensionResult:
    """Partial extension through grade `order` (inclusive)."""
    smooth = _smooth(model)
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    if zv.shape != (smooth.dim,):
        raise ValueError(f"z must have dimension {smooth.dim}")
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > smooth.max_order:
        raise OracleDepthError(f"order {order} exceeds the oracle cap {smooth.max_order}")
    x = zv.real.copy()
    iy = 1j * zv.imag

    grade_re: list[float] = []
    grade_im: list[float] = []
    for total in range(order + 1):
        parts_re: list[float] = []
        parts_im: list[float] = []
        for alpha in compositions(total, smooth.dim):
            d = smooth.derivative(alpha, x)
            if d == 0.0:
                continue
            mono = complex(1.0)
            for a, w in zip(alpha, iy):
                mono *= w ** a
            term = d / multi_factorial(alpha) * mono
            parts_re.append(term.real)
            parts_im.append(term.imag)
        grade_re.append(math.fsum(parts_re))
        grade_im.append(math.fsum(parts_im))
    value = complex(math.fsum(grade_re), math.fsum(grade_im))

    tail = 0.0 if not np.any(zv.imag) else None
    return ExtensionResult(value=value, n_used=order, tail_bound=tail)


_RATIO_LOOKAHEAD = 50


def tail_bound(p_bound: float, m: int, eps: float, weights: WeightSequence,
               phi_val: float, y_norm: float, order: int, dim: int,
               log_p_bound: float | None = None) -> float:
    """Certified bound on the grades beyond `order`.

    Requires the per-grade term ratio at `order` to be below 1/2 and
    nonincreasing over a 50-grade lookahead (a theorem for the named
    sequence kinds, an audited window otherwise).
    """
    if y_norm < 0:
        raise ValueError("y_norm must be nonnegative")
    if y_norm == 0.0:
        return 0.0
    if eps <= 0 or dim < 1:
        raise ValueError("need eps > 0 and dim >= 1")
    if log_p_bound is None:
        if not p_bound > 0:
            raise ValueError("p_bound must be positive")
        log_p = math.log(p_bound)
    else:
        log_p = log_p_bound
    ln_base = math.log(eps * dim * y_norm)

    def log_m_at(k: int) -> float:
        return analytic_bounds._log_m(weights, k)

    try:
        def ratio(k: int) -> float:
            return math.exp(ln_base + log_m_at(k + 1) - log_m_at(k) - math.log(k + 1))

        r0 = ratio(order)
        if not r0 < 0.5:
            raise TailError(
                f"per-grade term ratio {r0:.4g} >= 1/2 at grade {order}; increase N")
        # for the named kinds the ratio is c (k+1)^{s-1} times the base,
        # decreasing outright; explicit windows get an audited lookahead
        if weights.spec is None or not weights.spec.extendable:
            prev = r0
            for k in range(order + 1, order + 1 + _RATIO_LOOKAHEAD):
                rk = ratio(k)
                if rk > prev + 1e-12:
                    raise TailError(
                        f"term ratio rises again at grade {k}; no geometric certificate")
                prev = rk
        log_t_next = (log_p + phi_val + (order + 1) * ln_base
                      + log_m_at(order + 1) - math.lgamma(order + 2))
    except analytic_bounds.EnvelopeError as exc:
        raise TailError(str(exc)) from exc
    if log_t_next >= 709.0:
        return math.inf
    return math.exp(log_t_next) / (1.0 - r0)


#: certification widths tried relative to the requested eps; wide widths
#: have small envelopes but slow grade decay, narrow widths the reverse
_LADDER_FACTORS = (4.0, 3.0, 2.0, 1.5, 1.0, 0.75, 0.5, 0.35, 0.25, 0.15, 0.1)


def certification_ladder(model: ModelPair, weights: WeightSequence, phi: PhiFamily,
                         m: int, eps: float) -> list[tuple[float, float]]:
    """(width, log envelope) pairs usable to certify the Taylor tail.

    The class bound holds at every width with its own seminorm constant;
    widths whose envelope diverges are simply dropped.
    """
    out: list[tuple[float, float]] = []
    for f in _LADDER_FACTORS:
        e = eps * f
        try:
            out.append((e, analytic_bounds.p_upper(model, weights, phi, m, e).log_value))
        except analytic_bounds.EnvelopeError:
            continue
    if not out:
        raise TailError("no certification width admits a finite envelope")
    return out


def adaptive_extend(model: ModelPair, z: Sequence[complex], tol: float, *,
                    weights: WeightSequence, phi: PhiFamily, m: int = 1,
                    eps: float = 1.0, log_p_bound: float | None = None,
                    ladder: Sequence[tuple[float, float]] | None = None) -> ExtensionResult:
    """Smallest grade whose certified tail is at most `tol`.

    Certification tries the width ladder and keeps the smallest admissible
    grade; an explicit `log_p_bound` pins the single width `eps` instead.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    smooth = model.smooth
    zv = np.atleast_1d(np.asarray(z, dtype=complex))
    if zv.shape != (smooth.dim,):
        raise ValueError(f"z must have dimension {smooth.dim}")
    y_norm = float(np.linalg.norm(zv.imag))
    if y_norm == 0.0:
        res = extend(model, zv, 0)
        return ExtensionResult(res.value, 0, 0.0)

    if ladder is None:
        if log_p_bound is not None:
            ladder = [(eps, log_p_bound)]
        else:
            ladder = certification_ladder(model, weights, phi, m, eps)
    phi_val = phi.value(m, zv.real)

    best: tuple[int, float] | None = None  # (order, bound)
    last_err: TailError | None = None
    for e, log_p in ladder:
        hi = smooth.max_order if best is None else best[0] - 1
        for order in range(hi + 1):
            try:
                bound = tail_bound(math.nan, m, e, weights, phi_val, y_norm,
                                   order, smooth.dim, log_p_bound=log_p)
            except TailError as exc:
                last_err = exc
                continue
            if bound <= tol:
                best = (order, bound)
                break
    if best is None:
        detail = f" (last: {last_err})" if last_err is not None else ""
        raise OracleDepthError(
            f"oracle depth {smooth.max_order} exhausted before reaching "
            f"tol={tol:g}{detail}")
    res = extend(model, zv, best[0])
    return ExtensionResult(res.value, best[0], best[1])


@dataclass(frozen=True)
class GrowthReport:
    """Grid sweep of |F(z)| e^{-phi_m(x) - w(2 eps n t2 |y|)} against its bound."""

    passed: bool
    log_max_ratio: float
    max_ratio: float
    arg_z: complex
    log_bound: float
    slack_log: float
    n_truncated: int
    p_upper_log: float
    m: int
    eps: float

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "log_max_ratio": self.log_max_ratio,
            "max_ratio": self.max_ratio,
            "arg_re": self.arg_z.real,
            "arg_im": self.arg_z.imag,
            "log_bound": self.log_bound,
            "slack_log": self.slack_log,
            "n_truncated": self.n_truncated,
            "m": self.m,
            "eps": self.eps,
        }


def growth_ratio(pair: ModelPair, weight: AssociatedWeight, phi: PhiFamily,
                 seq: WeightSequence, m: int, eps: float,
                 x_grid: np.ndarray, y_grid: np.ndarray) -> GrowthReport:
    """Check the forward growth inequality on a rectangular z grid.

    The extension is evaluated through its closed entire form (the Taylor
    operator agrees with it within certified tails wherever the tails are
    certifiable; the agreement is tested separately).  Truncated weight
    values underestimate the true weight, which only *overstates* the
    ratio, so a pass on a partly truncated grid is still conservative.
    """
    if pair.dim != 1:
        raise NotImplementedError("grid sweep is one-dimensional")
    dual = weight.dual
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    zz = x[None, :] + 1j * y[:, None]
    if pair.entire.value_grid is not None:
        vals = pair.entire.value_grid(zz)
    else:
        vals = np.array([[pair.entire.value(np.array([z])) for z in row] for row in zz])
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(vals))
    phi_x = np.array([phi.value(m, np.array([xi])) for xi in x])
    factor = 2.0 * eps * pair.dim * dual.t2
    w_y, _, trunc = eval_w_grid(weight, factor * np.abs(y))
    log_ratio = log_abs - phi_x[None, :] - w_y[:, None]

    flat = int(np.argmax(log_ratio))
    iy_, ix_ = np.unravel_index(flat, log_ratio.shape)
    log_max = float(log_ratio[iy_, ix_])
    env = analytic_bounds.p_upper(pair, seq, phi, m, eps)
    log_bound = math.log(2.0) + dual.ln_t1 + env.log_value
    return GrowthReport(
        passed=log_max <= log_bound + 1e-12,
        log_max_ratio=log_max,
        max_ratio=math.exp(log_max) if log_max < 709.0 else math.inf,
        arg_z=complex(zz[iy_, ix_]),
        log_bound=log_bound,
        slack_log=log_bound - log_max,
        n_truncated=int(np.count_nonzero(trunc)),
        p_upper_log=env.log_value,
        m=m,
        eps=eps,
    )

"""Grid seminorm estimators, the two continuity checks, and the round trip.

The derivative seminorm of a smooth f and the modulus seminorm of an
entire F,

    p(f) = sup_{x, alpha} |D^alpha f(x)| / (eps^{|a|} M_{|a|} e^{phi_m(x)}),
    q(F) = sup_z |F(z)| / e^{phi_m(x) + w(eps ||y||)},

are estimated by finite sups over configured grids.  An estimate is a
certified *lower* bound of the true supremum: points whose weight value
is truncated are excluded, and saturation flags report when the argmax
sits on a grid edge (in space or in derivative order), i.e. when the true
supremum plausibly lives outside the window.

The two continuity checks therefore compare a grid lower bound on their
small side against an analytic upper bound on their large side, so a pass
is meaningful and a negative slack is a genuine counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import analytic_bounds
from .extension import adaptive_extend, certification_ladder
from .models import EntireModel, ModelPair, SmoothModel
from .multiindex import graded_indices, multi_factorial
from .phi_families import PhiFamily, ShiftBound
from .restriction import ChainConstants, cauchy_jet, chain_constants, contour
from .sequences import DualSequence, WeightSequence
from .weight_function import AssociatedWeight, eval_w_grid


@dataclass(frozen=True)
class SeminormEstimate:
    value: float
    log_value: float
    arg_x: tuple[float, ...] | None
    arg_alpha: tuple[int, ...] | None
    arg_y: float | None
    flags: tuple[str, ...]
    grid: dict = field(default_factory=dict)

    @property
    def blow_up(self) -> bool:
        return "alpha-saturated" in self.flags or "x-boundary" in self.flags

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "arg_x": list(self.arg_x) if self.arg_x is not None else None,
            "arg_alpha": list(self.arg_alpha) if self.arg_alpha is not None else None,
            "arg_y": self.arg_y,
            "flags": list(self.flags),
            "grid": self.grid,
        }


def _points(x_grid, dim: int) -> list[np.ndarray]:
    pts = [np.atleast_1d(np.asarray(x, dtype=float)) for x in x_grid]
    if any(p.shape != (dim,) for p in pts):
        raise ValueError(f"grid points must have dimension {dim}")
    return pts


def _on_axis_boundary(pt: np.ndarray, pts: list[np.ndarray]) -> bool:
    lo = np.min(pts, axis=0)
    hi = np.max(pts, axis=0)
    return bool(np.any(pt <= lo) or np.any(pt >= hi))


def p_estimate(model: ModelPair | SmoothModel, seq: WeightSequence, phi: PhiFamily,
               m: int, eps: float, x_grid, alpha_max: int) -> SeminormEstimate:
    """Grid estimate of the derivative seminorm, with saturation flags."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    smooth = model.smooth if isinstance(model, ModelPair) else model
    if alpha_max > seq.k_max:
        raise ValueError("alpha_max exceeds the stored sequence window")
    pts = _points(x_grid, smooth.dim)
    phi_vals = [phi.value(m, p) for p in pts]
    ln_eps = math.log(eps)

    best = -math.inf
    arg_x: np.ndarray | None = None
    arg_a: tuple[int, ...] | None = None
    grade_sup = [-math.inf] * (alpha_max + 1)
    for alpha in graded_indices(smooth.dim, alpha_max):
        n_abs = sum(alpha)
        const = -n_abs * ln_eps - seq.log_terms[n_abs]
        for pt, pv in zip(pts, phi_vals):
            d = smooth.derivative(alpha, pt)
            if d == 0.0:
                continue
            v = math.log(abs(d)) + const - pv
            if v > grade_sup[n_abs]:
                grade_sup[n_abs] = v
            if v > best:
                best, arg_x, arg_a = v, pt, alpha

    flags = []
    if arg_a is not None and sum(arg_a) == alpha_max and alpha_max >= 1 \
            and grade_sup[alpha_max] > grade_sup[alpha_max - 1]:
        flags.append("alpha-saturated")
    if arg_x is not None and len(pts) > 1 and _on_axis_boundary(arg_x, pts):
        flags.append("x-boundary")
    return SeminormEstimate(
        value=math.exp(best) if best > -math.inf else 0.0,
        log_value=best,
        arg_x=tuple(arg_x) if arg_x is not None else None,
        arg_alpha=arg_a,
        arg_y=None,
        flags=tuple(flags),
        grid={"n_x": len(pts), "alpha_max": alpha_max, "m": m, "eps": eps},
    )


@dataclass(frozen=True)
class MembershipReport:
    value: float
    blow_up: bool
    estimate: SeminormEstimate


def membership_estimate(model, seq: WeightSequence, phi: PhiFamily, m: int,
                        eps: float, x_grid, alpha_max: int) -> MembershipReport:
    """Derivative-seminorm estimate with a single blow-up verdict.

    A raised flag means the running sup still grows at the edge of the
    sampled window, i.e. the model is likely outside the class here.
    """
    est = p_estimate(model, seq, phi, m, eps, x_grid, alpha_max)
    return MembershipReport(value=est.value, blow_up=est.blow_up, estimate=est)


def q_estimate(model: ModelPair | EntireModel, weight: AssociatedWeight,
               phi: PhiFamily, m: int, eps: float,
               x_grid: np.ndarray, y_grid: np.ndarray) -> SeminormEstimate:
    """Grid estimate of the modulus seminorm over a rectangular z grid.

    Truncated weight values would overstate the ratio, so those grid
    points are excluded from the sup and counted in the flags instead.
    """
    entire = model.entire if isinstance(model, ModelPair) else model
    if entire.dim != 1:
        raise NotImplementedError("grid sweep is one-dimensional")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    zz = x[None, :] + 1j * y[:, None]
    if entire.value_grid is not None:
        vals = entire.value_grid(zz)
    else:
        vals = np.array([[entire.value(np.array([z])) for z in row] for row in zz])
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(vals))
    phi_x = np.array([phi.value(m, np.array([xi])) for xi in x])
    w_y, _, trunc = eval_w_grid(weight, eps * np.abs(y))
    log_ratio = log_abs - phi_x[None, :] - w_y[:, None]
    log_ratio[trunc, :] = -math.inf

    flat = int(np.argmax(log_ratio))
    iy_, ix_ = np.unravel_index(flat, log_ratio.shape)
    best = float(log_ratio[iy_, ix_])
    flags = []
    n_trunc = int(np.count_nonzero(trunc))
    if n_trunc:
        flags.append("w-truncated")
    if best > -math.inf and (ix_ in (0, len(x) - 1) or iy_ in (0, len(y) - 1)):
        flags.append("z-boundary")
    return SeminormEstimate(
        value=math.exp(best) if best > -math.inf else 0.0,
        log_value=best,
        arg_x=(float(x[ix_]),) if best > -math.inf else None,
        arg_alpha=None,
        arg_y=float(y[iy_]) if best > -math.inf else None,
        flags=tuple(flags),
        grid={"n_x": len(x), "n_y": len(y), "m": m, "eps": eps,
              "n_truncated": n_trunc},
    )


@dataclass(frozen=True)
class ContinuityReport:
    name: str
    passed: bool
    log_lhs: float
    log_rhs: float
    slack_log: float
    flags: tuple[str, ...]
    worst: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "log_lhs": self.log_lhs,
            "log_rhs": self.log_rhs,
            "slack_log": self.slack_log,
            "flags": list(self.flags),
            "worst": self.worst,
            "meta": self.meta,
        }


def forward_continuity_check(pair: ModelPair, seq: WeightSequence, dual: DualSequence,
                             weight: AssociatedWeight, phi: PhiFamily, m: int,
                             eps: float, x_grid: np.ndarray,
                             y_grid: np.ndarray) -> ContinuityReport:
    """Modulus seminorm of the extension against 2 t1 times the derivative bound.

    Left side: grid lower estimate of q at the transferred width 2 eps n t2.
    Right side: analytic derivative envelope.  The extension is evaluated
    through its closed entire form (equal to the Taylor operator wherever
    tails certify; tested separately).
    """
    eps_q = 2.0 * eps * pair.dim * dual.t2
    qhat = q_estimate(pair, weight, phi, m, eps_q, x_grid, y_grid)
    env = analytic_bounds.p_upper(pair, seq, phi, m, eps)
    log_rhs = math.log(2.0) + dual.ln_t1 + env.log_value
    passed = qhat.log_value <= log_rhs + 1e-12
    return ContinuityReport(
        name="forward",
        passed=passed,
        log_lhs=qhat.log_value,
        log_rhs=log_rhs,
        slack_log=log_rhs - qhat.log_value,
        flags=qhat.flags,
        worst={"arg_x": qhat.arg_x, "arg_y": qhat.arg_y, "q_hat": qhat.value},
        meta={"m": m, "eps": eps, "eps_q": eps_q, "model": pair.name},
    )


def backward_continuity_check(pair: ModelPair, seq: WeightSequence, dual: DualSequence,
                              weight: AssociatedWeight, phi: PhiFamily, m: int,
                              eps: float, x_grid, alpha_max: int, shift: ShiftBound,
                              radius: float = 1.0, nodes: int = 64) -> ContinuityReport:
    """Derivative seminorm from recovered jets against t1 e^d times the modulus bound.

    The left-side derivative values come from the Cauchy quadrature, so the
    check exercises the restriction operator end to end; the shift constant
    must have been measured at delta = eps, matching the chain that defines
    d. Truncated-weight or diverged shift measurements poison the check and
    are reported as flags.
    """
    if shift.m != m or shift.delta != eps:
        raise ValueError("shift constant must be measured at this (m, delta=eps)")
    const = chain_constants(m, eps, phi.a_m(m), dual.t1, dual.t2, pair.dim, shift.b)
    eps_back = const.c_m * dual.t2 * eps
    ln_eps_back = math.log(eps_back)
    pts = _points(x_grid, pair.dim)
    alphas = list(graded_indices(pair.dim, alpha_max))

    best = -math.inf
    arg_x: np.ndarray | None = None
    arg_a: tuple[int, ...] | None = None
    for pt in pts:
        jet = cauchy_jet(pair.entire, contour(pt, radius, nodes), alphas)
        pv = phi.value(m, pt)
        for alpha, dval in jet.items():
            mag = abs(dval)
            if mag == 0.0:
                continue
            n_abs = sum(alpha)
            v = (math.log(mag) - n_abs * ln_eps_back
                 - seq.log_terms[n_abs] - pv)
            if v > best:
                best, arg_x, arg_a = v, pt, alpha

    env = analytic_bounds.q_upper(pair, seq, phi, m + 1, eps)
    log_rhs = dual.ln_t1 + const.d_m_eps + env.log_value
    flags = tuple(f for f in ["shift-diverged"] if shift.diverged)
    passed = best <= log_rhs + 1e-12 and not shift.diverged
    return ContinuityReport(
        name="backward",
        passed=passed,
        log_lhs=best,
        log_rhs=log_rhs,
        slack_log=log_rhs - best,
        flags=flags,
        worst={"arg_x": tuple(arg_x) if arg_x is not None else None,
               "arg_alpha": list(arg_a) if arg_a is not None else None},
        meta={"m": m, "eps": eps, "eps_back": eps_back, "b": shift.b,
              "c_m": const.c_m, "d_m_eps": const.d_m_eps, "model": pair.name},
    )


@dataclass(frozen=True)
class RoundtripReport:
    passed: bool
    max_abs_err: float
    tol: float
    worst: dict
    rows: tuple[dict, ...]
    reverse_max_err: float
    reverse_tol: float

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "max_abs_err": self.max_abs_err,
            "tol": self.tol,
            "worst": self.worst,
            "reverse_max_err": self.reverse_max_err,
            "reverse_tol": self.reverse_tol,
        }


def roundtrip(pair: ModelPair, points, alpha_max: int, tol: float, *,
              seq: WeightSequence, phi: PhiFamily, m: int = 1, eps: float = 1.0,
              tail_tol: float = 1e-12, radius: float = 1.0, nodes: int = 128,
              reverse_offsets: Sequence[complex] = (0.3 + 0.2j, -0.25 + 0.35j, 0.1 - 0.4j),
              reverse_tol: float = 1e-6, jet_order: int = 12) -> RoundtripReport:
    """Both compositions of extension and restriction.

    Forward-inverse: recover every derivative through |alpha| <= alpha_max
    from contour samples of the *adaptively extended* model and compare to
    the exact jet oracle.  Reverse: rebuild a truncated Taylor jet from
    contour samples of the closed entire form and compare its values at
    nearby complex points to the entire model itself.
    """
    ladder = certification_ladder(pair, seq, phi, m, eps)
    alphas = list(graded_indices(pair.dim, alpha_max))

    def extension_value(zv: np.ndarray) -> complex:
        return adaptive_extend(pair, zv, tail_tol, weights=seq, phi=phi,
                               m=m, eps=eps, ladder=ladder).value

    rows = []
    max_err = -math.inf
    worst: dict = {}
    for x0 in points:
        pt = np.atleast_1d(np.asarray(x0, dtype=float))
        cont = contour(pt, radius, nodes)
        jet = cauchy_jet(extension_value, cont, alphas)
        for alpha in alphas:
            oracle = pair.smooth.derivative(alpha, pt)
            est = jet[alpha]
            err = abs(est - oracle)
            rows.append({
                "x": tuple(pt), "alpha": alpha,
                "estimate_re": est.real, "estimate_im": est.imag,
                "oracle": oracle, "abs_err": err,
            })
            if err > max_err:
                max_err = err
                worst = {"x": tuple(pt), "alpha": list(alpha),
                         "estimate": est.real, "oracle": oracle, "abs_err": err}

    rev_max = -math.inf
    for x0 in points:
        pt = np.atleast_1d(np.asarray(x0, dtype=float))
        cont = contour(pt, radius, nodes)
        jet_alphas = list(graded_indices(pair.dim, jet_order))
        jet = cauchy_jet(pair.entire, cont, jet_alphas)
        for off in reverse_offsets:
            zv = pt.astype(complex)
            zv[0] += off
            acc_re, acc_im = [], []
            for alpha, dval in jet.items():
                mono = complex(1.0)
                for a, base, zc in zip(alpha, pt, zv):
                    mono *= (zc - base) ** a
                term = dval / multi_factorial(alpha) * mono
                acc_re.append(term.real)
                acc_im.append(term.imag)
            rebuilt = complex(math.fsum(acc_re), math.fsum(acc_im))
            rev_max = max(rev_max, abs(rebuilt - pair.entire.value(zv)))

    passed = max_err <= tol and rev_max <= reverse_tol
    return RoundtripReport(
        passed=passed, max_abs_err=max_err, tol=tol, worst=worst,
        rows=tuple(rows), reverse_max_err=rev_max, reverse_tol=reverse_tol,
    )

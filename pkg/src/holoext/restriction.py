"""Derivative recovery through iterated Cauchy integrals on a polydisc torus.

With equal radius R in every coordinate, the distinguished boundary is
parametrized by zeta_j = x_j + R e^{i theta_j} and the recovery reduces to

    D^alpha f(x) = alpha! R^{-|alpha|} * mean over the theta grid of
                   F(zeta(theta)) e^{-i alpha . theta},

a tensor-product trapezoid rule.  The integrand is periodic and entire in
every angle, so the rule converges spectrally in the per-axis node count
and is *exact* for polynomials of per-coordinate degree below it.

The accompanying bound chain turns a modulus seminorm of F into a
derivative bound at x: enlarge the torus to the ball of radius sqrt(n) R,
shift the weight family index down at the cost of the measured constant
b, merge the two weight-function terms through the doubling inequality
(constants c_m = e t2^2 a_m sqrt(n), d = b + 3 ln t1), take the infimum
over R by discrete duality, and land on the factorial-ratio sandwich.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .models import EntireModel
from .multiindex import multi_factorial
from .phi_families import PhiFamily
from .sequences import DualSequence, WeightSequence
from .weight_function import AssociatedWeight, eval_w, optimal_radius


@dataclass(frozen=True)
class PolydiscContour:
    center: tuple[float, ...]
    radius: float
    nodes: int

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.nodes < 4:
            raise ValueError("need at least 4 nodes per axis")

    @property
    def dim(self) -> int:
        return len(self.center)


def contour(center: Sequence[float], radius: float, nodes: int) -> PolydiscContour:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    return PolydiscContour(center=tuple(float(v) for v in c), radius=radius, nodes=nodes)


def _sample(F: EntireModel | Callable, c: PolydiscContour) -> np.ndarray:
    """F on the theta grid, shape (nodes,) * dim."""
    q = c.nodes
    theta = 2.0 * math.pi * np.arange(q) / q
    ring = c.radius * np.exp(1j * theta)
    evaluate = F.value if isinstance(F, EntireModel) else F
    if c.dim == 1 and isinstance(F, EntireModel) and F.value_grid is not None:
        return F.value_grid(c.center[0] + ring)
    out = np.empty((q,) * c.dim, dtype=complex)
    for idx in product(range(q), repeat=c.dim):
        z = np.array([c.center[j] + ring[idx[j]] for j in range(c.dim)])
        out[idx] = evaluate(z)
    return out


def _project(samples: np.ndarray, c: PolydiscContour, alpha: tuple[int, ...]) -> complex:
    q = c.nodes
    theta = 2.0 * math.pi * np.arange(q) / q
    acc = samples
    for a in alpha:
        phase = np.exp(-1j * a * theta) / q
        acc = np.tensordot(acc, phase, axes=([0], [0]))
    coef = complex(acc)
    return multi_factorial(alpha) * c.radius ** (-sum(alpha)) * coef


def cauchy_derivative(F: EntireModel | Callable, c: PolydiscContour,
                      alpha: Sequence[int]) -> complex:
    """alpha-th derivative of F|R^n at the contour center."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != c.dim or any(a < 0 for a in alpha):
        raise ValueError("bad multi-index")
    if any(a > c.nodes // 2 - 1 for a in alpha):
        raise ValueError("per-coordinate order must stay below nodes/2 - 1")
    return _project(_sample(F, c), c, alpha)


def cauchy_jet(F: EntireModel | Callable, c: PolydiscContour,
               alphas: Sequence[tuple[int, ...]]) -> dict[tuple[int, ...], complex]:
    """Derivatives for many multi-indices from one set of contour samples."""
    samples = _sample(F, c)
    out = {}
    for alpha in alphas:
        alpha = tuple(int(a) for a in alpha)
        if any(a > c.nodes // 2 - 1 for a in alpha):
            raise ValueError("per-coordinate order must stay below nodes/2 - 1")
        out[alpha] = _project(samples, c, alpha)
    return out


def cauchy_derivative_checked(F: EntireModel | Callable, c: PolydiscContour,
                              alpha: Sequence[int]) -> tuple[complex, float]:
    """Value at the configured node count plus the doubled-node discrepancy."""
    v1 = cauchy_derivative(F, c, alpha)
    c2 = PolydiscContour(center=c.center, radius=c.radius, nodes=2 * c.nodes)
    v2 = cauchy_derivative(F, c2, alpha)
    return v2, abs(v2 - v1)


@dataclass(frozen=True)
class BoundValue:
    value: float
    log_value: float
    truncated: bool


def derivative_sup_bound(q_bound: float, m: int, eps: float, alpha: Sequence[int],
                         radius: float, x: Sequence[float], phi: PhiFamily,
                         weight: AssociatedWeight, dim: int) -> BoundValue:
    """alpha! R^{-|alpha|} q * exp(ball max of phi_{m+1} + w(eps sqrt(n) R))."""
    if radius <= 0 or eps <= 0 or q_bound <= 0:
        raise ValueError("radius, eps, q_bound must be positive")
    alpha = tuple(int(a) for a in alpha)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    rad = math.sqrt(dim) * radius
    if phi.is_radial_increasing:
        ball_max = phi.radial(m + 1, float(np.linalg.norm(xv)) + rad)
    else:
        dirs = [np.eye(dim)[j] for j in range(dim)] + [-np.eye(dim)[j] for j in range(dim)]
        dirs.append(np.ones(dim) / math.sqrt(dim))
        norm = np.linalg.norm(xv)
        if norm > 0:
            dirs.append(xv / norm)
        ball_max = max(phi.value(m + 1, xv + f * rad * d)
                       for d in dirs for f in (0.0, 0.25, 0.5, 0.75, 1.0))
    w = eval_w(weight, eps * rad)
    log_val = (math.log(multi_factorial(alpha)) - sum(alpha) * math.log(radius)
               + math.log(q_bound) + ball_max + w.value)
    return BoundValue(value=math.exp(log_val) if log_val < 709.0 else math.inf,
                      log_value=log_val, truncated=w.truncated)


@dataclass(frozen=True)
class ChainConstants:
    """c_m = e t2^2 a_m sqrt(n) and d = b + 3 ln t1 from the bound chain."""

    c_m: float
    d_m_eps: float
    inputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"c_m": self.c_m, "d_m_eps": self.d_m_eps, "inputs": self.inputs}


def chain_constants(m: int, eps: float, a_m: float, t1: float, t2: float,
                    dim: int, b_m_eps: float) -> ChainConstants:
    if a_m < 1.0:
        raise ValueError("a_m must be >= 1 (weight-merge step needs monotonicity)")
    if b_m_eps < 0.0:
        raise ValueError("b must be nonnegative")
    c_m = math.e * t2 * t2 * a_m * math.sqrt(dim)
    d = b_m_eps + 3.0 * math.log(t1)
    return ChainConstants(c_m=c_m, d_m_eps=d, inputs={
        "m": m, "eps": eps, "a_m": a_m, "t1": t1, "t2": t2, "dim": dim, "b": b_m_eps,
    })


@dataclass(frozen=True)
class InfOverR:
    value: float
    log_value: float
    r_star: float


def inf_over_R_bound(dual: DualSequence, weight: AssociatedWeight,
                     c_m: float, eps: float, alpha_abs: int) -> InfOverR:
    """inf_R e^{w(c_m eps R)} / R^N = (c_m eps)^N / K_N, with its minimizer."""
    if not (0 <= alpha_abs < dual.m_max):
        raise IndexError("derivative order outside the stored dual window")
    if alpha_abs == 0:
        return InfOverR(value=1.0, log_value=0.0, r_star=0.0)
    log_val = alpha_abs * math.log(c_m * eps) - dual.log_terms[alpha_abs]
    r_star = optimal_radius(weight, alpha_abs) / (c_m * eps)
    return InfOverR(value=math.exp(log_val), log_value=log_val, r_star=r_star)


def chain_bound_at_R(q_bound: float, constants: ChainConstants, eps: float,
                     weight: AssociatedWeight, alpha: Sequence[int],
                     phi_val_x: float, radius: float) -> BoundValue:
    """The pre-infimum chain bound alpha! R^{-|a|} q e^{phi + w(c_m eps R) + d}."""
    alpha = tuple(int(a) for a in alpha)
    w = eval_w(weight, constants.c_m * eps * radius)
    log_val = (math.log(multi_factorial(alpha)) - sum(alpha) * math.log(radius)
               + math.log(q_bound) + phi_val_x + w.value + constants.d_m_eps)
    return BoundValue(value=math.exp(log_val) if log_val < 709.0 else math.inf,
                      log_value=log_val, truncated=w.truncated)


def restriction_bound(q_bound: float, m: int, eps: float, constants: ChainConstants,
                      dual: DualSequence, weights: WeightSequence,
                      alpha: Sequence[int], phi_val_x: float,
                      log_q_bound: float | None = None) -> BoundValue:
    """Certified bound on |D^alpha f(x)| from a modulus seminorm bound.

    Final form: t1 e^d q (c_m t2 eps)^{|alpha|} M_{|alpha|} e^{phi_m(x)}.
    The sharper intermediate with alpha!/K_{|alpha|} is evaluated as well
    and must not exceed it (that is the factorial-ratio sandwich at work).
    """
    alpha = tuple(int(a) for a in alpha)
    n_abs = sum(alpha)
    if n_abs > weights.k_max or n_abs > dual.m_max:
        raise IndexError("derivative order outside the stored windows")
    log_q = math.log(q_bound) if log_q_bound is None else log_q_bound
    log_final = (dual.ln_t1 + constants.d_m_eps + log_q
                 + n_abs * (math.log(constants.c_m) + dual.ln_t2 + math.log(eps))
                 + weights.log_terms[n_abs] + phi_val_x)
    log_mid = (log_q + constants.d_m_eps + phi_val_x
               + math.log(multi_factorial(alpha)) + n_abs * math.log(constants.c_m * eps)
               - dual.log_terms[n_abs])
    if log_mid > log_final + 1e-9:
        raise AssertionError("sandwich step failed: intermediate bound exceeds final")
    return BoundValue(value=math.exp(log_final) if log_final < 709.0 else math.inf,
                      log_value=log_final, truncated=False)

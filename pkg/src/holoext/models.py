"""Test functions with exact derivative oracles and entire counterparts.

Every built-in model is a coordinate product, so mixed partials factor
into one-dimensional derivatives:

  gaussian   f(x) = exp(-c ||x||^2)         F(z) = exp(-c z.z)
  cosine     f(x) = prod cos(x_j)           F(z) = prod cos(z_j)
  polygauss  f(x) = prod q(x_j) e^{-c x_j^2}, q a fixed polynomial

The gaussian column D^k e^{-c u^2} = A_k(u) e^{-c u^2} follows the
three-term recurrence A_{k+1} = -2c (u A_k + k A_{k-1}); the cosine jet is
a quarter-turn phase; polygauss combines the two through the Leibniz rule.
Derivative order is capped so the raw jet values stay inside float range.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

MAX_ORDER = 60


class OracleDepthError(ValueError):
    """Requested derivative order exceeds the oracle's recurrence cap."""


def _gauss_prefactor_column(order: int, u: float, c: float) -> list[float]:
    """A_k(u) for k = 0..order, where D^k e^{-c u^2} = A_k(u) e^{-c u^2}."""
    col = [1.0]
    if order >= 1:
        col.append(-2.0 * c * u)
    for k in range(1, order):
        col.append(-2.0 * c * (u * col[k] + k * col[k - 1]))
    return col


def gaussian_derivative(alpha: Sequence[int], x: Sequence[float], c: float = 1.0) -> float:
    """Exact D^alpha of exp(-c ||x||^2) at x, via the per-coordinate recurrence."""
    if c <= 0:
        raise ValueError("c must be positive")
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    if sum(alpha) > MAX_ORDER:
        raise OracleDepthError(f"|alpha| = {sum(alpha)} exceeds cap {MAX_ORDER}")
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if xv.shape != (len(alpha),):
        raise ValueError("x must match the multi-index dimension")
    pref = 1.0
    for a, u in zip(alpha, xv):
        pref *= _gauss_prefactor_column(a, float(u), c)[a]
    return pref * math.exp(-c * float(np.dot(xv, xv)))


def _cos_deriv_1d(k: int, u: float) -> float:
    """D^k cos(u) without accumulating phase: quarter-turn lookup."""
    r = k % 4
    if r == 0:
        return math.cos(u)
    if r == 1:
        return -math.sin(u)
    if r == 2:
        return -math.cos(u)
    return math.sin(u)


def _poly_deriv_coeffs(coeffs: tuple[float, ...], j: int) -> tuple[float, ...]:
    """Coefficients (ascending) of the j-th derivative of the polynomial."""
    out = list(coeffs)
    for _ in range(j):
        out = [i * v for i, v in enumerate(out)][1:]
        if not out:
            return (0.0,)
    return tuple(out)


def _polyval(coeffs: Sequence[float], u: float | complex):
    acc = 0.0
    for v in reversed(coeffs):
        acc = acc * u + v
    return acc


def _polygauss_deriv_1d(k: int, u: float, coeffs: tuple[float, ...], c: float) -> float:
    """D^k [q(u) e^{-c u^2}] by Leibniz over the finitely many q^{(j)}."""
    gauss_col = _gauss_prefactor_column(k, u, c)
    deg = len(coeffs) - 1
    acc = 0.0
    for j in range(min(k, deg) + 1):
        qj = _polyval(_poly_deriv_coeffs(coeffs, j), u)
        acc += math.comb(k, j) * qj * gauss_col[k - j]
    return acc * math.exp(-c * u * u)


@dataclass(frozen=True)
class SmoothModel:
    """Smooth test function given by an exact jet oracle."""

    name: str
    dim: int
    max_order: int
    derivative: Callable[[tuple[int, ...], np.ndarray], float]

    def value(self, x: Sequence[float]) -> float:
        return self.derivative(tuple([0] * self.dim), np.atleast_1d(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class EntireModel:
    """Entire counterpart: exact complex evaluation (vectorized when dim = 1)."""

    name: str
    dim: int
    value: Callable[[np.ndarray], complex]
    value_grid: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z) -> complex:
        zv = np.atleast_1d(np.asarray(z, dtype=complex))
        if zv.shape != (self.dim,):
            raise ValueError(f"{self.name} expects dimension {self.dim}")
        return self.value(zv)


@dataclass(frozen=True)
class ModelPair:
    """A smooth model together with its entire extension in closed form."""

    name: str
    dim: int
    params: dict
    smooth: SmoothModel
    entire: EntireModel


def _checked_alpha(alpha: Sequence[int], dim: int, max_order: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dim or any(a < 0 for a in alpha):
        raise ValueError("bad multi-index")
    if sum(alpha) > max_order:
        raise OracleDepthError(f"|alpha| = {sum(alpha)} exceeds cap {max_order}")
    return alpha


def gaussian_model(dim: int = 1, c: float = 1.0) -> ModelPair:
    if c <= 0:
        raise ValueError("c must be positive")

    def deriv(alpha: Sequence[int], x: np.ndarray) -> float:
        alpha = _checked_alpha(alpha, dim, MAX_ORDER)
        return gaussian_derivative(alpha, x, c)

    def entire_value(z: np.ndarray) -> complex:
        return complex(cmath.exp(-c * complex(np.sum(z * z))))

    smooth = SmoothModel(name="gaussian", dim=dim, max_order=MAX_ORDER, derivative=deriv)
    entire = EntireModel(
        name="gaussian", dim=dim, value=entire_value,
        value_grid=(lambda zz: np.exp(-c * zz * zz)) if dim == 1 else None,
    )
    return ModelPair("gaussian", dim, {"c": c}, smooth, entire)


def cosine_model(dim: int = 1) -> ModelPair:
    def deriv(alpha: Sequence[int], x: np.ndarray) -> float:
        alpha = _checked_alpha(alpha, dim, MAX_ORDER)
        out = 1.0
        for a, u in zip(alpha, np.atleast_1d(x)):
            out *= _cos_deriv_1d(a, float(u))
        return out

    def entire_value(z: np.ndarray) -> complex:
        out = complex(1.0)
        for zj in z:
            out *= cmath.cos(complex(zj))
        return out

    smooth = SmoothModel(name="cosine", dim=dim, max_order=MAX_ORDER, derivative=deriv)
    entire = EntireModel(
        name="cosine", dim=dim, value=entire_value,
        value_grid=(lambda zz: np.cos(zz)) if dim == 1 else None,
    )
    return ModelPair("cosine", dim, {}, smooth, entire)


def polygauss_model(dim: int = 1, coeffs: Sequence[float] = (1.0, 0.0, 1.0),
                    c: float = 1.0) -> ModelPair:
    """prod_j q(x_j) e^{-c x_j^2} with q given by ascending coefficients."""
    if c <= 0:
        raise ValueError("c must be positive")
    coeffs = tuple(float(v) for v in coeffs)
    if not any(coeffs):
        raise ValueError("polynomial must be nonzero")

    def deriv(alpha: Sequence[int], x: np.ndarray) -> float:
        alpha = _checked_alpha(alpha, dim, MAX_ORDER)
        out = 1.0
        for a, u in zip(alpha, np.atleast_1d(x)):
            out *= _polygauss_deriv_1d(a, float(u), coeffs, c)
        return out

    def entire_value(z: np.ndarray) -> complex:
        out = complex(1.0)
        for zj in z:
            out *= _polyval(coeffs, complex(zj)) * cmath.exp(-c * complex(zj) ** 2)
        return out

    def grid(zz: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(zz)
        for v in reversed(coeffs):
            acc = acc * zz + v
        return acc * np.exp(-c * zz * zz)

    smooth = SmoothModel(name="polygauss", dim=dim, max_order=MAX_ORDER, derivative=deriv)
    entire = EntireModel(
        name="polygauss", dim=dim, value=entire_value,
        value_grid=grid if dim == 1 else None,
    )
    return ModelPair("polygauss", dim, {"coeffs": coeffs, "c": c}, smooth, entire)


_REGISTRY: dict[str, Callable[..., ModelPair]] = {
    "gaussian": gaussian_model,
    "cosine": cosine_model,
    "polygauss": polygauss_model,
}

MODEL_NAMES = tuple(sorted(_REGISTRY))


def make_model(name: str, dim: int = 1, **params) -> ModelPair:
    if name not in _REGISTRY:
        raise ValueError(f"unknown model {name!r}; built-ins: {', '.join(MODEL_NAMES)}")
    return _REGISTRY[name](dim=dim, **params)

"""Radial weight families and the shift cost of enlarging their index.

The built-in family is phi_m(x) = ||x||^p / m with p > 1.  Two sampled
proxies check the defining growth conditions (superlinear growth in ||x||
and divergence of phi_m - phi_{m+1}), and `shift_bound` measures the
constant b needed for the translation inequality

    phi_{m+1}(x + xi) <= phi_m(x) + w(a_m * delta * R) + b,   ||xi|| <= R,

against a given weight function w.  For the quadratic family the shift
cost obeys the exact envelope phi_{m+1}(x + xi) <= phi_m(x) + R^2, so any
weight function growing faster than r^2 absorbs it with finite b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .weight_function import AssociatedWeight, eval_w


@dataclass
class PhiFamily:
    """A family of continuous weights phi_m : R^n -> R, m = 1, 2, ...

    `evaluator(m, x)` is the general interface; when the family is radial
    and increasing, `radial(m, t)` evaluates at ||x|| = t and closed-form
    ball maxima become available.  `a` holds the declared shift constants:
    a scalar used for every m, or a table indexed by m starting at m = 1.
    """

    name: str
    dim: int
    evaluator: Callable[[int, np.ndarray], float]
    a: float | tuple[float, ...] = 1.0
    p: float | None = None
    radial: Callable[[int, float], float] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        for v in (self.a if isinstance(self.a, tuple) else (self.a,)):
            if v < 1.0:
                raise ValueError("shift constants a_m must be >= 1")

    def a_m(self, m: int) -> float:
        if isinstance(self.a, tuple):
            if not (1 <= m <= len(self.a)):
                raise IndexError(f"no declared a_m for m={m}")
            return self.a[m - 1]
        return self.a

    def value(self, m: int, x: np.ndarray) -> float:
        if m < 1:
            raise ValueError("family index m starts at 1")
        return float(self.evaluator(m, np.asarray(x, dtype=float)))

    @property
    def is_radial_increasing(self) -> bool:
        return self.radial is not None


def power_family(p: float = 2.0, dim: int = 1, a: float | Sequence[float] = 1.0) -> PhiFamily:
    """phi_m(x) = ||x||^p / m.  Superlinear for p > 1; p = 1 is admitted
    so the condition checks have something to reject."""
    if p <= 0:
        raise ValueError("exponent p must be positive")

    def evaluate(m: int, x: np.ndarray) -> float:
        return float(np.linalg.norm(x) ** p) / m

    a_field = tuple(float(v) for v in a) if isinstance(a, (list, tuple)) else float(a)
    return PhiFamily(
        name=f"power(p={p:g})",
        dim=dim,
        evaluator=evaluate,
        a=a_field,
        p=p,
        radial=lambda m, t: (t ** p) / m,
    )


def _probe_directions(dim: int) -> list[np.ndarray]:
    dirs = [np.eye(dim)[j] for j in range(dim)]
    dirs.append(np.ones(dim) / math.sqrt(dim))
    return dirs


@dataclass(frozen=True)
class ConditionReport:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "details": self.details}


_MARGIN = 1e-12


def check_superlinear(phi: PhiFamily, m: int, radii: Sequence[float]) -> ConditionReport:
    """phi_m(r e)/r must increase strictly over the tail half of `radii`."""
    radii = list(radii)
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")
    tails = {}
    passed = True
    for j, d in enumerate(_probe_directions(phi.dim)):
        ratios = [phi.value(m, r * d) / r for r in radii]
        tail = ratios[len(ratios) // 2:]
        ok = all(b > a + _MARGIN for a, b in zip(tail, tail[1:]))
        passed = passed and ok
        tails[f"dir{j}"] = {"ok": ok, "last_ratio": tail[-1]}
    return ConditionReport("superlinear", passed,
                           details={"m": m, "r_max": radii[-1], "directions": tails})


def check_separation(phi: PhiFamily, m: int, radii: Sequence[float],
                     threshold: float = 1.0) -> ConditionReport:
    """phi_m - phi_{m+1} must increase along rays and clear `threshold`."""
    radii = list(radii)
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and increasing")
    passed = True
    tails = {}
    for j, d in enumerate(_probe_directions(phi.dim)):
        diffs = [phi.value(m, r * d) - phi.value(m + 1, r * d) for r in radii]
        tail = diffs[len(diffs) // 2:]
        ok = all(b > a + _MARGIN for a, b in zip(tail, tail[1:])) and tail[-1] > threshold
        passed = passed and ok
        tails[f"dir{j}"] = {"ok": ok, "last_diff": tail[-1]}
    return ConditionReport("separation", passed,
                           details={"m": m, "threshold": threshold, "directions": tails})


@dataclass(frozen=True)
class ShiftBound:
    """Measured constant b for the translation inequality at one (m, delta)."""

    m: int
    delta: float
    a_m: float
    b: float
    diverged: bool
    per_radius_max: tuple[float, ...]
    radii: tuple[float, ...]
    n_truncated: int
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "delta": self.delta,
            "a_m": self.a_m,
            "b": self.b,
            "diverged": self.diverged,
            "n_truncated": self.n_truncated,
            "metadata": self.metadata,
        }


def shift_bound(phi: PhiFamily,
                weight: AssociatedWeight,
                m: int,
                delta: float,
                r_grid: Sequence[float],
                x_grid: Sequence[np.ndarray] | Sequence[float],
                n_random: int = 32,
                seed: int = 0) -> ShiftBound:
    """Sampled max of phi_{m+1}(x+xi) - phi_m(x) - w(a_m delta R), clamped at 0.

    xi ranges over the sphere ||xi|| = R in the axis directions, the main
    diagonal, the ray through x (the exact maximizer for radial increasing
    families), and `n_random` fixed-seed directions.  The report flags
    divergence when the running max still grows at the largest R, which
    certifies that this family/weight pair fails the inequality at this
    delta on the sampled window.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    radii = sorted(float(r) for r in r_grid)
    if not radii or radii[0] <= 0:
        raise ValueError("R grid must be nonempty and positive")
    a_m = phi.a_m(m)
    points = [np.atleast_1d(np.asarray(x, dtype=float)) for x in x_grid]
    if any(pt.shape != (phi.dim,) for pt in points):
        raise ValueError("x grid entries must match the family dimension")

    rng = np.random.default_rng(seed)
    dirs = [np.eye(phi.dim)[j] for j in range(phi.dim)]
    dirs += [-d for d in dirs]
    diag = np.ones(phi.dim) / math.sqrt(phi.dim)
    dirs += [diag, -diag]
    for _ in range(n_random):
        v = rng.normal(size=phi.dim)
        norm = np.linalg.norm(v)
        if norm > 0:
            dirs.append(v / norm)
    # in low dimension the samples collapse onto few distinct directions
    dirs = [np.asarray(d) for d in
            {tuple(np.round(d, 12)) for d in dirs}]
    dirs.sort(key=tuple)

    n_truncated = 0
    per_r = []
    phi_m_vals = [phi.value(m, pt) for pt in points]
    for r in radii:
        w = eval_w(weight, a_m * delta * r)
        if w.truncated:
            n_truncated += 1
        best = -math.inf
        for pt, phi_m_val in zip(points, phi_m_vals):
            local_dirs = dirs
            norm = np.linalg.norm(pt)
            if norm > 0:
                local_dirs = dirs + [pt / norm]
            for d in local_dirs:
                cand = phi.value(m + 1, pt + r * d) - phi_m_val - w.value
                if cand > best:
                    best = cand
        per_r.append(best)

    arg = max(range(len(per_r)), key=lambda i: per_r[i])
    diverged = (
        len(per_r) > 1
        and arg == len(per_r) - 1
        and per_r[-1] > max(per_r[:-1]) + 1e-9
    )
    b = max(0.0, per_r[arg])
    return ShiftBound(
        m=m,
        delta=delta,
        a_m=a_m,
        b=b,
        diverged=diverged,
        per_radius_max=tuple(per_r),
        radii=tuple(radii),
        n_truncated=n_truncated,
        metadata={
            "n_x": len(points),
            "n_R": len(radii),
            "n_directions": len(dirs),
            "seed": seed,
            "arg_R": radii[arg],
        },
    )

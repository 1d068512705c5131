"""Analytic envelope bounds for the built-in models' seminorms.

Grid sweeps can only produce *lower* estimates of a supremum, so every
inequality check in this package pairs a grid estimate on its small side
with one of the closed-form *upper* bounds below on its large side.

Derivative side (gaussian core): the Hermite-type bound

    |D^k e^{-c u^2}| <= 1.09 (2c)^{k/2} sqrt(k!) e^{-c u^2 / 2}

turns the derivative seminorm of each built-in into a one-dimensional
maximum over the derivative order, evaluated in the log domain.  The scan
runs past the stored sequence window using the sequence's generating
formula, so the maximum is never clipped at the window edge.

Modulus side: |F(z)| factors into an x-part bounded by a constant (the
radial weights are nonnegative and vanish at 0) and a y-part of the form
sup_y e^{a y^2 - w(eps y)} or sup_y e^{a y - w(eps y)}.  Between
consecutive slope breakpoints of the weight function those exponents are
convex in y, so the supremum over all y > 0 is a maximum over the
breakpoint sequence, scanned via the generating formula until the
candidates fall 60 nats below the running best.  Polynomial prefactors
are absorbed by y^i <= (i/(2ce))^{i/2} e^{c y^2} before the scan, keeping
the piecewise exponents convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .phi_families import PhiFamily
from .sequences import SequenceSpec, WeightSequence

#: valid upper bound for the sharp constant (~1.0865) in the Hermite inequality
CRAMER_K = 1.09

_SCAN_PATIENCE = 64
_SCAN_CAP = 2_000_000
_DROP_NATS = 60.0


class EnvelopeError(ValueError):
    """The envelope diverges or cannot be certified from the stored window."""


class _LGammaFactorials:
    """Lazy ln k! lookup for formula scans past the stored window."""

    def __getitem__(self, k: int) -> float:
        return math.lgamma(k + 1)


_LGAMMA = _LGammaFactorials()


@dataclass(frozen=True)
class Envelope:
    """A certified upper bound, kept in the log domain to dodge overflow."""

    log_value: float
    arg_index: int

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 709.0 else math.inf


def _log_m(seq: WeightSequence, k: int) -> float:
    """ln M_k, following the generating formula past the stored window."""
    if k <= seq.k_max:
        return seq.log_terms[k]
    if seq.spec is None or not seq.spec.extendable:
        raise EnvelopeError(
            "envelope scan left the stored window of an explicit sequence; "
            "enlarge k_max or use a named sequence")
    return seq.spec.log_term(k, _LGAMMA)


def _probe_tail(term, env: Envelope, what: str) -> Envelope:
    """Reject dip-then-rise terms: the claimed max must dominate the far tail."""
    for step in (32, 1024, 32768, 1048576):
        try:
            if term(env.arg_index + step) > env.log_value + 1e-9:
                raise EnvelopeError(f"{what}: envelope rises again past the "
                                    "located maximum (diverges)")
        except (OverflowError, IndexError):
            break
    return env


def _scan_max_concave(term, what: str, warm: int = 32) -> Envelope:
    """Max of a log-term whose increments decrease beyond a warm-up region.

    The warm-up is exhausted directly; past it, doubling plus bisection on
    the increment sign finds the crest in logarithmic time, which matters
    because the argmax can sit at k ~ 1e6 for narrow certification widths.
    A far-tail probe rejects terms that dip and rise again.
    """
    def delta(k: int) -> float:
        return term(k + 1) - term(k)

    best, arg = -math.inf, 0
    for k in range(warm + 1):
        v = term(k)
        if v > best:
            best, arg = v, k

    if delta(warm) > 0.0:
        lo, hi = warm, 2 * max(warm, 1)
        while delta(hi) > 0.0:
            hi *= 2
            if hi > 2 ** 41:
                raise EnvelopeError(f"{what}: no interior maximum (envelope diverges)")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if delta(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        # crest at lo + 1 up to ulp wobble
        for k in (lo, lo + 1, lo + 2):
            v = term(k)
            if v > best:
                best, arg = v, k
    return _probe_tail(term, Envelope(log_value=best, arg_index=arg), what)


def _require_anchored_phi(phi: PhiFamily, m: int) -> None:
    # bounds below drop e^{-phi} using phi >= 0 with phi(0) = 0
    if not phi.is_radial_increasing or phi.radial(m, 0.0) != 0.0:
        raise EnvelopeError("analytic envelopes need a radial increasing "
                            "family vanishing at the origin")


def _monomial_peak(i: int, a: float) -> float:
    """sup_t t^i e^{-a t^2} = (i/(2 a e))^{i/2} (1 for i = 0)."""
    return 1.0 if i == 0 else (i / (2.0 * a * math.e)) ** (0.5 * i)


def p_upper(pair, seq: WeightSequence, phi: PhiFamily, m: int, eps: float) -> Envelope:
    """Upper bound for the derivative seminorm of a built-in model."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_anchored_phi(phi, m)
    dim = pair.dim
    ln_eps = math.log(eps)
    name = pair.name

    if name == "gaussian":
        c = pair.params["c"]
        ln2c = math.log(2.0 * c)

        def term(k: int) -> float:
            return 0.5 * k * ln2c - k * ln_eps + 0.5 * math.lgamma(k + 1) - _log_m(seq, k)

        env = _scan_max_concave(term, "gaussian derivative envelope")
        return Envelope(env.log_value + dim * math.log(CRAMER_K), env.arg_index)

    if name == "cosine":
        def term(k: int) -> float:
            return -k * ln_eps - _log_m(seq, k)

        return _scan_max_concave(term, "cosine derivative envelope")

    if name == "polygauss":
        c = pair.params["c"]
        coeffs = pair.params["coeffs"]
        ln2c = math.log(2.0 * c)
        # B_j >= sup_u |q^(j)(u)| e^{-c u^2 / 2}, coefficient by coefficient
        from .models import _poly_deriv_coeffs  # shared polynomial helper
        deg = len(coeffs) - 1
        b = []
        for j in range(deg + 1):
            dcoef = _poly_deriv_coeffs(tuple(coeffs), j)
            total = 0.0
            for i, v in enumerate(dcoef):
                total += abs(v) * _monomial_peak(i, 0.5 * c)
            b.append(total)

        # sum_j B_j k^j (2c)^{-j/2}/j! bounds the Leibniz overhead; majorize
        # it by C max(1,k)^deg to keep the scan term concave past warm-up
        ln_c_major = math.log(sum(bj * (2.0 * c) ** (-0.5 * j) / math.factorial(j)
                                  for j, bj in enumerate(b)))

        def term(k: int) -> float:
            return (0.5 * k * ln2c - k * ln_eps + 0.5 * math.lgamma(k + 1)
                    - _log_m(seq, k)
                    + dim * (ln_c_major + deg * math.log(max(1.0, k))))

        env = _scan_max_concave(term, "polygauss derivative envelope")
        return Envelope(env.log_value + dim * math.log(CRAMER_K), env.arg_index)

    raise EnvelopeError(f"no derivative envelope for model {name!r}")


def _dual_slope(spec: SequenceSpec, m: int) -> float:
    """Exact slope ln K_m - ln K_{m-1} of the factorial-ratio minorant."""
    if spec.kind == "gevrey":
        return (1.0 - spec.s) * math.log(m)
    if spec.kind == "geometric-gevrey":
        return (1.0 - spec.s) * math.log(m) - math.log(spec.c)
    raise EnvelopeError("modulus envelope needs a named sequence "
                        "(the weight function must extend past the window)")


def _breakpoint_max(spec: SequenceSpec, eps: float, g, what: str) -> Envelope:
    """sup_{y >= 0} [g(y) - w(eps y)] over the exact weight function.

    g must make the exponent convex between breakpoints (true for the
    linear and quadratic g used here), so the supremum is a max over the
    breakpoints y_m = e^{slope(m)}/eps together with the y -> 0 limit.
    """
    def h_at(m: int) -> float:
        # closed-form ln K_m for the far-tail probes
        if spec.kind == "gevrey":
            log_k = (1.0 - spec.s) * math.lgamma(m + 1)
        else:
            log_k = (1.0 - spec.s) * math.lgamma(m + 1) - m * math.log(spec.c)
        slope = _dual_slope(spec, m)
        y = math.exp(slope) / eps
        return g(y) - (m * slope - log_k)

    best, arg = g(0.0), 0
    log_k = 0.0
    m = 1
    while m <= _SCAN_CAP:
        slope = _dual_slope(spec, m)
        log_k += slope
        y = math.exp(slope) / eps
        w = m * slope - log_k
        h = g(y) - w
        if h > best:
            best, arg = h, m
        elif h < best - _DROP_NATS and m >= 16:
            for step in (64, 4096, 262144):
                if h_at(m + step) > best + 1e-9:
                    raise EnvelopeError(f"{what}: envelope rises again past the "
                                        "located maximum (diverges)")
            return Envelope(log_value=best, arg_index=arg)
        m += 1
    raise EnvelopeError(f"{what}: modulus envelope diverges "
                        "(the model is outside the target space here)")


def q_upper(pair, seq: WeightSequence, phi: PhiFamily, m: int, eps: float) -> Envelope:
    """Upper bound for the modulus seminorm of a built-in entire model."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_anchored_phi(phi, m)
    if seq.spec is None:
        raise EnvelopeError("modulus envelope needs the sequence spec")
    dim = pair.dim
    name = pair.name

    if name == "gaussian":
        c = pair.params["c"]
        return _breakpoint_max(seq.spec, eps, lambda y: c * y * y,
                               "gaussian modulus envelope")

    if name == "cosine":
        root = math.sqrt(dim)
        return _breakpoint_max(seq.spec, eps, lambda y: root * y,
                               "cosine modulus envelope")

    if name == "polygauss":
        if dim != 1:
            raise EnvelopeError("polygauss modulus envelope is one-dimensional")
        c = pair.params["c"]
        coeffs = pair.params["coeffs"]
        # |q(z)| <= q_abs(|x|+|y|) <= q_abs(2|x|) + q_abs(2|y|); the x sum
        # folds into a constant, the y sum into monomial peaks at a gentle
        # growth surcharge:  q_abs(2y) e^{c y^2} <= A_y e^{(1+s) c y^2}
        surcharge = 0.25
        a_x, a_y = 0.0, 0.0
        for i, v in enumerate(coeffs):
            a_x += abs(v) * (2.0 ** i) * _monomial_peak(i, c)
            a_y += abs(v) * (2.0 ** i) * _monomial_peak(i, surcharge * c)
        env1 = _breakpoint_max(seq.spec, eps, lambda y: c * y * y,
                               "polygauss modulus envelope")
        env2 = _breakpoint_max(seq.spec, eps,
                               lambda y: (1.0 + surcharge) * c * y * y,
                               "polygauss modulus envelope")
        t1 = math.log(a_x) + env1.log_value
        t2 = math.log(a_y) + env2.log_value
        hi = max(t1, t2)
        return Envelope(log_value=hi + math.log(math.exp(t1 - hi) + math.exp(t2 - hi)),
                        arg_index=env2.arg_index)

    raise EnvelopeError(f"no modulus envelope for model {name!r}")

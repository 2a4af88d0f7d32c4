"""Arbitrary-precision numeric core shared by every other module.

Everything here runs on mpmath ``mpf``/``mpc`` values.  The working precision
is the ambient ``mpmath.mp.prec`` (binary mantissa bits) unless an operation
takes an explicit :class:`PrecisionPolicy`; callers that need a specific
precision wrap calls in ``mpmath.workprec(bits)``.

Provided here:

* :class:`PrecisionPolicy` - bits / escalation knobs for sign certification.
* :class:`QuadratureSpec` and :func:`integrate` - double-exponential
  (tanh-sinh, with a sinh-type map for semi-infinite ranges) and composite
  Gauss-Legendre rules, with inter-level error estimation.  Node tables are
  cached per precision, so repeated integrals at one precision are cheap.
* :class:`CachedKernelQuadrature` - evaluates many integrals
  ``int_a^b K(x) g(x) dx`` that share an expensive kernel ``K``; the kernel
  values at the quadrature nodes are computed once.
* :func:`binomial` - exact integer binomial coefficients.
* :func:`certify_sign` - sign certification by agreement at two consecutive
  precision levels, escalating up to ``max_bits`` before giving up with
  ``zero-uncertain``.  This is deliberately not interval arithmetic: two
  matching signs whose magnitude dominates the cross-precision discrepancy
  by a factor >= 8 are accepted as certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

from mpmath import mp, mpf, mpc, workprec
import mpmath

__all__ = [
    "AccuracyError",
    "CachedKernelQuadrature",
    "CertifiedSign",
    "ConsistencyError",
    "DomainError",
    "NEGATIVE",
    "POSITIVE",
    "PrecisionPolicy",
    "QuadratureSpec",
    "UNCERTAIN",
    "binomial",
    "bisect_sign_change",
    "certify_sign",
    "comp_sum",
    "decimal_str",
    "integrate",
    "integrate_with_error",
    "require_finite",
    "to_mpc",
    "to_mpf",
]

Number = Union[int, float, str, Fraction, mpf]


class DomainError(ValueError):
    """An argument violates a documented mathematical precondition."""


class AccuracyError(ArithmeticError):
    """A numeric routine could not reach the requested accuracy.

    Carries the best estimate it had, so callers can decide whether the
    partial answer is still useful.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class ConsistencyError(ArithmeticError):
    """An internal identity that should hold analytically failed numerically."""


def to_mpf(x: Number) -> mpf:
    """Convert to mpf at the ambient precision; Fractions divide exactly once."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def to_mpc(x) -> mpc:
    if isinstance(x, Fraction):
        return mpc(to_mpf(x))
    return mpc(x)


def require_finite(x, what: str = "value"):
    """Raise ConsistencyError if x is NaN or infinite; return x otherwise."""
    if isinstance(x, mpc):
        require_finite(x.real, what)
        require_finite(x.imag, what)
        return x
    if mpmath.isnan(x) or mpmath.isinf(x):
        raise ConsistencyError(f"non-finite {what}: {x}")
    return x


def decimal_str(x, bits: Optional[int] = None) -> str:
    """Full-precision decimal string for a real value.

    Reports must round-trip the working precision, so the digit count is
    derived from ``bits`` (default: the ambient precision).
    """
    if bits is None:
        bits = mp.prec
    digits = int(bits / 3.3219280948873626) + 3
    return mpmath.nstr(mpf(x), digits)


def comp_sum(terms) -> mpf:
    """Neumaier-compensated sum, in iteration order."""
    s = mpf(0)
    c = mpf(0)
    for t in terms:
        tot = s + t
        if abs(s) >= abs(t):
            c += (s - tot) + t
        else:
            c += (t - tot) + s
        s = tot
    return s + c


# ---------------------------------------------------------------------------
# Exact binomials

def binomial(k: int, j: int) -> int:
    """Exact binomial coefficient C(k, j) for 0 <= j <= k."""
    if k < 0:
        raise DomainError(f"binomial: k must be >= 0, got {k}")
    if j < 0 or j > k:
        raise DomainError(f"binomial: j must be in [0, {k}], got {j}")
    return math.comb(k, j)


# ---------------------------------------------------------------------------
# Sign certification

POSITIVE = "positive"
NEGATIVE = "negative"
UNCERTAIN = "zero-uncertain"

#: |value| must exceed the cross-precision discrepancy by this factor.
SIGN_MARGIN = 8


@dataclass(frozen=True)
class PrecisionPolicy:
    """Mantissa-bit budget for certified computations."""

    bits: int = 256
    escalation_factor: int = 2
    max_bits: int = 4096

    def __post_init__(self):
        if self.bits <= 0:
            raise DomainError("PrecisionPolicy.bits must be positive")
        if self.escalation_factor < 2:
            raise DomainError("PrecisionPolicy.escalation_factor must be >= 2")
        if self.bits > self.max_bits:
            raise DomainError("PrecisionPolicy.bits must not exceed max_bits")

    def stages(self):
        """Yield (low, high) precision pairs, escalating up to max_bits."""
        lo = self.bits
        while lo < self.max_bits:
            hi = min(lo * self.escalation_factor, self.max_bits)
            yield lo, hi
            lo = hi


@dataclass(frozen=True)
class CertifiedSign:
    value: mpf
    sign: str
    bits_used: int

    @property
    def is_positive(self) -> bool:
        return self.sign == POSITIVE

    @property
    def is_negative(self) -> bool:
        return self.sign == NEGATIVE

    @property
    def is_nonnegative(self) -> bool:
        # an uncertain cell is not a certified violation, but it is not
        # certified nonnegative either
        return self.sign == POSITIVE


def certify_sign(computation: Callable[[], Number],
                 policy: PrecisionPolicy = PrecisionPolicy()) -> CertifiedSign:
    """Certify the sign of a re-runnable computation.

    ``computation`` is evaluated under two consecutive precision levels; the
    sign is certified only if both runs agree and the magnitude dominates
    their discrepancy by a factor >= 8.  Otherwise the precision ladder is
    escalated; running out of budget returns ``zero-uncertain``, which is a
    valid result, never an error.
    """
    value = None
    bits_used = policy.bits
    for lo, hi in policy.stages():
        with workprec(lo):
            v_lo = to_mpf(computation())
        with workprec(hi):
            v_hi = to_mpf(computation())
            require_finite(v_hi, "certified computation")
            disc = abs(v_hi - v_lo)
            value, bits_used = v_hi, hi
            if v_lo > 0 and v_hi > 0 and abs(v_hi) >= SIGN_MARGIN * disc:
                return CertifiedSign(v_hi, POSITIVE, hi)
            if v_lo < 0 and v_hi < 0 and abs(v_hi) >= SIGN_MARGIN * disc:
                return CertifiedSign(v_hi, NEGATIVE, hi)
    if value is None:  # bits == max_bits: no pair available, single run
        with workprec(policy.bits):
            value = to_mpf(computation())
        bits_used = policy.bits
    return CertifiedSign(value, UNCERTAIN, bits_used)


# ---------------------------------------------------------------------------
# Quadrature

TANH_SINH = "tanh-sinh"
GAUSS_LEGENDRE = "gauss-legendre-composite"

#: extra working bits inside quadrature loops
_QUAD_GUARD = 32


@dataclass(frozen=True)
class QuadratureSpec:
    """Scheme selection and accuracy contract for :func:`integrate`.

    ``target_abs_error = None`` resolves to ``2^-(prec-16)`` at call time.
    """

    scheme: str = TANH_SINH
    target_abs_error: Optional[Number] = None
    max_levels: int = 12

    def __post_init__(self):
        if self.scheme not in (TANH_SINH, GAUSS_LEGENDRE):
            raise DomainError(f"unknown quadrature scheme: {self.scheme!r}")
        if self.target_abs_error is not None and to_mpf(self.target_abs_error) <= 0:
            raise DomainError("target_abs_error must be > 0")
        if self.max_levels < 2:
            raise DomainError("max_levels must be >= 2")

    def resolved_target(self, prec: int) -> mpf:
        if self.target_abs_error is None:
            return mpf(2) ** (-(prec - 16))
        return to_mpf(self.target_abs_error)


# node tables, keyed by working precision so escalated reruns do not collide
_ts_cache: dict = {}
_es_cache: dict = {}
_gl_cache: dict = {}


def _ts_tmax(prec: int) -> mpf:
    # weights decay like exp(-(pi/2)e^t); one extra unit of t is cheap margin
    return mpf(math.log(2 * (prec + 16) * math.log(2) / math.pi) + 1.0)


def _tanh_sinh_nodes(prec: int, level: int):
    """New (delta, weight) pairs introduced at ``level`` for t > 0.

    ``delta = 1 - x`` keeps full relative accuracy near the endpoint; the
    abscissa on [-1, 1] is ``+-(1 - delta)``.  Level 0 also contains the
    t = 0 node, reported separately by :func:`_tanh_sinh_center`.
    """
    key = (prec, level)
    if key in _ts_cache:
        return _ts_cache[key]
    with workprec(prec + 2 * _QUAD_GUARD):
        tmax = _ts_tmax(prec)
        h = mpf(2) ** (-level)
        pairs = []
        k = 1
        while True:
            t = k * h
            if t > tmax:
                break
            v = mpmath.pi / 2 * mpmath.sinh(t)
            e2v = mpmath.exp(2 * v)
            delta = 2 / (e2v + 1)  # = 1 - tanh(v)
            w = mpmath.pi / 2 * mpmath.cosh(t) * 4 / (e2v + 2 + 1 / e2v)
            pairs.append((delta, w))
            k += 2 if level > 0 else 1
    _ts_cache[key] = pairs
    return pairs


def _exp_sinh_nodes(prec: int, level: int):
    """New (offset, weight) pairs for the sinh-mapped half line at ``level``.

    The abscissa on [a, inf) is ``a + offset`` with
    ``offset = exp((pi/2) sinh t)``; nodes are ordered by increasing t over
    the whole (negative and positive) range introduced at this level.
    """
    key = (prec, level)
    if key in _es_cache:
        return _es_cache[key]
    with workprec(prec + 2 * _QUAD_GUARD):
        tmax = _ts_tmax(prec) + mpf("0.7")  # exp-sinh decays about half as fast
        h = mpf(2) ** (-level)
        ks = []
        k = 1
        while k * h <= tmax:
            ks.append(k)
            k += 2 if level > 0 else 1
        pairs = []
        for k in [-k for k in reversed(ks)] + ([0] if level == 0 else []) + ks:
            t = k * h
            x = mpmath.exp(mpmath.pi / 2 * mpmath.sinh(t))
            w = mpmath.pi / 2 * mpmath.cosh(t) * x
            pairs.append((x, w))
    _es_cache[key] = pairs
    return pairs


def _legendre_nodes(prec: int, n: int):
    """Gauss-Legendre nodes/weights on [-1, 1], Newton-refined at precision."""
    key = (prec, n)
    if key in _gl_cache:
        return _gl_cache[key]
    with workprec(prec + 2 * _QUAD_GUARD):
        tol = mpf(2) ** (-(prec + _QUAD_GUARD))
        nodes = []
        for i in range(1, n // 2 + 2):
            if 2 * i > n + 1:
                break
            x = mpf(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < tol:
                    break
            p0, p1 = mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x, w))
    _gl_cache[key] = nodes
    return nodes


def _normalize_interval(interval) -> Tuple[mpf, Optional[mpf]]:
    try:
        a, b = interval
    except (TypeError, ValueError):
        raise DomainError(f"interval must be a pair (a, b), got {interval!r}")
    a = to_mpf(a)
    if b == mpmath.inf:
        return a, None
    b = to_mpf(b)
    if not b > a:
        raise DomainError(f"interval must satisfy a < b, got ({a}, {b})")
    return a, b


def _ts_level_sum(f, a, b, prec, level):
    """Sum of w*f over the tanh-sinh nodes new at ``level`` on [a, b]."""
    half = (b - a) / 2
    mid = (a + b) / 2
    s = mpf(0)
    if level == 0:
        s += f(mid)  # t = 0 node, weight pi/2
        s *= mpmath.pi / 2
    for delta, w in _tanh_sinh_nodes(prec, level):
        d = half * delta
        s += w * (f(a + d) + f(b - d))
    return s * half


def _es_level_sum(f, a, prec, level, tail_tol):
    """Trapezoid contribution of the new exp-sinh nodes at ``level``.

    Sweeps nodes in increasing t and abandons the divergent (large-x) side
    once two consecutive products |w * f| fall below ``tail_tol``; the
    integrand is assumed to decay (precondition of the semi-infinite form).
    """
    s = mpf(0)
    small = 0
    for x, w in _exp_sinh_nodes(prec, level):
        t = w * f(a + x)
        s += t
        if x > 1:
            if abs(t) < tail_tol:
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
    return s


def _integrate_tanh_sinh(f, a, b, spec, prec):
    target = spec.resolved_target(prec)
    with workprec(prec + _QUAD_GUARD):
        semi = b is None
        tail_tol = target / 16
        best = None
        err = mpf("inf")
        for level in range(spec.max_levels + 1):
            h = mpf(2) ** (-level)
            if semi:
                new = _es_level_sum(f, a, prec, level, tail_tol)
            else:
                new = _ts_level_sum(f, a, b, prec, level)
            s = new * h if best is None else best / 2 + new * h
            if best is not None:
                err = abs(s - best)
                if err <= target and level >= 2:
                    return +s, +err
            best = s
    raise AccuracyError(
        f"tanh-sinh did not reach target {mpmath.nstr(target, 5)} within "
        f"{spec.max_levels} levels (last inter-level difference "
        f"{mpmath.nstr(err, 5)})",
        best_estimate=+best, error_estimate=+err)


def _integrate_gauss(f, a, b, spec, prec):
    target = spec.resolved_target(prec)
    with workprec(prec + _QUAD_GUARD):
        if b is None:
            # algebraic map u -> a + u/(1-u) onto [a, inf)
            g, origin = f, a
            f = lambda u: g(origin + u / (1 - u)) / (1 - u) ** 2
            a, b = mpf(0), mpf(1)
        n = max(24, prec // 2 + 8)
        nodes = _legendre_nodes(prec, n)
        best = None
        err = mpf("inf")
        for level in range(spec.max_levels + 1):
            panels = 2 ** level
            width = (b - a) / panels
            s = mpf(0)
            for p in range(panels):
                mid = a + width * (2 * p + 1) / 2
                half = width / 2
                for x, w in nodes:
                    s += w * f(mid + half * x)
                    if x != 0:
                        s += w * f(mid - half * x)
            s *= width / 2
            if best is not None:
                err = abs(s - best)
                if err <= target:
                    return +s, +err
            best = s
    raise AccuracyError(
        f"composite Gauss-Legendre did not reach target "
        f"{mpmath.nstr(target, 5)} within {spec.max_levels} doublings",
        best_estimate=+best, error_estimate=+err)


def integrate_with_error(f, interval, spec: Optional[QuadratureSpec] = None):
    """Integrate ``f`` over ``interval``; return (value, error_estimate).

    ``interval`` is a pair (a, b); b may be ``mpmath.inf``.  The error
    estimate is the last inter-level difference, a conservative proxy for
    the true error of the double-exponential rule.  Raises
    :class:`AccuracyError` (carrying the best estimate) if ``max_levels``
    is exhausted before the target is met.
    """
    if spec is None:
        spec = QuadratureSpec()
    a, b = _normalize_interval(interval)
    prec = mp.prec
    if spec.scheme == TANH_SINH:
        value, err = _integrate_tanh_sinh(f, a, b, spec, prec)
    else:
        value, err = _integrate_gauss(f, a, b, spec, prec)
    return require_finite(+value, "integral"), +err


def integrate(f, interval, spec: Optional[QuadratureSpec] = None) -> mpf:
    """Integrate ``f`` over ``interval`` to ``spec.target_abs_error``."""
    value, _ = integrate_with_error(f, interval, spec)
    return value


class CachedKernelQuadrature:
    """Many integrals ``int_a^b K(x) g(x) dx`` sharing one kernel ``K``.

    Kernel values at the tanh-sinh nodes are computed lazily, once per level,
    and reused for every ``g``.  This is the workhorse behind Taylor
    coefficient batches and zero bracketing, where the kernel (a theta-type
    series) is far more expensive than the polynomial or oscillatory factor.
    """

    def __init__(self, kernel, a, b, prec: Optional[int] = None,
                 max_levels: int = 12):
        self.a = to_mpf(a)
        self.b = to_mpf(b)
        if not self.b > self.a:
            raise DomainError("CachedKernelQuadrature needs a < b")
        self.prec = prec if prec is not None else mp.prec
        self.max_levels = max_levels
        self._kernel = kernel
        self._levels = []  # level -> list of (x, K(x)*w*half)

    def _ensure_level(self, level: int):
        with workprec(self.prec + _QUAD_GUARD):
            half = (self.b - self.a) / 2
            mid = (self.a + self.b) / 2
            while len(self._levels) <= level:
                lv = len(self._levels)
                entries = []
                if lv == 0:
                    entries.append((mid, mpmath.pi / 2 * self._kernel(mid) * half))
                for delta, w in _tanh_sinh_nodes(self.prec, lv):
                    d = half * delta
                    for x in (self.a + d, self.b - d):
                        entries.append((x, w * self._kernel(x) * half))
                self._levels.append(entries)

    def integrate(self, g, target=None):
        """Return (value, err) for ``int K(x) g(x) dx`` at the cached nodes."""
        result = None
        with workprec(self.prec + _QUAD_GUARD):
            if target is None:
                target = mpf(2) ** (-(self.prec - 16))
            else:
                target = to_mpf(target)
            best = None
            err = mpf("inf")
            for level in range(self.max_levels + 1):
                self._ensure_level(level)
                h = mpf(2) ** (-level)
                new = mpmath.fsum(kw * g(x) for x, kw in self._levels[level])
                s = new * h if best is None else best / 2 + new * h
                if best is not None:
                    err = abs(s - best)
                    if err <= target and level >= 2:
                        result = (s, err)
                        break
                best = s
        if result is None:
            raise AccuracyError(
                "cached-kernel quadrature did not converge "
                f"(last difference {mpmath.nstr(err, 5)})",
                best_estimate=best, error_estimate=err)
        with workprec(self.prec):
            return +result[0], +result[1]


# ---------------------------------------------------------------------------
# Root refinement

def bisect_sign_change(f, lo, hi, f_lo=None, f_hi=None, width=None):
    """Shrink a sign-change bracket [lo, hi] of ``f`` to ``width`` by bisection.

    Returns (lo, hi, f_lo, f_hi) with f(lo)*f(hi) < 0 preserved.  A midpoint
    evaluating to exactly zero narrows to a bracket of that width around it.
    """
    lo, hi = to_mpf(lo), to_mpf(hi)
    if width is None:
        width = mpf(2) ** (-(mp.prec // 2))
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if not f_lo * f_hi < 0:
        raise DomainError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > width:
        mid = (lo + hi) / 2
        f_mid = f(mid)
        if f_mid == 0:
            eps = (hi - lo) / 4
            lo, hi = mid - eps, mid + eps
            f_lo, f_hi = f(lo), f(hi)
            continue
        if f_lo * f_mid < 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return lo, hi, f_lo, f_hi

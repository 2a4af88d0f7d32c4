"""The completed-zeta instantiation of the moment criterion.

The even entire function xi(1/2 + s) = sum a_n s^(2n) has the kernel
representation

    a_n = (2/(2n)!) * int_0^inf Phi(u) u^(2n) du,
    Phi(u) = sum_(n>=1) (4 n^4 pi^2 e^(9u/2) - 6 n^2 pi e^(5u/2))
             * exp(-n^2 pi e^(2u)) > 0,

and Xi(s) = xi(1/2 + is) = 2 int_0^inf Phi(u) cos(us) du.  Because Phi
decays doubly exponentially, both integrals are truncated at a closed-form
u_max where the integrand drops below the working epsilon, and all of them
share the Phi values at the quadrature nodes (one kernel build serves every
coefficient and every Xi evaluation at a given precision).

Substituting z = -s^2 turns Xi into an entire function of z with positive
coefficients a_n/a_0 whose zeros are -s_rho^2 over the Xi zeros s_rho, so
the general moment machinery applies with

    m_k = sum_rho s_rho^(-(2k+4)),

computed from the coefficients by the recursion and checked against the
determinant path and against truncated sums over bracketed zeros.  The
scaled grid criterion then needs L > s_1^(-2), with s_1 ~= 14.1347 the
lowest zero, located here by scanning Xi for sign changes and bisecting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from mpmath import mp, mpf, workprec
import mpmath

from .moments import (
    MomentSequence,
    PositivityGrid,
    SeriesPrefix,
    build_grid,
    moments_by_determinant,
    moments_by_recursion,
    normalize,
)
from .numkernel import (
    AccuracyError,
    CachedKernelQuadrature,
    ConsistencyError,
    DomainError,
    PrecisionPolicy,
    QuadratureSpec,
    bisect_sign_change,
    decimal_str,
    require_finite,
    to_mpf,
)
from .oracle import save_zeros

__all__ = [
    "XiCoefficients",
    "XiPipelineResult",
    "ZeroBracket",
    "auto_scale",
    "bracket_zeros",
    "export_brackets",
    "phi",
    "rh_moment_pipeline",
    "xi_coeff",
    "xi_coefficients",
    "xi_eval",
    "zero_sum_tail_bound",
]


def phi(u, n_terms: int = 100000) -> mpf:
    """The positive kernel Phi(u), summed until the tail is negligible.

    Phi is even, so the argument is reduced to |u|.  Terms are positive and
    decreasing for u >= 0; summation stops once the next term falls below
    2^-(prec+8) of the partial sum.  Exhausting ``n_terms`` first raises
    :class:`AccuracyError`; a nonpositive result (impossible analytically)
    raises :class:`ConsistencyError`.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    u = abs(to_mpf(u))
    g9 = mpmath.exp(mpf(9) * u / 2)
    g5 = mpmath.exp(mpf(5) * u / 2)
    pi = mpmath.pi
    b = pi * mpmath.exp(2 * u)
    # e^(-n^2 b) by the two-multiplication recurrence, not one exp per term
    p = mpmath.exp(-b)
    ratio = p * p
    q = p * ratio  # e^(-(2n+1) b) at n = 1
    stop = mpf(2) ** (-(mp.prec + 8))
    s = mpf(0)
    for n in range(1, n_terms + 1):
        n2 = n * n
        term = (4 * n2 * n2 * pi * pi * g9 - 6 * n2 * pi * g5) * p
        s += term
        if term < stop * s:
            if not s > 0:
                raise ConsistencyError(f"Phi({u}) evaluated nonpositive: {s}")
            return s
        p *= q
        q *= ratio
    raise AccuracyError(
        f"Phi series did not converge within {n_terms} terms at u = {u}",
        best_estimate=s)


def _u_max(prec: int, n: int) -> mpf:
    """Truncation point: integrand of a_n below working epsilon beyond it.

    Smallest u (on a quarter-unit grid) with
    pi*e^(2u) - (9/2 + 2n) u > prec*ln2 + 16; the doubly exponential decay
    of Phi makes the remaining tail irrelevant at prec bits.
    """
    goal = prec * math.log(2) + 16
    u = 1.0
    while math.pi * math.exp(2 * u) - (4.5 + 2 * n) * u <= goal:
        u += 0.25
    return mpf(u)


_kernel_cache: dict = {}


def _phi_kernel(u_max: mpf, prec: int) -> CachedKernelQuadrature:
    key = (prec, str(u_max))
    if key not in _kernel_cache:
        _kernel_cache[key] = CachedKernelQuadrature(phi, 0, u_max, prec=prec)
    return _kernel_cache[key]


@dataclass(frozen=True)
class XiCoefficients:
    """Computed a_0..a_N with per-coefficient quadrature error estimates."""

    a: Tuple[mpf, ...]
    quadrature_error: Tuple[mpf, ...]

    def __post_init__(self):
        for n, v in enumerate(self.a):
            if not v > 0:
                raise ConsistencyError(f"a_{n} evaluated nonpositive: {v}")

    @property
    def max_index(self) -> int:
        return len(self.a) - 1


def xi_coefficients(N: int, spec: Optional[QuadratureSpec] = None) -> XiCoefficients:
    """Taylor coefficients a_0..a_N of xi(1/2 + s) in s^2, by quadrature.

    All coefficients share one cached Phi kernel on [0, u_max(N)]; the
    moment integrals differ only in the polynomial factor u^(2n).
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    if spec is None:
        spec = QuadratureSpec()
    prec = mp.prec
    target = spec.resolved_target(prec)
    kernel = _phi_kernel(_u_max(prec, N), prec)
    a: List[mpf] = []
    errs: List[mpf] = []
    for n in range(N + 1):
        fac = 2 / mpf(mpmath.factorial(2 * n))
        if n == 0:
            value, err = kernel.integrate(lambda u: mpf(1), target)
        else:
            value, err = kernel.integrate(lambda u, n=n: u ** (2 * n), target)
        a.append(fac * value)
        errs.append(fac * err)
    return XiCoefficients(tuple(a), tuple(errs))


def xi_coeff(n: int, spec: Optional[QuadratureSpec] = None) -> mpf:
    """Single coefficient a_n; see :func:`xi_coefficients` for batches."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if spec is None:
        spec = QuadratureSpec()
    prec = mp.prec
    kernel = _phi_kernel(_u_max(prec, n), prec)
    fac = 2 / mpf(mpmath.factorial(2 * n))
    value, _ = kernel.integrate(lambda u: u ** (2 * n) if n else mpf(1),
                                spec.resolved_target(prec))
    return fac * value


def xi_eval(s, spec: Optional[QuadratureSpec] = None) -> mpf:
    """Xi(s) = 2 int_0^umax Phi(u) cos(us) du for real s."""
    if spec is None:
        spec = QuadratureSpec()
    s = to_mpf(s)
    prec = mp.prec
    kernel = _phi_kernel(_u_max(prec, 0), prec)
    value, _ = kernel.integrate(lambda u: 2 * mpmath.cos(u * s),
                                spec.resolved_target(prec))
    return require_finite(value, "Xi(s)")


@dataclass(frozen=True)
class ZeroBracket:
    """A sign-change interval of Xi with its bisection-refined midpoint."""

    lo: mpf
    hi: mpf
    refined_root: mpf

    def __post_init__(self):
        if not (self.lo < self.refined_root < self.hi):
            raise DomainError("refined root must lie inside the bracket")


def _bracket_spec(prec: int) -> QuadratureSpec:
    # sign resolution near a simple zero needs error << |Xi'| * final width
    # ~ 2^-(prec/2); a 3*prec/4 target leaves ample margin and saves levels
    return QuadratureSpec(target_abs_error=mpf(2) ** (-(3 * prec // 4)))


_bracket_cache: dict = {}


def bracket_zeros(s_max, step=mpf("0.5"),
                  spec: Optional[QuadratureSpec] = None) -> List[ZeroBracket]:
    """Scan [0, s_max] for sign changes of Xi and bisect each to full width.

    The scan step must be below the local zero spacing (about 7 near the
    first zeros, shrinking like 2 pi / log growth); the default 0.5 is safe
    up to heights of a few hundred.  Brackets are refined to width
    2^-(prec/2).  An empty list is a valid result.
    """
    s_max = to_mpf(s_max)
    step = to_mpf(step)
    if not step > 0:
        raise DomainError("step must be > 0")
    prec = mp.prec
    key = (prec, str(s_max), str(step),
           None if spec is None else str(spec.target_abs_error))
    if key in _bracket_cache:
        return _bracket_cache[key]
    if spec is None:
        spec = _bracket_spec(prec)
    f = lambda s: xi_eval(s, spec)
    width = mpf(2) ** (-(prec // 2))
    brackets: List[ZeroBracket] = []
    s_prev = mpf(0)
    v_prev = f(s_prev)
    s = step
    while s_prev < s_max:
        s = min(s, s_max)
        v = f(s)
        if v_prev * v < 0:
            lo, hi, _, _ = bisect_sign_change(f, s_prev, s, v_prev, v, width)
            brackets.append(ZeroBracket(lo, hi, (lo + hi) / 2))
        s_prev, v_prev = s, v
        s = s + step
    _bracket_cache[key] = brackets
    return brackets


def zero_sum_tail_bound(T, k: int) -> mpf:
    """Upper bound for sum of s_rho^(-(2k+4)) over zeros above height T.

    Uses the classical per-unit-interval zero count O(log t) with the very
    safe constant 2 (the true density below height ~10^6 is under 0.7 per
    unit):  tail <= 2 * int_(T-1)^inf ln(2t) t^-(2k+4) dt, evaluated in
    closed form.
    """
    T = to_mpf(T)
    if not T > 2:
        raise DomainError("tail bound needs T > 2")
    e = 2 * k + 4
    X = T - 1
    return 2 * (mpmath.log(2 * X) / (e - 1) + mpf(1) / (e - 1) ** 2) \
        * X ** (-(e - 1))


def zero_sum_moment(brackets: Sequence[ZeroBracket], k: int) -> mpf:
    """Truncated moment sum_(rho in brackets) s_rho^(-(2k+4))."""
    return mpf(mpmath.fsum(b.refined_root ** (-(2 * k + 4)) for b in brackets))


def auto_scale(s1) -> mpf:
    """Default grid scale 1.05 * s_1^(-2); anything > s_1^(-2) is admissible."""
    s1 = to_mpf(s1)
    return mpf("1.05") / (s1 * s1)


@dataclass(frozen=True)
class XiPipelineResult:
    coefficients: XiCoefficients
    series: SeriesPrefix
    moments: MomentSequence
    grid: PositivityGrid
    brackets: Tuple[ZeroBracket, ...]
    s1: mpf
    L: mpf
    det_residuals: Tuple[mpf, ...]  # |recursion - determinant| for small l


def rh_moment_pipeline(N: int, L, n_max: int, k_max: int,
                       policy: PrecisionPolicy = PrecisionPolicy(),
                       spec: Optional[QuadratureSpec] = None,
                       scan_max=mpf(16)) -> XiPipelineResult:
    """Full grid check for the Xi moments.

    Computes a_0..a_N, normalizes, runs the moment recursion to depth N-2,
    cross-checks the first moments against the determinant path, and
    certifies the (n_max, k_max) grid at the scale L.  ``L`` may be the
    string "auto" (or None) for 1.05 * s_1^(-2); an explicit L must satisfy
    L > s_1^(-2).
    """
    if N < n_max + k_max + 2:
        raise DomainError(
            f"N = {N} too small: grid ({n_max},{k_max}) needs N >= "
            f"{n_max + k_max + 2}")
    with workprec(policy.bits):
        brackets = bracket_zeros(scan_max)
        if not brackets:
            raise DomainError(f"no Xi zero located below {scan_max}")
        s1 = brackets[0].refined_root
        if L is None or L == "auto":
            L = auto_scale(s1)
        else:
            L = to_mpf(L)
            if not L > 1 / (s1 * s1):
                raise DomainError(
                    f"L = {decimal_str(L)} violates the constraint "
                    f"L > s_1^-2 = {decimal_str(1 / (s1 * s1))}")
        coeffs = xi_coefficients(N, spec)
        series = normalize(coeffs.a)
        moments = moments_by_recursion(series, N - 2)
        residuals = tuple(
            abs(moments.m[l] - moments_by_determinant(series, l))
            for l in range(min(8, N - 2) + 1))
        grid = build_grid(moments, L, n_max, k_max, policy)
    return XiPipelineResult(
        coefficients=coeffs, series=series, moments=moments, grid=grid,
        brackets=tuple(brackets), s1=s1, L=L, det_residuals=residuals)


def export_brackets(brackets: Sequence[ZeroBracket],
                    path: Union[str, Path]) -> None:
    """Write refined roots as a zero fixture (one 're im' line per zero).

    The exported values are the heights s_rho; loading them as an even zero
    set (z_n = s_rho) feeds the zero-sum moment oracle.
    """
    save_zeros(path, [b.refined_root for b in brackets],
               header="bracketed zero heights")

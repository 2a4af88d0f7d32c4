import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from momentsieve.numkernel import (
    AccuracyError,
    CachedKernelQuadrature,
    DomainError,
    PrecisionPolicy,
    QuadratureSpec,
    binomial,
    bisect_sign_change,
    certify_sign,
    comp_sum,
    decimal_str,
    integrate,
    integrate_with_error,
    to_mpf,
)

from conftest import close


# --- quadrature battery -----------------------------------------------------

def battery():
    """Analytically known integrals, including semi-infinite and endpoint-
    singular cases that the double-exponential scheme must absorb."""
    inf = mpmath.inf
    return [
        (lambda x: mpmath.exp(-x), (0, inf), mpf(1)),
        (lambda x: x ** 3 * mpmath.exp(-x), (0, inf), mpf(6)),
        (lambda x: mpmath.exp(-x * x), (0, inf), mpmath.sqrt(mpmath.pi) / 2),
        (lambda x: 1 / mpmath.sqrt(x), (0, 1), mpf(2)),
        (lambda x: mpmath.log(1 / x), (0, 1), mpf(1)),
        (lambda x: 4 / (1 + x * x), (0, 1), +mpmath.pi),
        (lambda x: mpmath.sin(x), (0, mpmath.pi), mpf(2)),
    ]


@pytest.mark.parametrize("case", range(7))
def test_tanh_sinh_battery(case):
    f, interval, exact = battery()[case]
    spec = QuadratureSpec()
    value, err = integrate_with_error(f, interval, spec)
    target = spec.resolved_target(mp.prec)
    assert abs(value - exact) <= target
    assert err <= target


@pytest.mark.parametrize("case", [0, 2, 5, 6])
def test_gauss_legendre_battery(case):
    f, interval, exact = battery()[case]
    spec = QuadratureSpec(scheme="gauss-legendre-composite")
    value, _ = integrate_with_error(f, interval, spec)
    assert abs(value - exact) <= spec.resolved_target(mp.prec)


def test_phi_kernel_integral_matches_xi_half():
    # independent target: the completed zeta at the central point,
    # evaluated through library gamma/zeta
    from momentsieve.riemann import phi
    xi_half = mpmath.pi ** (-mpf(1) / 4) * (mpf(1) / 2 - 1) \
        * mpmath.gamma(1 + mpf(1) / 4) * mpmath.zeta(mpf(1) / 2)
    value = integrate(phi, (0, mpmath.inf))
    assert close(value, xi_half / 2, mpf(10) ** -15)
    assert close(value, xi_half / 2, mpf(2) ** -(mp.prec - 24))


def test_accuracy_failure_carries_best_estimate():
    spec = QuadratureSpec(target_abs_error=mpf(2) ** -200, max_levels=3)
    with pytest.raises(AccuracyError) as info:
        integrate(lambda x: mpmath.cos(1000 * x), (0, 1), spec)
    assert info.value.best_estimate is not None
    assert info.value.error_estimate > 0


def test_interval_validation():
    with pytest.raises(DomainError):
        integrate(lambda x: x, (1, 1))
    with pytest.raises(DomainError):
        integrate(lambda x: x, (2, 1))
    with pytest.raises(DomainError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(DomainError):
        QuadratureSpec(target_abs_error=-1)


def test_cached_kernel_matches_direct():
    kernel = CachedKernelQuadrature(lambda x: mpmath.exp(-x), 0, 4)
    v1, e1 = kernel.integrate(lambda x: x * x)
    direct = integrate(lambda x: x * x * mpmath.exp(-x), (0, 4))
    assert abs(v1 - direct) <= mpf(2) ** -(mp.prec - 24)
    assert e1 <= mpf(2) ** -(mp.prec - 16)


# --- binomials ---------------------------------------------------------------

def test_binomial_values():
    assert binomial(0, 0) == 1
    assert binomial(5, 2) == 10
    # frozen from the Pascal recurrence below
    assert binomial(40, 20) == 137846528820


def test_binomial_pascal_recurrence():
    # independent oracle: build Pascal's triangle by addition only
    row = [1]
    for k in range(1, 65):
        row = [1] + [row[j - 1] + row[j] for j in range(1, k)] + [1]
        for j in range(k + 1):
            assert binomial(k, j) == row[j]
        for j in range(1, k):
            assert binomial(k, j) == binomial(k - 1, j - 1) + binomial(k - 1, j)


def test_binomial_domain():
    with pytest.raises(DomainError):
        binomial(3, 4)
    with pytest.raises(DomainError):
        binomial(3, -1)
    with pytest.raises(DomainError):
        binomial(-1, 0)


# --- sign certification -------------------------------------------------------

def test_certify_trivial_signs():
    policy = PrecisionPolicy()
    assert certify_sign(lambda: mpf(1), policy).sign == "positive"
    assert certify_sign(lambda: mpf("-1e-50"), policy).sign == "negative"
    assert certify_sign(lambda: mpf(0), policy).sign == "zero-uncertain"


def test_certify_two_zero_difference():
    # m_0 - m_1 for zeros {2, 3}: sum lambda^-2 (1 - 1/lambda) = 43/216
    expect = Fraction(43, 216)

    def computation():
        m0 = to_mpf(Fraction(1, 4)) + to_mpf(Fraction(1, 9))
        m1 = to_mpf(Fraction(1, 8)) + to_mpf(Fraction(1, 27))
        return m0 - m1

    cert = certify_sign(computation, PrecisionPolicy())
    assert cert.sign == "positive"
    assert close(cert.value, to_mpf(expect), mpf(2) ** -(mp.prec - 8))


def test_certify_never_contradicts_exact_rational_sign():
    """Exact-zero and tiny-signed rational computations must never be
    certified with the wrong sign; exactness checked with Fractions."""
    import random
    rng = random.Random(20250809)
    for _ in range(40):
        parts = [Fraction(rng.randint(-10 ** 6, 10 ** 6),
                          rng.randint(1, 10 ** 4)) for _ in range(6)]
        exact = sum(parts, Fraction(0))
        cases = {
            "raw": (parts, exact),
            # force an exact zero through heavy cancellation
            "zero": (parts + [-exact], Fraction(0)),
            # bury a tiny signed value under the same cancellation
            "tiny": (parts + [-exact, Fraction(1, 2 ** 300)],
                     Fraction(1, 2 ** 300)),
        }
        for parts_i, exact_i in cases.values():
            cert = certify_sign(
                lambda parts_i=parts_i: comp_sum(to_mpf(p) for p in parts_i),
                PrecisionPolicy(bits=128, max_bits=1024))
            if exact_i <= 0:
                assert cert.sign != "positive"
            if exact_i >= 0:
                assert cert.sign != "negative"


def test_certify_escalates_precision():
    # needs more than 128 bits to separate from the cancellation noise
    parts = [Fraction(1, 3), Fraction(1, 7), Fraction(-1, 3), Fraction(-1, 7),
             Fraction(1, 2 ** 200)]
    cert = certify_sign(lambda: comp_sum(to_mpf(p) for p in parts),
                        PrecisionPolicy(bits=64, max_bits=2048))
    assert cert.sign == "positive"
    assert cert.bits_used > 128


def test_policy_validation():
    with pytest.raises(DomainError):
        PrecisionPolicy(bits=0)
    with pytest.raises(DomainError):
        PrecisionPolicy(escalation_factor=1)
    with pytest.raises(DomainError):
        PrecisionPolicy(bits=8192, max_bits=4096)


# --- misc ---------------------------------------------------------------------

def test_decimal_str_roundtrip():
    for value in [mpf(1) / 3, mpf("14.134725"), mpf(2) ** -200, -mpf(97) / 1296]:
        text = decimal_str(value)
        assert abs(mpf(text) - value) <= abs(value) * mpf(2) ** -(mp.prec - 2)


def test_comp_sum_cancellation():
    big = mpf(2) ** 100
    terms = [big, mpf(1), -big, mpf(1)]
    assert comp_sum(terms) == 2


def test_bisect_sign_change():
    lo, hi, flo, fhi = bisect_sign_change(mpmath.cos, 1, 2, width=mpf(2) ** -100)
    assert hi - lo <= mpf(2) ** -100
    assert lo < mpmath.pi / 2 < hi
    assert flo * fhi < 0
    with pytest.raises(DomainError):
        bisect_sign_change(mpmath.cos, 0, 1)

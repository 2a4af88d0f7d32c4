"""Shared helpers: precision discipline and seeded random generators."""

import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf, mpc

DEFAULT_TEST_BITS = 256


@pytest.fixture(autouse=True)
def _default_precision():
    old = mp.prec
    mp.prec = DEFAULT_TEST_BITS
    yield
    mp.prec = old


def close(a, b, tol):
    return abs(mpf(a) - mpf(b)) <= mpf(tol)


def rel_close(a, b, tol):
    a, b = mpf(a), mpf(b)
    scale = max(abs(a), abs(b))
    if scale == 0:
        return True
    return abs(a - b) <= mpf(tol) * scale


def random_real_zeros(rng: random.Random, count, lo=1.5, hi=100.0):
    """Real zeros in [lo, hi], as exact dyadic-friendly mpf values."""
    return [mpf(rng.uniform(lo, hi)) for _ in range(count)]


def random_conjugate_zeros(rng: random.Random, pairs, reals,
                           re_lo=1.5, re_hi=30.0, max_tangent=0.6):
    """A conjugate-closed list: ``reals`` real zeros plus ``pairs`` pairs.

    Imaginary parts stay below ``max_tangent`` times the real part, keeping
    the sets comfortably inside the real-part-dominated class.
    """
    zeros = [mpc(mpf(rng.uniform(re_lo, re_hi))) for _ in range(reals)]
    for _ in range(pairs):
        re = mpf(rng.uniform(re_lo, re_hi))
        im = re * mpf(rng.uniform(0.05, max_tangent))
        zeros.append(mpc(re, im))
        zeros.append(mpc(re, -im))
    rng.shuffle(zeros)
    return zeros


def random_fraction(rng: random.Random, max_num=1000, max_den=1000):
    return Fraction(rng.randint(-max_num, max_num),
                    rng.randint(1, max_den))

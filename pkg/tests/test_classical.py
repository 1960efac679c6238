import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsimkit.classical import (
    Gf2Matrix,
    best_approx,
    convergents,
    dft_matrix,
    dot2,
    fft,
    gcd,
    gf2_solve,
    integer_root,
    is_prime,
    modexp,
    perfect_power,
    poly_multiply,
    real_convergents,
)
from qsimkit.numeric import DimensionError


def naive_dft(v):
    n = len(v)
    return np.array([sum(v[j] * np.exp(2j * np.pi * j * k / n) for j in range(n)) for k in range(n)]) / math.sqrt(n)


def test_fft_small_examples():
    assert np.allclose(fft([1, 0]), [1 / math.sqrt(2)] * 2)
    assert np.allclose(fft(np.eye(8)[0]), np.full(8, 1 / math.sqrt(8)))
    with pytest.raises(DimensionError):
        fft(np.ones(6))


def test_fft_matches_naive_dft(rng):
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    assert np.allclose(fft(v), naive_dft(v), atol=1e-9)
    assert np.allclose(dft_matrix(8) @ v[:8], naive_dft(v[:8]))


@given(st.integers(0, 2**32 - 1), st.integers(0, 7))
def test_fft_unitary_and_invertible(seed, m):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    f = fft(v)
    assert np.isclose(np.linalg.norm(f), np.linalg.norm(v), atol=1e-10)
    assert np.allclose(fft(f, inverse=True), v, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_convolution_theorem(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=16), rng.normal(size=16)
    circ = np.array([sum(a[j] * b[(k - j) % 16] for j in range(16)) for k in range(16)])
    assert np.allclose(fft(circ), math.sqrt(16) * fft(a) * fft(b), atol=1e-9)


def test_poly_multiply_examples(rng):
    assert np.allclose(poly_multiply([1, 1], [1, -1]), [1, 0, -1])
    p = rng.normal(size=5)
    assert np.allclose(poly_multiply([3.0], p), 3 * p)
    a, b = rng.normal(size=9), rng.normal(size=9)
    school = [sum(a[i] * b[k - i] for i in range(9) if 0 <= k - i < 9) for k in range(17)]
    assert np.allclose(poly_multiply(a, b), school, atol=1e-8)


def brute_best(x, bound):
    return min((Fraction(p, q) for q in range(1, bound + 1) for p in range(0, 4 * q)), key=lambda f: abs(f - x))


def test_best_approx_examples():
    assert best_approx(11, 16, 16) == Fraction(11, 16)
    x = Fraction(314159, 100000)
    cf = [c for c in convergents(314159, 100000) if c.denominator <= 10][-1]
    assert cf == Fraction(22, 7) == brute_best(x, 10)
    # best_approx takes a proper fraction, so approximate the fractional part
    assert 3 + best_approx(14159, 100000, 10) == Fraction(22, 7)


@pytest.mark.parametrize("N", [7, 15, 21])
def test_best_approx_recovers_shor_fractions(N):
    q = 1 << (N * N).bit_length()
    for r in range(1, N + 1):
        for c in range(r):
            target = Fraction(c, r)
            for b in range(q):
                if abs(Fraction(b, q) - target) <= Fraction(1, 2 * q):
                    assert best_approx(b, q, N) == target


def test_convergent_properties():
    x = math.pi
    cs = list(real_convergents(x, max_terms=10))
    for c in cs:
        assert abs(x - c.numerator / c.denominator) < 1 / c.denominator**2
    for i in range(2, len(cs)):
        assert cs[i].denominator >= 2 * cs[i - 2].denominator
    assert list(convergents(3, 8))[-1] == Fraction(3, 8)


def test_modexp_examples():
    assert modexp(5, 0, 7) == 1
    assert modexp(7, 2, 10) == 9
    assert modexp(7, 4, 10) == 1
    assert [modexp(7, a, 10) for a in range(1, 5)] == [7, 9, 3, 1]


@given(st.integers(0, 10**6), st.integers(0, 200), st.integers(2, 10**4))
def test_modexp_matches_builtin(x, a, n):
    assert modexp(x, a, n) == pow(x, a, n)


def test_gcd_and_number_theory():
    assert gcd(12, 8) == 4
    assert gcd(15, 4) == 1
    assert gcd(9, 0) == 9
    # the order-finding reduction for N = 15, x = 7 (period 4)
    y = modexp(7, 2, 15)
    assert {gcd(y - 1, 15), gcd(y + 1, 15)} == {3, 5}
    assert integer_root(1000, 3) == 10
    assert perfect_power(27) == (3, 3)
    assert perfect_power(15) is None
    assert is_prime(13) and not is_prime(21)


def test_gf2_examples():
    assert len(gf2_solve(Gf2Matrix([], width=4))) == 4
    m = Gf2Matrix(["011", "101"])
    assert m.rank() == 2
    assert gf2_solve(m) == [0b111]


@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_gf2_nullspace_matches_exhaustive(seed, n):
    rng = np.random.default_rng(seed)
    rows = [int(v) for v in rng.integers(0, 1 << n, size=int(rng.integers(0, n + 2)))]
    m = Gf2Matrix([format(r, f"0{n}b") for r in rows], width=n)
    basis = gf2_solve(m)
    assert m.rank() + len(basis) == n
    span = set()
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        v = 0
        for c, b in zip(coeffs, basis):
            if c:
                v ^= b
        span.add(v)
    brute = {s for s in range(1 << n) if all(dot2(r, s) == 0 for r in rows)}
    assert span == brute

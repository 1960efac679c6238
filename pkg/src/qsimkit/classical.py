"""Classical companions: FFT, polynomial products, continued fractions,
modular arithmetic and GF(2) elimination."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .numeric import DimensionError, log2_exact


def fft(v, inverse: bool = False) -> np.ndarray:
    """Unitary discrete Fourier transform by radix-2 divide and conquer.

    Entry ``k`` of the result is ``sum_j omega**(j*k) v_j / sqrt(N)`` with
    ``omega = exp(2 pi i / N)``; ``inverse`` conjugates the exponent.
    """
    a = np.asarray(v, dtype=complex).ravel()
    n = a.size
    try:
        log2_exact(n)
    except DimensionError:
        raise DimensionError(f"fft length {n} is not a power of two") from None
    sign = -1.0 if inverse else 1.0
    return _fft_rec(a, sign) / np.sqrt(n)


def _fft_rec(a: np.ndarray, sign: float) -> np.ndarray:
    n = a.size
    if n == 1:
        return a.copy()
    even = _fft_rec(a[0::2], sign)
    odd = _fft_rec(a[1::2], sign)
    tw = np.exp(sign * 2j * np.pi * np.arange(n // 2) / n) * odd
    return np.concatenate([even + tw, even - tw])


def dft_matrix(n_points: int) -> np.ndarray:
    """``F_N`` with entries ``omega**(jk) / sqrt(N)``."""
    j = np.arange(n_points)
    return np.exp(2j * np.pi * np.outer(j, j) / n_points) / np.sqrt(n_points)


def poly_multiply(a, b) -> np.ndarray:
    """Coefficients of ``p * q`` (lowest degree first) via the FFT."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        return np.zeros(0)
    out_len = a.size + b.size - 1
    d = max(a.size, b.size) - 1
    size = 1 << math.ceil(math.log2(2 * d + 1)) if d > 0 else 1
    size = max(size, 1 << math.ceil(math.log2(out_len)))
    fa = fft(np.pad(a, (0, size - a.size)))
    fb = fft(np.pad(b, (0, size - b.size)))
    # with the unitary normalization the product picks up an extra sqrt(N)
    prod = fft(fa * fb, inverse=True) * np.sqrt(size)
    return prod.real[:out_len]


# -- continued fractions -----------------------------------------------------


def convergents(b: int, q: int):
    """Yield the continued-fraction convergents of ``b / q`` (exact integers)."""
    if q <= 0:
        raise ValueError("denominator must be positive")
    p_prev, p = 0, 1
    q_prev, qq = 1, 0
    num, den = b, q
    while den:
        a = num // den
        p_prev, p = p, a * p + p_prev
        q_prev, qq = qq, a * qq + q_prev
        yield Fraction(p, qq)
        num, den = den, num - a * den


def real_convergents(x: float, max_terms: int = 64, tol: float = 1e-12):
    """Convergents of a real number; stops when the remainder drops below ``tol``."""
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    rem = x
    for _ in range(max_terms):
        a = math.floor(rem)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield Fraction(p, q)
        frac = rem - a
        if frac < tol:
            return
        rem = 1 / frac


def best_approx(b: int, q: int, bound: int) -> Fraction:
    """Convergent of ``b / q`` with the largest denominator not exceeding ``bound``."""
    if not 0 <= b < q:
        raise ValueError("need 0 <= b < q")
    if bound < 1:
        raise ValueError("bound must be at least 1")
    best = Fraction(0, 1)
    for c in convergents(b, q):
        if c.denominator > bound:
            break
        best = c
    return best


def modexp(x: int, a: int, n: int) -> int:
    """``x**a mod n`` by square-and-multiply over the bits of ``a``."""
    if n < 2:
        raise ValueError("modulus must be at least 2")
    if a < 0:
        raise ValueError("exponent must be non-negative")
    result, base = 1, x % n
    while a:
        if a & 1:
            result = result * base % n
        base = base * base % n
        a >>= 1
    return result


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def integer_root(n: int, k: int) -> int:
    """Largest ``r`` with ``r**k <= n``."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def perfect_power(n: int):
    """``(base, k)`` with ``base**k == n`` and ``k >= 2`` maximal-base form, else None."""
    for k in range(2, n.bit_length() + 1):
        r = integer_root(n, k)
        if r > 1 and r**k == n:
            return r, k
    return None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


# -- GF(2) -------------------------------------------------------------------


class Gf2Matrix:
    """Rows of bits; each row is stored as a Python int with bit ``width-1-j``
    holding column ``j`` (so the bit string reads left to right)."""

    def __init__(self, rows=(), width: int | None = None):
        parsed = []
        for r in rows:
            if isinstance(r, str):
                parsed.append((int(r, 2), len(r)))
            else:
                bits = [int(b) & 1 for b in r]
                parsed.append((int("".join(map(str, bits)) or "0", 2), len(bits)))
        widths = {w for _, w in parsed}
        if width is None:
            if not widths:
                raise ValueError("width required for an empty matrix")
            width = widths.pop()
        if widths - {width}:
            raise ValueError("inconsistent row widths")
        self.width = width
        self.rows = [v for v, _ in parsed]

    def rank(self) -> int:
        return len(_echelon(self.rows, self.width)[0])


def _echelon(rows, width):
    """Reduced row echelon form; returns (pivot rows, pivot columns)."""
    rows = [r for r in rows]
    pivots = []
    pivot_rows = []
    for col in range(width):
        bit = 1 << (width - 1 - col)
        pick = next((i for i, r in enumerate(rows) if r & bit), None)
        if pick is None:
            continue
        prow = rows.pop(pick)
        rows = [r ^ prow if r & bit else r for r in rows]
        pivot_rows = [r ^ prow if r & bit else r for r in pivot_rows]
        pivot_rows.append(prow)
        pivots.append(col)
    return pivot_rows, pivots


def gf2_solve(m: Gf2Matrix) -> list[int]:
    """Basis of ``{s : m s = 0 mod 2}``, each vector an int in the row convention."""
    width = m.width
    prows, pcols = _echelon(m.rows, width)
    free = [c for c in range(width) if c not in pcols]
    basis = []
    for f in free:
        s = 1 << (width - 1 - f)
        for r, pc in zip(prows, pcols):
            if r & (1 << (width - 1 - f)):
                s |= 1 << (width - 1 - pc)
        basis.append(s)
    return basis


def dot2(a: int, b: int) -> int:
    """Inner product mod 2 of two bit vectors stored as ints."""
    return bin(a & b).count("1") & 1

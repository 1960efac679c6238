"""BB84 quantum key distribution with pluggable individual-attack eavesdroppers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numeric import H
from .state import make_rng, sample_index

BREIDBART_ANGLE = math.pi / 8


def bb84_state(bit: int, basis: int) -> np.ndarray:
    """``|a>`` in the computational basis (0) or ``H|a>`` in the Hadamard basis (1)."""
    v = np.zeros(2, dtype=complex)
    v[bit] = 1
    return H @ v if basis else v


def measure_in_basis(qubit: np.ndarray, basis: int, rng) -> int:
    """Bob's measurement: apply H for the Hadamard basis, then measure."""
    v = H @ qubit if basis else qubit
    return sample_index(np.abs(v) ** 2, rng)


class InterceptResend:
    """Measure each qubit in the basis ``{cos t|0> + sin t|1>, -sin t|0> + cos t|1>}``
    and forward the observed basis state.

    ``theta = 0`` is the computational basis, ``theta = pi/8`` the Breidbart
    basis halfway between the two encodings of 0.  Outcome ``j`` is Eve's
    guess for Alice's bit; guesses are recorded in ``guesses``.
    """

    def __init__(self, theta: float = BREIDBART_ANGLE):
        self.theta = theta
        c, s = math.cos(theta), math.sin(theta)
        self.basis = np.array([[c, s], [-s, c]], dtype=complex)  # rows are basis vectors
        self.guesses: list = []

    def __call__(self, qubit: np.ndarray, rng) -> np.ndarray:
        probs = np.abs(self.basis.conj() @ qubit) ** 2
        j = sample_index(probs, rng)
        self.guesses.append(j)
        return self.basis[j].copy()


@dataclass
class Bb84Transcript:
    alice_bits: np.ndarray
    alice_bases: np.ndarray
    bob_bases: np.ndarray
    bob_results: np.ndarray
    matched: np.ndarray
    tested: np.ndarray
    error_fraction: float
    verdict: str
    key: np.ndarray
    bob_key: np.ndarray
    matched_error_rate: float = 0.0
    eve_guesses: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))


def bb84_run(n: int, eavesdropper: Callable | None = None, error_threshold: float = 0.0, rng=None) -> Bb84Transcript:
    """Run the five BB84 steps over ``n`` qubits.

    ``floor(n/4)`` test positions are drawn from the matched-basis set (all of
    them if fewer are available); the run aborts iff the observed error
    fraction on them exceeds ``error_threshold``.  The raw key is Alice's bits
    at the remaining matched positions.  ``matched_error_rate`` reports the
    disagreement over every matched position, which is available only to the
    simulation.
    """
    if n < 16:
        raise ValueError("BB84 needs n >= 16")
    rng = make_rng(rng)
    a = rng.integers(0, 2, n, dtype=np.int8)
    b = rng.integers(0, 2, n, dtype=np.int8)
    b_bob = rng.integers(0, 2, n, dtype=np.int8)
    results = np.zeros(n, dtype=np.int8)
    for i in range(n):
        q = bb84_state(int(a[i]), int(b[i]))
        if eavesdropper is not None:
            q = eavesdropper(q, rng)
        results[i] = measure_in_basis(q, int(b_bob[i]), rng)
    matched = np.flatnonzero(b == b_bob)
    n_test = min(n // 4, len(matched))
    tested = np.sort(rng.choice(matched, size=n_test, replace=False))
    errors = int(np.sum(a[tested] != results[tested]))
    frac = errors / n_test if n_test else 0.0
    keep = np.setdiff1d(matched, tested)
    verdict = "abort" if frac > error_threshold else "key"
    guesses = np.array(getattr(eavesdropper, "guesses", []), dtype=np.int8)
    matched_err = float(np.mean(a[matched] != results[matched])) if len(matched) else 0.0
    return Bb84Transcript(
        alice_bits=a,
        alice_bases=b,
        bob_bases=b_bob,
        bob_results=results,
        matched=matched,
        tested=tested,
        error_fraction=frac,
        verdict=verdict,
        key=a[keep] if verdict == "key" else np.zeros(0, dtype=np.int8),
        bob_key=results[keep] if verdict == "key" else np.zeros(0, dtype=np.int8),
        matched_error_rate=matched_err,
        eve_guesses=guesses,
    )


def intercept_resend_error_rate(theta: float) -> float:
    """Exact matched-basis error rate of ``InterceptResend(theta)``.

    Averages over Alice's four states (matched bases only) the probability
    that Bob's result differs from Alice's bit.
    """
    eve = InterceptResend(theta)
    total = 0.0
    for basis in (0, 1):
        for bit in (0, 1):
            psi = bb84_state(bit, basis)
            for j in (0, 1):
                p_eve = abs(np.vdot(eve.basis[j], psi)) ** 2
                v = H @ eve.basis[j] if basis else eve.basis[j]
                total += p_eve * abs(v[1 - bit]) ** 2
    return total / 4


def intercept_resend_guess_accuracy(theta: float) -> float:
    """Probability that Eve's outcome equals Alice's bit, over the four states."""
    eve = InterceptResend(theta)
    total = 0.0
    for basis in (0, 1):
        for bit in (0, 1):
            total += abs(np.vdot(eve.basis[bit], bb84_state(bit, basis))) ** 2
    return total / 4

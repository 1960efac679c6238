"""Query oracles and the early query algorithms.

Deutsch-Jozsa, Bernstein-Vazirani, Simon, Grover search (including the
exact variant and the unknown-solution-count driver) and generic amplitude
amplification.  Every oracle application increments the oracle's
``query_count``; classical spot checks are counted separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, inverse, run_ops
from .classical import Gf2Matrix, gf2_solve
from .numeric import DimensionError, log2_exact
from .state import StateVector, apply_matrix, make_rng, measure_all, sample_index


class PromiseError(ValueError):
    """Input violates a promise the algorithm relies on."""


class RetryLimitError(RuntimeError):
    """A randomized procedure did not succeed within its retry budget."""


# -- oracles -------------------------------------------------------------------


@dataclass
class BitOracle:
    """Black-box access to ``x in {0,1}^N`` with ``N = 2**n``."""

    bits: np.ndarray
    query_count: int = 0
    classical_queries: int = 0

    def __post_init__(self):
        b = np.asarray(self.bits).astype(np.int8).ravel()
        if np.any((b != 0) & (b != 1)):
            raise ValueError("oracle bits must be 0 or 1")
        self.n_qubits = log2_exact(b.size)
        self.bits = b
        self._signs = 1.0 - 2.0 * b

    @classmethod
    def from_function(cls, n: int, f: Callable[[int], int]) -> "BitOracle":
        return cls(np.array([f(i) & 1 for i in range(1 << n)]))

    @classmethod
    def from_indices(cls, n: int, marked: Sequence[int]) -> "BitOracle":
        b = np.zeros(1 << n, dtype=np.int8)
        b[list(marked)] = 1
        return cls(b)

    @property
    def size(self) -> int:
        return self.bits.size

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    def phase(self, amps: np.ndarray) -> np.ndarray:
        """``|i> -> (-1)^{x_i} |i>`` on an amplitude array (one query)."""
        self.query_count += 1
        return amps * self._signs.reshape((-1,) + (1,) * (amps.ndim - 1))

    def bit(self, amps: np.ndarray) -> np.ndarray:
        """``|i, b> -> |i, b xor x_i>`` on ``n + 1`` qubits (one query)."""
        self.query_count += 1
        a = amps.reshape((self.size, 2) + amps.shape[1:])
        out = a.copy()
        flip = self.bits == 1
        out[flip, 0], out[flip, 1] = a[flip, 1], a[flip, 0]
        return out.reshape(amps.shape)

    def lookup(self, i: int) -> int:
        """Classical query used to verify a candidate."""
        self.classical_queries += 1
        return int(self.bits[i])

    def reset(self):
        self.query_count = 0
        self.classical_queries = 0


@dataclass
class FunctionOracle:
    """Black-box ``f : {0,1}^n -> {0,1}^m`` given as a lookup table."""

    table: np.ndarray
    out_bits: int | None = None
    query_count: int = 0

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64).ravel()
        self.in_bits = log2_exact(t.size)
        if np.any(t < 0):
            raise ValueError("function values must be non-negative")
        needed = max(int(t.max()).bit_length(), 1)
        if self.out_bits is None:
            self.out_bits = needed
        elif self.out_bits < needed:
            raise ValueError(f"values need {needed} bits, out_bits={self.out_bits}")
        self.table = t

    @classmethod
    def from_function(cls, n: int, f: Callable[[int], int], out_bits: int | None = None) -> "FunctionOracle":
        return cls(np.array([f(i) for i in range(1 << n)]), out_bits)

    def __call__(self, i: int) -> int:
        """Classical evaluation (not counted as a quantum query)."""
        return int(self.table[i])

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """``|i, b> -> |i, b xor f(i)>`` on ``in_bits + out_bits`` qubits."""
        self.query_count += 1
        m = 1 << self.out_bits
        a = amps.reshape((self.table.size, m) + amps.shape[1:])
        out = np.empty_like(a)
        b = np.arange(m)
        rows = np.arange(self.table.size)[:, None]
        out[rows, b[None, :] ^ self.table[:, None]] = a
        return out.reshape(amps.shape)


@dataclass
class OracleGate:
    """Oracle packaged as a gate; ``apply`` consumes one query."""

    oracle: BitOracle
    kind: str

    @property
    def n_qubits(self) -> int:
        return self.oracle.n_qubits + (self.kind == "bit")

    def matrix(self) -> np.ndarray:
        d = 1 << self.n_qubits
        eye = np.eye(d, dtype=complex)
        # build column by column without touching the query counter
        saved = self.oracle.query_count
        m = self.oracle.phase(eye) if self.kind == "phase" else self.oracle.bit(eye)
        self.oracle.query_count = saved
        return m

    def apply(self, state: StateVector) -> StateVector:
        if state.n_qubits != self.n_qubits:
            raise DimensionError("state width does not match oracle")
        f = self.oracle.phase if self.kind == "phase" else self.oracle.bit
        return StateVector(f(state.amplitudes))


def oracle_unitary(o: BitOracle, kind: str = "bit") -> OracleGate:
    if kind not in ("bit", "phase"):
        raise ValueError("kind must be 'bit' or 'phase'")
    return OracleGate(o, kind)


def hadamard_all(amps: np.ndarray, n: int, qubits: Sequence[int] | None = None) -> np.ndarray:
    from .numeric import H

    for q in range(n) if qubits is None else qubits:
        amps = apply_matrix(amps, n, H, [q])
    return amps


def uniform(n: int) -> np.ndarray:
    return np.full(1 << n, 1 / math.sqrt(1 << n), dtype=complex)


# -- Deutsch-Jozsa / Bernstein-Vazirani --------------------------------------


def _one_query_fourier_sample(o: BitOracle, rng) -> int:
    n = o.n_qubits
    amps = o.phase(uniform(n))
    amps = hadamard_all(amps, n)
    return measure_all(StateVector(amps), rng)


def deutsch_jozsa(o: BitOracle, rng=None) -> str:
    """``"constant"`` iff the final measurement gives ``0^n``.

    Correct with certainty when ``x`` is constant or balanced; other inputs
    are not detected.
    """
    return "constant" if _one_query_fourier_sample(o, rng) == 0 else "balanced"


def bernstein_vazirani(o: BitOracle, rng=None) -> int:
    """Recover ``a`` from ``x_i = i . a mod 2`` with one query."""
    return _one_query_fourier_sample(o, rng)


def parity_oracle(n: int, a: int) -> BitOracle:
    return BitOracle.from_function(n, lambda i: bin(i & a).count("1") & 1)


# -- Simon -------------------------------------------------------------------


def simon_oracle(n: int, s: int, rng=None) -> FunctionOracle:
    """Random 2-to-1 function with ``f(i) = f(i xor s)``."""
    if not 0 < s < 1 << n:
        raise ValueError("s must be a nonzero n-bit string")
    rng = make_rng(rng)
    reps = sorted({min(i, i ^ s) for i in range(1 << n)})
    labels = rng.permutation(1 << n)[: len(reps)]
    table = np.zeros(1 << n, dtype=np.int64)
    for r, lab in zip(reps, labels):
        table[r] = table[r ^ s] = lab
    return FunctionOracle(table, out_bits=n)


def simon_sample(f: FunctionOracle, rng) -> int:
    """One run: returns ``j`` with ``s . j = 0 mod 2``."""
    n, m = f.in_bits, f.out_bits
    total = n + m
    amps = np.zeros(1 << total, dtype=complex)
    amps[:: 1 << m] = 1 / math.sqrt(1 << n)
    amps = f.apply(amps)
    # measure the second register, then Hadamard the first and measure it
    probs = (np.abs(amps.reshape(1 << n, 1 << m)) ** 2).sum(axis=0)
    val = sample_index(probs, rng)
    first = amps.reshape(1 << n, 1 << m)[:, val]
    first = first / np.linalg.norm(first)
    first = hadamard_all(first, n)
    return sample_index(np.abs(first) ** 2, rng)


@dataclass
class SimonResult:
    s: int
    runs: int
    samples: list = field(default_factory=list)


def simon(f: FunctionOracle, rng=None, max_runs: int | None = None) -> SimonResult:
    """Repeat until ``n - 1`` independent equations, then solve over GF(2)."""
    rng = make_rng(rng)
    n = f.in_bits
    cap = 20 * n if max_runs is None else max_runs
    samples = []
    for runs in range(1, cap + 1):
        samples.append(simon_sample(f, rng))
        m = Gf2Matrix([format(j, f"0{n}b") for j in samples], width=n)
        if m.rank() == n - 1:
            basis = gf2_solve(m)
            return SimonResult(basis[0], runs, samples)
    raise RetryLimitError(f"no rank-{n - 1} system after {cap} runs (promise violated?)")


# -- Grover ------------------------------------------------------------------


def grover_angle(n_items: int, t: int) -> float:
    return math.asin(math.sqrt(t / n_items))


def grover_iterations(n_items: int, t: int) -> int:
    """Nearest integer to ``pi / (4 theta) - 1/2`` (ties to even)."""
    return round(math.pi / (4 * grover_angle(n_items, t)) - 0.5)


def grover_success_probability(n_items: int, t: int, k: int) -> float:
    return math.sin((2 * k + 1) * grover_angle(n_items, t)) ** 2


def diffuse(amps: np.ndarray) -> np.ndarray:
    """``H^n R H^n``: inversion about the mean, ``a -> 2 mean(a) - a``."""
    return 2 * amps.mean(axis=0) - amps


def grover_iterate(amps: np.ndarray, o: BitOracle) -> np.ndarray:
    return diffuse(o.phase(amps))


def grover_state(o: BitOracle, k: int) -> np.ndarray:
    amps = np.full(o.size, 1 / math.sqrt(o.size))
    for _ in range(k):
        amps = grover_iterate(amps, o)
    return amps


@dataclass
class GroverResult:
    index: int
    iterations: int
    success_probability: float


def grover(o: BitOracle, t: int, rng=None, exact: bool = False) -> GroverResult:
    """Grover search with a known number of solutions ``t``.

    With ``exact=True`` the database is padded to ``2N`` entries and the
    preparation rotated so that an integer number of rounds hits the
    solution subspace exactly.
    """
    N = o.size
    if not 0 < t <= N:
        raise ValueError("t must satisfy 0 < t <= N; use grover_unknown_t for t = 0")
    if exact:
        return _grover_exact(o, t, rng)
    k = grover_iterations(N, t)
    amps = grover_state(o, k)
    p = float(np.sum(amps[o.bits == 1] ** 2))
    return GroverResult(sample_index(amps**2, rng), k, p)


def exact_grover_parameters(n_items: int, t: int):
    """``(k, gamma)`` for the padded-database exact variant."""
    theta = grover_angle(n_items, t)
    k = math.ceil(math.pi / (4 * theta) - 0.5 - 1e-12)
    target = math.pi / (2 * (2 * k + 1))
    cos_g = min(1.0, math.sin(target) / math.sin(theta))
    return k, math.acos(cos_g)


def exact_grover_prep(n: int, gamma: float) -> Circuit:
    c = Circuit(n + 1)
    for q in range(n):
        c.add("H", q)
    rot = np.array([[math.cos(gamma), -math.sin(gamma)], [math.sin(gamma), math.cos(gamma)]])
    c.add("CUSTOM", n, param=rot)
    return c


def _grover_exact(o: BitOracle, t: int, rng) -> GroverResult:
    n, N = o.n_qubits, o.size
    k, gamma = exact_grover_parameters(N, t)
    prep = exact_grover_prep(n, gamma)

    def s_y(amps):
        # y_j = x_{j_1..j_n} AND NOT j_{n+1}: one query to x on the last-bit-0 half
        a = amps.reshape(N, 2).copy()
        a[:, 0] = o.phase(a[:, 0])
        return a.reshape(-1)

    good = np.zeros(2 * N, dtype=bool)
    good[0::2] = o.bits == 1
    state = amplitude_amplify(prep, s_y, p=t / N * math.cos(gamma) ** 2, rounds=k)
    probs = state.probabilities()
    idx = sample_index(probs, rng)
    return GroverResult(idx >> 1, k, float(probs[good].sum()))


@dataclass
class UnknownTResult:
    index: int | None
    queries: int
    guesses: list = field(default_factory=list)


def grover_unknown_t(o: BitOracle, rng=None) -> UnknownTResult:
    """Search with unknown ``t`` using guesses ``N, N/2, ..., 1``.

    Each guess runs :func:`grover` and spends one classical query to verify
    the returned index.  Returns ``index=None`` when every guess fails, which
    is certain when ``x = 0^N``.
    """
    rng = make_rng(rng)
    N = o.size
    start = o.query_count
    guesses = []
    t_hat = N
    while t_hat >= 1:
        res = grover(o, t_hat, rng)
        guesses.append(t_hat)
        if o.lookup(res.index) == 1:
            return UnknownTResult(res.index, o.query_count - start, guesses)
        t_hat //= 2
    return UnknownTResult(None, o.query_count - start, guesses)


# -- amplitude amplification --------------------------------------------------


def amplification_rounds(p: float) -> int:
    return round(math.pi / (4 * math.asin(math.sqrt(p))) - 0.5)


def amplitude_amplify(prep: Circuit, checker, p: float, rounds: int | None = None) -> StateVector:
    """Boost the good part of ``A|0>`` from ``sin theta`` to ``sin((2k+1) theta)``.

    ``checker`` is either a :class:`BitOracle` (phase flip on the marked
    basis states), a boolean mask of good basis states, or a callable acting
    on the amplitude array.  Each round applies the checker and then
    ``A R A^{-1}`` with ``R`` negating every basis state except ``0^n``.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    n = prep.n_qubits
    k = amplification_rounds(p) if rounds is None else rounds
    if isinstance(checker, BitOracle):
        flip = checker.phase
    elif callable(checker):
        flip = checker
    else:
        signs = np.where(np.asarray(checker, dtype=bool), -1.0, 1.0)
        flip = lambda a: a * signs  # noqa: E731
    undo = inverse(prep)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1
    amps = run_ops(amps, n, prep.ops)
    for _ in range(k):
        amps = flip(amps)
        amps = run_ops(amps, n, undo.ops)
        amps = -amps
        amps[0] = -amps[0]
        amps = run_ops(amps, n, prep.ops)
    return StateVector(amps)

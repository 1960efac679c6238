"""Two-party protocols: teleportation, superdense coding, SWAP-test
fingerprinting, distributed Deutsch-Jozsa and the Hadamard code."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, run_ops
from .numeric import DimensionError, X, Z
from .query import PromiseError, hadamard_all
from .state import StateVector, apply_gate, make_rng, measure_computational, sample_index


def _bits(x, n: int | None = None) -> np.ndarray:
    """Bit array from a ``'0101'`` string, a bit sequence or an int with ``n``."""
    if isinstance(x, str):
        if set(x) - {"0", "1"}:
            raise ValueError(f"not a bit string: {x!r}")
        return np.array([int(c) for c in x], dtype=np.int8)
    if isinstance(x, (int, np.integer)):
        if n is None:
            raise ValueError("bit width needed for an integer input")
        return np.array([(int(x) >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)
    arr = np.asarray(x, dtype=np.int8)
    if arr.ndim != 1 or np.any((arr != 0) & (arr != 1)):
        raise ValueError("expected a sequence of bits")
    return arr


def _to_int(bits: np.ndarray) -> int:
    return int("".join(map(str, bits.tolist())) or "0", 2)


# -- teleportation -------------------------------------------------------------


def epr_pair() -> StateVector:
    return StateVector(np.array([1, 0, 0, 1]) / math.sqrt(2))


def teleport_circuit() -> Circuit:
    """Qubit 0 is the input, qubits 1 and 2 the EPR pair (Alice, Bob).

    Builds the EPR pair from ``|00>`` and performs Alice's CNOT and H; the
    measurements and Bob's corrections are classical steps on top.
    """
    return Circuit(3).add("H", 1).add("CNOT", 1, 2).add("CNOT", 0, 1).add("H", 0)


def _bob_correction(qubit: np.ndarray, a: int, b: int) -> np.ndarray:
    if b:
        qubit = X @ qubit
    if a:
        qubit = Z @ qubit
    return qubit


def teleport(q: StateVector, rng=None):
    """Teleport a single qubit; returns ``((a, b), Bob's qubit)``.

    Alice measures ``a`` (input qubit after H) and ``b`` (her EPR half);
    Bob applies ``X^b`` and then ``Z^a``.
    """
    if q.n_qubits != 1:
        raise DimensionError("teleport expects a single-qubit state")
    rng = make_rng(rng)
    joint = q.tensor(StateVector.basis(0, 2))
    joint = StateVector(run_ops(joint.amplitudes, 3, teleport_circuit().ops))
    (a, b), collapsed = measure_computational(joint, [0, 1], rng)
    bob = collapsed.amplitudes.reshape(4, 2)[2 * a + b]
    return (a, b), StateVector(_bob_correction(bob, a, b))


def teleport_entangled(state: StateVector, rng=None):
    """Teleport the first qubit of a 2-qubit state.

    Returns ``((a, b), state)`` where the output state is ordered
    (Bob's qubit, untouched partner qubit).
    """
    if state.n_qubits != 2:
        raise DimensionError("expected a 2-qubit state")
    rng = make_rng(rng)
    # layout: input, partner, Alice's EPR half, Bob's EPR half
    joint = state.tensor(epr_pair())
    c = Circuit(4).add("CNOT", 0, 2).add("H", 0)
    joint = StateVector(run_ops(joint.amplitudes, 4, c.ops))
    (a, b), collapsed = measure_computational(joint, [0, 2], rng)
    rest = collapsed.amplitudes.reshape(2, 2, 2, 2)[a, :, b, :]  # (partner, bob)
    rest = np.einsum("pq,bq->bp", rest, _bob_correction(np.eye(2), a, b))
    return (a, b), StateVector(rest.reshape(-1))


# -- superdense coding ---------------------------------------------------------


def superdense_encode(a: int, b: int) -> StateVector:
    """Alice applies ``X^a`` then ``Z^b`` to her half of an EPR pair."""
    st = epr_pair()
    if a:
        st = apply_gate(st, X, [0])
    if b:
        st = apply_gate(st, Z, [0])
    return st


def superdense_decode(state: StateVector, rng=None) -> tuple:
    c = Circuit(2).add("CNOT", 0, 1).add("H", 0)
    out = StateVector(run_ops(state.amplitudes, 2, c.ops))
    # decoding yields |b>|a>: the phase bit on the first qubit, the flip bit on the second
    (b, a), _ = measure_computational(out, [0, 1], rng)
    return a, b


def superdense(ab, rng=None) -> tuple:
    """Send two classical bits with one qubit of a shared EPR pair."""
    a, b = (int(v) for v in _bits(ab))
    return superdense_decode(superdense_encode(a, b), rng)


# -- SWAP test and fingerprints ----------------------------------------------


def swap_test_probability(s1: StateVector, s2: StateVector) -> float:
    """Probability that the SWAP test outputs 1: ``(1 - |<s1|s2>|^2) / 2``."""
    if s1.dim != s2.dim:
        raise DimensionError("SWAP test needs equal-size registers")
    return (1 - abs(s1.inner(s2)) ** 2) / 2


def swap_test_state(s1: StateVector, s2: StateVector) -> StateVector:
    """``(H (x) I) c-SWAP (H (x) I) |0>|s1>|s2>`` on ancilla-first layout."""
    if s1.dim != s2.dim:
        raise DimensionError("SWAP test needs equal-size registers")
    d = s1.dim
    pair = np.outer(s1.amplitudes, s2.amplitudes)
    plus = pair / math.sqrt(2)
    swapped = pair.T / math.sqrt(2)  # controlled on ancilla 1
    out = np.stack([(plus + swapped) / math.sqrt(2), (plus - swapped) / math.sqrt(2)])
    return StateVector(out.reshape(2 * d * d))


def swap_test(s1: StateVector, s2: StateVector, rng=None) -> int:
    out = swap_test_state(s1, s2)
    (bit,), _ = measure_computational(out, [0], rng)
    return bit


def hadamard_ldc(x, n: int | None = None) -> np.ndarray:
    """Hadamard codeword ``C(x)_z = x . z mod 2`` for all ``z in {0,1}^n``."""
    bits = _bits(x, n)
    if len(bits) > 16:
        raise ValueError("Hadamard encoding is limited to n <= 16")
    xi = _to_int(bits)
    z = np.arange(1 << len(bits))
    return np.array([bin(xi & int(v)).count("1") & 1 for v in z], dtype=np.int8)


def fingerprint_state(x, n: int | None = None, code: Callable = hadamard_ldc) -> StateVector:
    """``sum_j (-1)^{C(x)_j}|j> / sqrt(N)``."""
    c = code(x, n) if n is not None else code(x)
    if len(c) & (len(c) - 1):
        raise ValueError("codeword length must be a power of two")
    return StateVector((1.0 - 2.0 * c) / math.sqrt(len(c)))


@dataclass
class FingerprintResult:
    verdict: str
    outcomes: list
    inner_product: float


def fingerprint_equality(x, y, k: int, rng=None, code: Callable = hadamard_ldc) -> FingerprintResult:
    """Compare fingerprints with ``k`` SWAP tests; "different" iff any test outputs 1."""
    rng = make_rng(rng)
    fx, fy = fingerprint_state(x, code=code), fingerprint_state(y, code=code)
    outcomes = [swap_test(fx, fy, rng) for _ in range(k)]
    verdict = "different" if any(outcomes) else "equal"
    return FingerprintResult(verdict, outcomes, float(fx.inner(fy).real))


# -- distributed Deutsch-Jozsa ---------------------------------------------


@dataclass
class DdjResult:
    verdict: str
    alice: int
    bob: int


def _check_ddj_promise(x: np.ndarray, y: np.ndarray):
    n = len(x)
    if len(y) != n or n < 1 or n & (n - 1):
        raise PromiseError("inputs must have the same power-of-two length")
    d = int(np.sum(x != y))
    if d not in (0, n // 2):
        raise PromiseError(f"Hamming distance {d} is neither 0 nor n/2")


def distributed_dj(x, y, rng=None, mode: str = "communication", check_promise: bool = False) -> DdjResult:
    """Decide ``x = y`` versus distance ``n/2`` with ``log n`` qubits.

    ``mode="communication"``: Alice sends ``sum_i (-1)^{x_i}|i>``, Bob applies
    ``(-1)^{y_i}`` and Hadamards and answers "equal" iff he sees ``0``.
    ``mode="nonlocal"``: the parties share ``log n`` EPR pairs, each applies
    their own phases and Hadamards and outputs what they measure; the game
    is won if the outputs agree exactly when ``x = y``.
    Promise violations go unnoticed unless ``check_promise`` is set.
    """
    rng = make_rng(rng)
    xb, yb = _bits(x), _bits(y)
    if len(xb) != len(yb) or len(xb) & (len(xb) - 1):
        raise PromiseError("inputs must have the same power-of-two length")
    if check_promise:
        _check_ddj_promise(xb, yb)
    n = len(xb)
    m = n.bit_length() - 1
    sx, sy = 1.0 - 2.0 * xb, 1.0 - 2.0 * yb
    if mode == "communication":
        amps = (sx * sy).astype(complex) / math.sqrt(n)
        amps = hadamard_all(amps, m) if m else amps
        k = sample_index(np.abs(amps) ** 2, rng)
        return DdjResult("equal" if k == 0 else "far", 0, k)
    if mode == "nonlocal":
        amps = np.diag(sx * sy).astype(complex) / math.sqrt(n)  # |i>_A |i>_B with both phases
        amps = amps.reshape(-1)
        if m:
            amps = hadamard_all(amps, 2 * m)
        k = sample_index(np.abs(amps) ** 2, rng)
        a, b = divmod(k, n)
        return DdjResult("equal" if a == b else "far", a, b)
    raise ValueError(f"unknown mode {mode!r}")


# -- Hadamard locally decodable code ---------------------------------------


def corrupt(codeword: np.ndarray, delta: float, rng=None, positions: Sequence[int] | None = None) -> np.ndarray:
    """Flip ``floor(delta * len)`` positions (random unless ``positions`` is given)."""
    rng = make_rng(rng)
    y = np.array(codeword, dtype=np.int8, copy=True)
    count = int(math.floor(delta * len(y)))
    if positions is None:
        positions = rng.choice(len(y), size=count, replace=False)
    y[np.asarray(positions[:count], dtype=int)] ^= 1
    return y


def ldc_decode(y: np.ndarray, i: int, rng=None) -> int:
    """Recover ``x_i`` from two queries ``y_z`` and ``y_{z xor e_i}``, ``z`` uniform.

    Bit ``i`` counts from the most significant position (``i = 0`` is the
    first bit of ``x``).
    """
    y = np.asarray(y)
    size = len(y)
    n = size.bit_length() - 1
    if size != 1 << n or not 0 <= i < n:
        raise ValueError("bad codeword length or bit index")
    rng = make_rng(rng)
    z = int(rng.integers(size))
    return int(y[z] ^ y[z ^ (1 << (n - 1 - i))])

"""Quantum error correction: Shor's 9-qubit code, a 4-qubit detection code and
classical concatenated repetition codes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .circuit import Circuit, inverse, run_ops
from .numeric import H, X, Z, check_unitary, tensor_all
from .state import (
    ProjectiveMeasurement,
    StateVector,
    apply_gate,
    apply_matrix,
    make_rng,
    measure_computational,
    measure_projective,
)

N_DATA = 9
N_BIT_ANCILLA = 4
N_PHASE_ANCILLA = 2
EXACT_LEVELS = 8


@dataclass(frozen=True)
class Syndrome:
    """``bitflip`` in 0..9 (0 = none, else the 1-based qubit) and
    ``phaseflip`` in 0..3 (0 = none, else the 1-based block)."""

    bitflip: int
    phaseflip: int

    def __post_init__(self):
        if not 0 <= self.bitflip <= 9 or not 0 <= self.phaseflip <= 3:
            raise ValueError("syndrome out of range")


@dataclass
class SingleQubitError:
    """A unitary ``matrix`` acting on the 1-based ``qubit``."""

    qubit: int
    matrix: np.ndarray

    def __post_init__(self):
        if not 1 <= self.qubit <= N_DATA:
            raise ValueError("error position must be in 1..9")
        self.matrix = check_unitary(self.matrix)

    def apply(self, state: StateVector) -> StateVector:
        return apply_gate(state, self.matrix, [self.qubit - 1])


def shor9_encode_circuit() -> Circuit:
    """Encoder acting on ``|q>|0^8>``: spread to block leaders, Hadamard them,
    then spread each leader over its block."""
    c = Circuit(N_DATA).add("CNOT", 0, 3).add("CNOT", 0, 6)
    for lead in (0, 3, 6):
        c.add("H", lead)
    for lead in (0, 3, 6):
        c.add("CNOT", lead, lead + 1).add("CNOT", lead, lead + 2)
    return c


def shor9_encode(q: StateVector) -> StateVector:
    if q.n_qubits != 1:
        raise ValueError("shor9_encode expects a single qubit")
    amps = q.tensor(StateVector.basis(0, 8)).amplitudes
    return StateVector(run_ops(amps, N_DATA, shor9_encode_circuit().ops))


def shor9_decode(state: StateVector) -> StateVector:
    """Run the encoder backwards and return the first qubit.

    Requires a code state (after correction); the other 8 qubits must come
    back to ``|0^8>``.
    """
    amps = run_ops(state.amplitudes, N_DATA, inverse(shor9_encode_circuit()).ops)
    block = amps.reshape(2, 256)
    if np.linalg.norm(block[:, 1:]) > 1e-8:
        raise ValueError("state is not in the code space")
    return StateVector(block[:, 0])


def logical_codewords() -> tuple:
    return shor9_encode(StateVector.basis(0, 1)), shor9_encode(StateVector.basis(1, 1))


def _minority(bits3: np.ndarray) -> np.ndarray:
    """0 if a block is unanimous, else the 1-based position (within the block)
    of the minority bit."""
    b0, b1, b2 = bits3
    out = np.zeros_like(b0)
    out = np.where((b0 != b1) & (b0 != b2), 1, out)
    out = np.where((b1 != b0) & (b1 != b2), 2, out)
    out = np.where((b2 != b0) & (b2 != b1), 3, out)
    return out


def _bitflip_location(data_index: np.ndarray) -> np.ndarray:
    """``e_b`` as a classical function of the 9 data bits (first flagged block wins)."""
    bits = [(data_index >> (N_DATA - 1 - q)) & 1 for q in range(N_DATA)]
    loc = np.zeros_like(data_index)
    for blk in (2, 1, 0):
        m = _minority(np.array(bits[3 * blk: 3 * blk + 3]))
        loc = np.where(m > 0, 3 * blk + m, loc)
    return loc


def syndrome_unitary_apply(amps: np.ndarray) -> np.ndarray:
    """The coherent syndrome map on 9 data qubits + 4 bit-flip + 2 phase ancillas.

    Bit-flip part: ``|x>|c> -> |x>|c xor e_b(x)>`` (a permutation).
    Phase part: for block pairs (1,2) and (2,3) a Hadamard-basis parity check,
    i.e. H on the ancilla, ancilla-controlled ``X`` on all six qubits of the
    pair, H on the ancilla; the ancilla ends in ``|1>`` iff the two blocks'
    relative phases differ.
    """
    n = N_DATA + N_BIT_ANCILLA + N_PHASE_ANCILLA
    t = amps.reshape(1 << N_DATA, 1 << N_BIT_ANCILLA, 1 << N_PHASE_ANCILLA)
    data = np.arange(1 << N_DATA)
    loc = _bitflip_location(data)
    anc = np.arange(1 << N_BIT_ANCILLA)
    out = np.empty_like(t)
    out[data[:, None], anc[None, :] ^ loc[:, None]] = t
    flat = out.reshape(-1)
    full = np.arange(1 << n)
    for p, (blk_a, blk_b) in enumerate([(0, 1), (1, 2)]):
        anc_q = N_DATA + N_BIT_ANCILLA + p
        flat = apply_matrix(flat, n, H, [anc_q])
        mask = 0
        for q in list(range(3 * blk_a, 3 * blk_a + 3)) + list(range(3 * blk_b, 3 * blk_b + 3)):
            mask |= 1 << (n - 1 - q)
        ctrl = (full >> (n - 1 - anc_q)) & 1
        src = np.where(ctrl == 1, full ^ mask, full)
        flat = flat[src]
        flat = apply_matrix(flat, n, H, [anc_q])
    return flat


PHASE_TABLE = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}


def shor9_correct(state: StateVector, rng=None):
    """Extract the syndrome coherently, measure the 6 ancillas and correct.

    Returns ``(Syndrome, corrected 9-qubit state)``.  With more than one
    faulty qubit the returned syndrome is whatever the measurement gives and
    the correction is not guaranteed to restore the logical state.
    """
    if state.n_qubits != N_DATA:
        raise ValueError("expected a 9-qubit state")
    rng = make_rng(rng)
    n_anc = N_BIT_ANCILLA + N_PHASE_ANCILLA
    joint = state.tensor(StateVector.basis(0, n_anc))
    joint = StateVector(syndrome_unitary_apply(joint.amplitudes))
    bits, collapsed = measure_computational(joint, list(range(N_DATA, N_DATA + n_anc)), rng)
    e_b = int("".join(map(str, bits[:N_BIT_ANCILLA])), 2)
    e_p = PHASE_TABLE[tuple(bits[N_BIT_ANCILLA:])]
    anc_index = int("".join(map(str, bits)), 2)
    data = collapsed.amplitudes.reshape(1 << N_DATA, 1 << n_anc)[:, anc_index]
    fixed = StateVector(data / np.linalg.norm(data))
    if e_b > 9:
        e_b = 0  # unreachable for single-qubit errors; leave the data untouched
    if e_b:
        fixed = apply_gate(fixed, X, [e_b - 1])
    if e_p:
        fixed = apply_gate(fixed, Z, [3 * (e_p - 1)])
    return Syndrome(e_b, e_p), fixed


def random_single_qubit_unitary(rng=None) -> np.ndarray:
    """Haar-random 2x2 unitary via QR of a complex Gaussian matrix."""
    rng = make_rng(rng)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- 4-qubit detection code ----------------------------------------------------

DETECT4_CHECKS = {
    "Z1Z2": tensor_all(Z, Z, np.eye(2), np.eye(2)),
    "Z3Z4": tensor_all(np.eye(2), np.eye(2), Z, Z),
    "XXXX": tensor_all(X, X, X, X),
}


def detect4_encode_circuit() -> Circuit:
    return Circuit(4).add("CNOT", 0, 2).add("H", 0).add("H", 2).add("CNOT", 0, 1).add("CNOT", 2, 3)


def detect4_encode(q: StateVector) -> StateVector:
    """``a|0> + b|1> -> a(|00>+|11>)(|00>+|11>)/2 + b(|00>-|11>)(|00>-|11>)/2``."""
    if q.n_qubits != 1:
        raise ValueError("detect4_encode expects a single qubit")
    amps = q.tensor(StateVector.basis(0, 3)).amplitudes
    return StateVector(run_ops(amps, 4, detect4_encode_circuit().ops))


def detect4_check(state: StateVector, rng=None):
    """Measure ``Z1Z2``, ``Z3Z4`` and ``X^{(x)4}``; returns ``(verdict, state)``.

    The verdict is ``"error-detected"`` if any check reads -1, otherwise
    ``"clean"``; a clean code state is left unchanged.
    """
    rng = make_rng(rng)
    flagged = False
    for obs in DETECT4_CHECKS.values():
        pm, values = ProjectiveMeasurement.from_observable(obs)
        j, state = measure_projective(state, pm, rng)
        flagged |= values[j] < 0
    return ("error-detected" if flagged else "clean"), state


# -- classical repetition codes --------------------------------------------


def repetition_step(p: float) -> float:
    """Majority-of-3 failure probability ``3p^2(1-p) + p^3``."""
    return 3 * p * p * (1 - p) + p**3


def repetition_error_rate(p: float, k: int) -> float:
    """Logical error rate after ``k`` levels of concatenated 3-bit repetition.

    The map ``p -> 3p^2(1-p) + p^3`` is iterated in exact rational arithmetic
    on the decimal value of ``p`` and rounded once at the end, so e.g.
    ``(0.1, 1)`` gives exactly ``0.028``.  Beyond ``EXACT_LEVELS`` levels the
    numerators grow too long and plain floats are used.
    """
    if not 0 <= p <= 1 or k < 0:
        raise ValueError("need p in [0, 1] and k >= 0")
    if k <= EXACT_LEVELS:
        x = Fraction(repr(float(p)))
        for _ in range(k):
            x = repetition_step(x)
        return float(x)
    for _ in range(k):
        p = repetition_step(p)
    return p


def repetition_bound(p: float, k: int) -> float:
    """``(3p)^{2^k} / 3``; an upper bound on the iterate when ``p <= 1/3``."""
    bound = (3 * p) ** (2**k) / 3
    if p <= 1 / 3 and repetition_error_rate(p, k) > bound * (1 + 1e-12):
        raise ArithmeticError("iterate exceeds the closed-form bound")
    return bound

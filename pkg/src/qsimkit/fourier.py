"""Quantum Fourier transform, phase estimation, period finding, factoring and
the standard algorithm for Abelian hidden subgroups."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuit import Circuit, GateOp, circuit_unitary, inverse, run_ops
from .classical import best_approx, gcd, is_prime, modexp, perfect_power
from .numeric import DimensionError, check_unitary, log2_exact
from .query import FunctionOracle, PromiseError, RetryLimitError
from .state import StateVector, make_rng, sample_index

# -- QFT circuits --------------------------------------------------------------


def approx_qft_circuit(n: int, max_s: int) -> Circuit:
    """QFT circuit keeping only controlled-``R_s`` rotations with ``s <= max_s``.

    Qubit ``i`` gets a Hadamard followed by ``R_s`` rotations controlled by
    the less significant qubits ``i + s - 1``; the final swaps reverse the
    qubit order.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    if max_s < 1:
        raise ValueError("max_s must be at least 1")
    return Circuit(n, list(_qft_ops(n, min(max_s, n))))


@lru_cache(maxsize=64)
def _qft_ops(n: int, max_s: int) -> tuple:
    # GateOps are immutable, so circuits may share them (and their cached matrices)
    c = Circuit(n)
    for i in range(n):
        c.add("H", i)
        for j in range(i + 1, n):
            s = j - i + 1
            if s <= max_s:
                c.add("CRS", j, i, param=s)
    for i in range(n // 2):
        c.add("SWAP", i, n - 1 - i)
    return tuple(c.ops)


def qft_circuit(n: int) -> Circuit:
    """Exact circuit for ``F_{2^n}``, entries ``omega^{jk} / sqrt(2^n)``."""
    return approx_qft_circuit(n, n)


def qft_distance(n: int, max_s: int, dense_limit: int = 8) -> float:
    """Operator-norm distance between the truncated and exact QFT circuits.

    Small sizes use dense matrices; larger ones find the top eigenvalue of
    ``D* D`` matrix-free with ARPACK, where ``D`` is the circuit difference.
    """
    from .numeric import op_norm_diff

    approx, exact = approx_qft_circuit(n, max_s), qft_circuit(n)
    if n <= dense_limit:
        return op_norm_diff(circuit_unitary(approx), circuit_unitary(exact))
    from scipy.sparse.linalg import LinearOperator, eigsh

    # D = F^{-1} U_approx - I has the same singular values as U_approx - F
    ops = approx.ops + inverse(exact).ops
    d = 1 << n

    def diff(v):
        v = np.asarray(v, dtype=complex).reshape(d, -1)
        return run_ops(v, n, ops) - v

    undo = inverse(Circuit(n, ops)).ops

    def diff_h(v):
        v = np.asarray(v, dtype=complex).reshape(d, -1)
        return run_ops(v, n, undo) - v

    op = LinearOperator((d, d), matvec=lambda v: diff_h(diff(v)).ravel(), dtype=complex)
    w = eigsh(op, k=1, which="LA", return_eigenvectors=False, tol=1e-10, v0=np.ones(d, dtype=complex))
    return float(math.sqrt(max(w[0].real, 0.0)))


# -- phase estimation ----------------------------------------------------------


@dataclass(frozen=True)
class PhaseEstimate:
    bits: str

    @property
    def phase(self) -> float:
        return int(self.bits, 2) / 2 ** len(self.bits) if self.bits else 0.0

    @property
    def value(self) -> int:
        return int(self.bits, 2)


def _controlled_power_ops(u, n_sys: int, control: int, offset: int, power: int):
    """Ops realizing ``|1><1| (x) U^power`` with ``U`` a matrix or a circuit."""
    if isinstance(u, Circuit):
        body = [
            GateOp("CCUSTOM", (control, *[t + offset for t in op.targets]), op.matrix())
            for op in u.ops
        ]
        return body * power
    m = np.linalg.matrix_power(u, power)
    return [GateOp("CCUSTOM", (control, *range(offset, offset + n_sys)), m)]


def _matrix_power_by_squaring(u: np.ndarray, levels: int):
    """``[U, U^2, U^4, ..., U^{2^(levels-1)}]``."""
    out = [u]
    for _ in range(levels - 1):
        out.append(out[-1] @ out[-1])
    return out


def phase_estimation_circuit(u, n_sys: int, n: int) -> Circuit:
    """``n`` ancilla qubits (most significant first) followed by the system."""
    c = Circuit(n + n_sys)
    for q in range(n):
        c.add("H", q)
    if isinstance(u, Circuit):
        for q in range(n):
            c.extend(_controlled_power_ops(u, n_sys, q, n, 2 ** (n - 1 - q)))
    else:
        powers = _matrix_power_by_squaring(u, n)
        for q in range(n):
            c.add("CCUSTOM", q, *range(n, n + n_sys), param=powers[n - 1 - q])
    c.extend(inverse(qft_circuit(n)).ops)
    return c


def phase_distribution(u, eigenstate: StateVector, n: int) -> np.ndarray:
    """Probability of each ``n``-bit outcome of phase estimation."""
    return (np.abs(_phase_estimation_state(u, eigenstate, n)) ** 2).sum(axis=1)


@lru_cache(maxsize=None)
def _inverse_qft_ops(n: int) -> tuple:
    return tuple(inverse(qft_circuit(n)).ops)


def _phase_estimation_state(u, eigenstate: StateVector, n: int) -> np.ndarray:
    """Final joint state, shape ``(2**n, dim)``, before the ancilla measurement."""
    if n < 1:
        raise ValueError("need at least one precision bit")
    n_sys = eigenstate.n_qubits
    if isinstance(u, Circuit):
        if u.n_qubits != n_sys:
            raise DimensionError("circuit width does not match eigenstate")
        mat = circuit_unitary(u)
    else:
        mat = check_unitary(u)
        if mat.shape[0] != eigenstate.dim:
            raise DimensionError("unitary dimension does not match eigenstate")
    psi = eigenstate.amplitudes
    image = mat @ psi
    lam = np.vdot(psi, image)
    if np.linalg.norm(image - lam * psi) > 1e-9:
        raise ValueError("supplied state is not an eigenvector of u")
    # Hadamards on the ancillas, then U^{2^(n-1-q)} on the rows where ancilla q is 1
    amps = np.tile(psi, (1 << n, 1)) / np.sqrt(1 << n)
    rows = np.arange(1 << n)
    powers = None if isinstance(u, Circuit) else _matrix_power_by_squaring(mat, n)
    for q in range(n):
        mask = (rows >> (n - 1 - q)) & 1 == 1
        block = amps[mask]
        if powers is None:
            block = run_ops(block.T, n_sys, u.ops * 2 ** (n - 1 - q)).T
        else:
            block = block @ powers[n - 1 - q].T
        amps[mask] = block
    return run_ops(amps, n, _inverse_qft_ops(n))


def phase_estimate(u, eigenstate: StateVector, n: int, rng=None) -> PhaseEstimate:
    """Estimate ``phi`` in ``U|psi> = exp(2 pi i phi)|psi>`` to ``n`` bits.

    ``u`` may be a unitary matrix (controlled powers by repeated squaring) or
    a :class:`Circuit` (controlled powers by repeated application).
    """
    k = sample_index(phase_distribution(u, eigenstate, n), rng)
    return PhaseEstimate(format(k, f"0{n}b"))


# -- period finding ----------------------------------------------------------


def period_register_bits(N: int) -> int:
    """``l`` with ``N^2 < 2^l <= 2 N^2``."""
    return (N * N).bit_length()


def _as_period_oracle(f, q: int, value_bits: int) -> FunctionOracle:
    if isinstance(f, FunctionOracle):
        if f.table.size != q:
            raise DimensionError(f"oracle domain {f.table.size} differs from q = {q}")
        return f
    return FunctionOracle(np.array([f(a) for a in range(q)]), out_bits=value_bits)


def period_sample(oracle: FunctionOracle, rng) -> int:
    """One run of the period-finding circuit; returns the measured ``b``."""
    ell, m = oracle.in_bits, oracle.out_bits
    q = 1 << ell
    qft = qft_circuit(ell)
    # QFT on |0> is the uniform superposition; apply it through the circuit
    first = np.zeros(q, dtype=complex)
    first[0] = 1
    first = run_ops(first, ell, qft.ops)
    amps = np.zeros((q, 1 << m), dtype=complex)
    amps[:, 0] = first
    amps = oracle.apply(amps.reshape(-1)).reshape(q, 1 << m)
    probs = (np.abs(amps) ** 2).sum(axis=0)
    val = sample_index(probs, rng)
    reg = amps[:, val] / math.sqrt(probs[val])
    reg = run_ops(reg, ell, qft.ops)
    return sample_index(np.abs(reg) ** 2, rng)


@dataclass
class PeriodResult:
    period: int
    attempts: int
    q: int
    samples: list = field(default_factory=list)


def find_period(f, N: int, rng=None, max_attempts: int = 50) -> PeriodResult:
    """Period ``r <= N`` of ``f`` on ``Z_q`` with ``N^2 < q <= 2N^2``.

    ``f`` is a callable or a :class:`FunctionOracle` on ``q`` points.  Each
    attempt measures ``b``, takes the best convergent of ``b/q`` with
    denominator at most ``N``, and keeps its denominator once ``f(r) = f(0)``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(rng)
    ell = period_register_bits(N)
    q = 1 << ell
    value_bits = max(1, (N - 1).bit_length())
    oracle = _as_period_oracle(f, q, value_bits)
    samples = []
    for attempt in range(1, max_attempts + 1):
        b = period_sample(oracle, rng)
        samples.append(b)
        r = best_approx(b, q, N).denominator
        if oracle(r % q) == oracle(0):
            return PeriodResult(r, attempt, q, samples)
    raise RetryLimitError(f"period not found in {max_attempts} attempts")


@dataclass
class ShorResult:
    factor: int
    attempts: int
    used_quantum: bool
    history: list = field(default_factory=list)


def shor_factor(n: int, rng=None, max_attempts: int = 20) -> ShorResult:
    """Nontrivial factor of an odd composite ``n`` that is not a prime power."""
    if n < 3 or n % 2 == 0:
        raise PromiseError(f"{n} is not an odd number >= 3")
    if is_prime(n):
        raise PromiseError(f"{n} is prime")
    pp = perfect_power(n)
    if pp is not None:
        raise PromiseError(f"{n} = {pp[0]}^{pp[1]} is a perfect power")
    rng = make_rng(rng)
    history = []
    for attempt in range(1, max_attempts + 1):
        x = int(rng.integers(2, n))
        g = gcd(x, n)
        if g > 1:
            history.append({"x": x, "gcd": g})
            return ShorResult(g, attempt, False, history)
        r = find_period(lambda a, x=x: modexp(x, a, n), n, rng).period
        entry = {"x": x, "period": r}
        history.append(entry)
        if r % 2:
            continue
        y = modexp(x, r // 2, n)
        if y == n - 1:
            continue
        for cand in (gcd(y - 1, n), gcd(y + 1, n)):
            if 1 < cand < n:
                entry["factor"] = cand
                return ShorResult(cand, attempt, True, history)
    raise RetryLimitError(f"no factor of {n} after {max_attempts} attempts")


# -- Abelian hidden subgroup -------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupSpec:
    """``Z_{N_1} x ... x Z_{N_k}`` with power-of-two cycle sizes."""

    cycles: tuple

    def __post_init__(self):
        cycles = tuple(int(c) for c in self.cycles)
        if not cycles:
            raise ValueError("need at least one cycle")
        for c in cycles:
            if c < 2:
                raise ValueError("cycle sizes must be >= 2")
            log2_exact(c)
        object.__setattr__(self, "cycles", cycles)

    @property
    def bits(self) -> tuple:
        return tuple(log2_exact(c) for c in self.cycles)

    @property
    def order(self) -> int:
        return math.prod(self.cycles)

    def elements(self):
        return list(itertools.product(*(range(c) for c in self.cycles)))

    def index(self, g: Sequence[int]) -> int:
        """Basis index: the components' bit strings concatenated."""
        idx = 0
        for gi, c, b in zip(g, self.cycles, self.bits):
            idx = (idx << b) | (gi % c)
        return idx

    def element(self, index: int) -> tuple:
        out = []
        for c, b in zip(reversed(self.cycles), reversed(self.bits)):
            out.append(index & (c - 1))
            index >>= b
        return tuple(reversed(out))

    def add(self, g, h) -> tuple:
        return tuple((a + b) % c for a, b, c in zip(g, h, self.cycles))

    def character(self, g, h) -> complex:
        """``chi_g(h) = exp(2 pi i sum_i g_i h_i / N_i)``."""
        return complex(np.exp(2j * np.pi * sum(Fraction(a * b, c) for a, b, c in zip(g, h, self.cycles))))

    def subgroup(self, generators) -> list:
        """Elements of the subgroup generated by ``generators``."""
        zero = tuple(0 for _ in self.cycles)
        seen = {zero}
        frontier = [zero]
        while frontier:
            g = frontier.pop()
            for s in generators:
                h = self.add(g, s)
                if h not in seen:
                    seen.add(h)
                    frontier.append(h)
        return sorted(seen)

    def annihilator(self, subgroup) -> list:
        """``H^perp``: labels ``g`` with ``sum_i g_i h_i / N_i`` integral on ``H``."""
        return [
            g
            for g in self.elements()
            if all(sum(Fraction(a * b, c) for a, b, c in zip(g, h, self.cycles)).denominator == 1 for h in subgroup)
        ]


def hiding_oracle(group: AbelianGroupSpec, generators) -> FunctionOracle:
    """Function constant on the cosets of ``<generators>``, distinct across cosets."""
    sub = group.subgroup(generators)
    labels = {}
    table = np.zeros(group.order, dtype=np.int64)
    for g in group.elements():
        rep = min(group.index(group.add(g, h)) for h in sub)
        table[group.index(g)] = labels.setdefault(rep, len(labels))
    return FunctionOracle(table)


def group_qft(group: AbelianGroupSpec) -> Circuit:
    """Tensor product of cyclic QFTs, one per component."""
    total = sum(group.bits)
    c = Circuit(total)
    offset = 0
    for b in group.bits:
        c.extend(qft_circuit(b).shifted(offset, total))
        offset += b
    return c


def abelian_hsp_sample(group: AbelianGroupSpec, f: FunctionOracle, rng=None) -> tuple:
    """One run of the standard algorithm; returns a label ``g`` with ``chi_g`` trivial on ``H``."""
    if f.table.size != group.order:
        raise DimensionError("oracle domain does not match the group order")
    rng = make_rng(rng)
    n = sum(group.bits)
    m = f.out_bits
    amps = np.zeros((group.order, 1 << m), dtype=complex)
    amps[:, 0] = 1 / math.sqrt(group.order)
    amps = f.apply(amps.reshape(-1)).reshape(group.order, 1 << m)
    probs = (np.abs(amps) ** 2).sum(axis=0)
    val = sample_index(probs, rng)
    reg = amps[:, val] / math.sqrt(probs[val])
    reg = run_ops(reg, n, group_qft(group).ops)
    return group.element(sample_index(np.abs(reg) ** 2, rng))

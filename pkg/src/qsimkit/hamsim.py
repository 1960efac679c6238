"""Hamiltonian simulation: product formulas, linear combinations of unitaries,
oblivious amplitude amplification and block-encodings of sparse matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import Circuit, circuit_unitary
from .numeric import (
    DimensionError,
    PauliString,
    as_matrix,
    check_unitary,
    herm_expm,
    householder_prep,
    is_hermitian,
    log2_exact,
    op_norm,
    op_norm_diff,
)
from .state import StateVector, make_rng, sample_index


# -- Pauli Hamiltonians --------------------------------------------------------


@dataclass
class PauliHamiltonian:
    """``H = sum_j c_j P_j`` with real ``c_j`` and Pauli strings ``P_j``."""

    terms: list

    def __post_init__(self):
        terms = []
        for t in self.terms:
            if isinstance(t, tuple):
                t = PauliString(t[0], t[1])
            if abs(complex(t.coefficient).imag) > 1e-12:
                raise ValueError("Pauli coefficients must be real")
            terms.append(PauliString(t.label, float(complex(t.coefficient).real)))
        if not terms:
            raise ValueError("Hamiltonian needs at least one term")
        widths = {t.n_qubits for t in terms}
        if len(widths) != 1:
            raise DimensionError("all Pauli strings must have the same length")
        self.terms = terms

    @classmethod
    def from_dict(cls, d: dict) -> "PauliHamiltonian":
        return cls([PauliString(k, v) for k, v in d.items()])

    @property
    def n_qubits(self) -> int:
        return self.terms[0].n_qubits

    def matrix(self) -> np.ndarray:
        return sum(t.matrix() for t in self.terms)

    def term_matrices(self) -> list:
        return [t.matrix() for t in self.terms]

    def norm(self) -> float:
        return op_norm(self.matrix())

    @property
    def alphas(self) -> np.ndarray:
        """Non-negative LCU weights ``|c_j|``."""
        return np.array([abs(t.coefficient) for t in self.terms])

    def unitaries(self) -> list:
        """``sign(c_j) P_j``, so that ``H = sum_j alpha_j V_j`` with ``alpha_j >= 0``."""
        return [(-1.0 if t.coefficient < 0 else 1.0) * PauliString(t.label).matrix() for t in self.terms]

    def l1_norm(self) -> float:
        return float(self.alphas.sum())


# -- product formula -----------------------------------------------------------


def trotter_simulate(h: PauliHamiltonian, t: float, r: int) -> np.ndarray:
    """``(prod_j exp(i H_j t / r))^r`` with the terms in declaration order."""
    if r < 1:
        raise ValueError("r must be at least 1")
    step = np.eye(1 << h.n_qubits, dtype=complex)
    for term in h.term_matrices():
        step = step @ herm_expm(term, t / r)
    return np.linalg.matrix_power(step, r)


def trotter_error(h: PauliHamiltonian, t: float, r: int) -> float:
    return op_norm_diff(trotter_simulate(h, t, r), herm_expm(h.matrix(), t))


# -- LCU -----------------------------------------------------------------------


@dataclass
class BlockOperator:
    """Matrix-free unitary on ``(ancilla, system)`` amplitude arrays.

    Arrays have shape ``(2**n_ancilla, dim)``; ``apply`` and ``apply_dagger``
    must be exact inverses.
    """

    n_ancilla: int
    dim: int
    apply: Callable[[np.ndarray], np.ndarray]
    apply_dagger: Callable[[np.ndarray], np.ndarray]

    def matrix(self) -> np.ndarray:
        d = (1 << self.n_ancilla) * self.dim
        cols = np.eye(d, dtype=complex).reshape(1 << self.n_ancilla, self.dim, d)
        out = np.stack([self.apply(cols[:, :, c]).reshape(-1) for c in range(d)], axis=1)
        return out


def _as_matrix_list(unitaries) -> np.ndarray:
    mats = [circuit_unitary(u) if isinstance(u, Circuit) else check_unitary(u) for u in unitaries]
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise DimensionError("all unitaries must act on the same space")
    return np.stack(mats)


def lcu_block(unitaries, weights) -> BlockOperator:
    """``(W^{-1} (x) I) select-V (W (x) I)`` with ``W|0> = sum_j sqrt(alpha_j/|alpha|_1)|j>``.

    ``select-V`` is a multiplexer: row ``j`` of the ancilla-indexed array is
    acted on by ``V_j``; padding rows (``j >= m``) are left alone.
    """
    mats = _as_matrix_list(unitaries)
    alpha = np.asarray(weights, dtype=float)
    if alpha.shape != (len(mats),) or np.any(alpha < 0) or alpha.sum() <= 0:
        raise ValueError("weights must be non-negative, one per unitary, not all zero")
    m, dim = len(mats), mats.shape[1]
    a = max(1, math.ceil(math.log2(m))) if m > 1 else 1
    size = 1 << a
    amp = np.zeros(size)
    amp[:m] = np.sqrt(alpha / alpha.sum())
    w = householder_prep(amp)
    w_dag = w.conj().T
    sel = np.concatenate([mats, np.broadcast_to(np.eye(dim), (size - m, dim, dim))])
    sel_dag = np.conj(np.transpose(sel, (0, 2, 1)))

    def apply(amps):
        x = w @ amps
        x = np.einsum("jab,jb->ja", sel, x)
        return w_dag @ x

    def apply_dagger(amps):
        x = w @ amps
        x = np.einsum("jab,jb->ja", sel_dag, x)
        return w_dag @ x

    return BlockOperator(a, dim, apply, apply_dagger)


def lcu_apply(unitaries, weights, state: StateVector, rng=None):
    """Prepare / select / unprepare, then measure the ancilla register.

    Returns ``(success, state)``; on success the state is ``M|psi>``
    normalized, ``M = sum_j alpha_j V_j``, and success has probability
    ``|M psi|^2 / |alpha|_1^2``.
    """
    block = lcu_block(unitaries, weights)
    if state.dim != block.dim:
        raise DimensionError("state does not match the unitaries")
    amps = np.zeros((1 << block.n_ancilla, block.dim), dtype=complex)
    amps[0] = state.amplitudes
    amps = block.apply(amps)
    probs = (np.abs(amps) ** 2).sum(axis=1)
    outcome = sample_index(probs, rng)
    post = amps[outcome] / math.sqrt(probs[outcome])
    return outcome == 0, StateVector(post)


def lcu_success_probability(unitaries, weights, state: StateVector) -> float:
    mats = _as_matrix_list(unitaries)
    alpha = np.asarray(weights, dtype=float)
    m_psi = np.einsum("j,jab,b->a", alpha, mats, state.amplitudes)
    return float(np.linalg.norm(m_psi) ** 2 / alpha.sum() ** 2)


# -- oblivious amplitude amplification --------------------------------------


def _as_block(u, n_ancilla: int, dim: int | None = None) -> BlockOperator:
    if isinstance(u, BlockOperator):
        return u
    mat = circuit_unitary(u) if isinstance(u, Circuit) else check_unitary(u)
    if dim is None:
        dim = mat.shape[0] >> n_ancilla
    if mat.shape[0] != (1 << n_ancilla) * dim:
        raise DimensionError("unitary size does not match ancilla count and state")
    shape = (1 << n_ancilla, dim)
    dag = mat.conj().T
    return BlockOperator(
        n_ancilla,
        dim,
        lambda a: (mat @ a.reshape(-1)).reshape(shape),
        lambda a: (dag @ a.reshape(-1)).reshape(shape),
    )


def oblivious_rounds(theta: float) -> int:
    return max(0, round(math.pi / (4 * theta) - 0.5))


def oblivious_amplify(u, ancilla_count: int, theta: float, state: StateVector, rounds: int | None = None) -> StateVector:
    """Apply ``(-U R U^{-1} R)^k U`` to ``|0^a>|psi>``.

    ``R = (I - 2|0^a><0^a|) (x) I``.  When ``U|0^a>|psi> = sin(theta)|0^a>|phi>
    + cos(theta)|Phi_perp>`` for every ``psi``, the good amplitude becomes
    ``sin((2k+1) theta)``; ``k`` defaults to ``round(pi/(4 theta) - 1/2)``.
    Returns the joint (ancilla, system) state.
    """
    block = _as_block(u, ancilla_count, state.dim)
    k = oblivious_rounds(theta) if rounds is None else rounds
    amps = np.zeros((1 << block.n_ancilla, block.dim), dtype=complex)
    amps[0] = state.amplitudes
    amps = block.apply(amps)
    for _ in range(k):
        amps[0] *= -1  # R negates the ancilla-zero rows
        amps = block.apply_dagger(amps)
        amps[0] *= -1
        amps = -block.apply(amps)
    return StateVector(amps.reshape(-1))


def good_branch(joint: StateVector, ancilla_count: int) -> np.ndarray:
    """The (unnormalized) system vector attached to ancilla ``|0^a>``."""
    return joint.amplitudes.reshape(1 << ancilla_count, -1)[0]


# -- Hamiltonian simulation by truncated Taylor series ---------------------


def taylor_tail(x: float, order: int) -> float:
    """``sum_{k > order} x^k / k!``."""
    term, partial = 1.0, 1.0
    for k in range(1, order + 1):
        term *= x / k
        partial += term
    return max(math.exp(x) - partial, 0.0)


def truncation_order(x: float, tol: float) -> int:
    """Smallest ``K`` whose Taylor tail at ``x = tau |alpha|_1`` is at most ``tol``."""
    k = 0
    while taylor_tail(x, k) > tol:
        k += 1
    return k


def taylor_lcu_terms(h: PauliHamiltonian, tau: float, order: int):
    """Weights ``beta`` and unitaries ``i^k V_{j1} ... V_{jk}`` for ``k <= order``."""
    alphas = h.alphas
    vs = h.unitaries()
    dim = vs[0].shape[0]
    betas, mats = [], []
    for k in range(order + 1):
        coeff = tau**k / math.factorial(k)
        for idx in itertools.product(range(len(vs)), repeat=k):
            prod = np.eye(dim, dtype=complex)
            for j in idx:
                prod = prod @ vs[j]
            betas.append(coeff * math.prod(alphas[j] for j in idx))
            mats.append((1j) ** k * prod)
    return np.array(betas), np.stack(mats)


def exact_amplification_target(s: float):
    """Smallest ``k`` with ``sin(pi / (2(2k+1))) <= 1/s`` and that angle."""
    k = 0
    while math.sin(math.pi / (2 * (2 * k + 1))) > 1 / s + 1e-15:
        k += 1
    return k, math.pi / (2 * (2 * k + 1))


def padded_block(block: BlockOperator, scale: float) -> BlockOperator:
    """Add one ancilla rotated by ``|0> -> c|0> + sqrt(1-c^2)|1>`` (most significant)."""
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    c, s = scale, math.sqrt(max(1 - scale * scale, 0.0))
    rot = np.array([[c, -s], [s, c]])
    half = 1 << block.n_ancilla

    def apply(amps):
        x = amps.reshape(2, half, block.dim)
        x = np.stack([block.apply(x[0]), block.apply(x[1])])
        return np.einsum("ab,bjd->ajd", rot, x).reshape(2 * half, block.dim)

    def apply_dagger(amps):
        x = np.einsum("ab,bjd->ajd", rot.T, amps.reshape(2, half, block.dim))
        x = np.stack([block.apply_dagger(x[0]), block.apply_dagger(x[1])])
        return x.reshape(2 * half, block.dim)

    return BlockOperator(block.n_ancilla + 1, block.dim, apply, apply_dagger)


@dataclass
class HamSimReport:
    blocks: int
    order: int
    rounds: list = field(default_factory=list)
    success_probabilities: list = field(default_factory=list)


def lcu_hamsim(h: PauliHamiltonian, t: float, epsilon: float, state: StateVector, rng=None, report: HamSimReport | None = None) -> StateVector:
    """Approximate ``exp(iHt)|psi>`` by truncated-Taylor LCU blocks.

    Time is cut into ``b = ceil(t |alpha|_1)`` blocks of ``tau = 1/|alpha|_1``
    (the last one shorter).  Each block's series is truncated where the tail
    drops below ``epsilon / (10 b)``; an extra ancilla rotation rescales the
    success amplitude to exactly ``sin(pi/(2(2k+1)))`` so that ``k`` rounds of
    oblivious amplification finish the block deterministically up to the
    truncation error.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if state.n_qubits != h.n_qubits:
        raise DimensionError("state does not match the Hamiltonian")
    if t == 0:
        return state
    rng = make_rng(rng)
    norm1 = h.l1_norm()
    b = math.ceil(t * norm1 - 1e-12)
    tau = 1 / norm1
    order = truncation_order(1.0, epsilon / (10 * b))
    if report is not None:
        report.blocks, report.order = b, order
    psi = state
    for i in range(b):
        dt = tau if i < b - 1 else t - (b - 1) * tau
        betas, mats = taylor_lcu_terms(h, dt, order)
        s = betas.sum()
        k, angle = exact_amplification_target(s)
        block = padded_block(lcu_block(mats, betas), math.sin(angle) * s)
        joint = oblivious_amplify(block, block.n_ancilla, angle, psi, rounds=k)
        amps = joint.amplitudes.reshape(1 << block.n_ancilla, -1)
        probs = (np.abs(amps) ** 2).sum(axis=1)
        if report is not None:
            report.rounds.append(k)
            report.success_probabilities.append(float(probs[0]))
        if sample_index(probs, rng) != 0:
            raise RuntimeError("oblivious amplification left the good subspace")
        psi = StateVector(amps[0] / np.linalg.norm(amps[0]))
    return psi


# -- sparse block-encoding -----------------------------------------------------


class SparseMatrixOracle:
    """Sparse access to a Hermitian ``2^n x 2^n`` matrix with exactly ``s``
    nonzeros per column and operator norm at most 1.

    ``entry_queries`` counts uses of ``O_A`` or its inverse and
    ``loc_queries`` counts uses of ``O_{A,loc}`` or its inverse.
    """

    def __init__(self, matrix, s: int | None = None):
        a = as_matrix(matrix)
        self.n_qubits = log2_exact(a.shape[0])
        if not is_hermitian(a):
            raise ValueError("sparse matrix must be Hermitian")
        counts = {int(c) for c in (np.abs(a) > 1e-15).sum(axis=0)}
        if len(counts) != 1:
            raise ValueError(f"columns have differing nonzero counts {sorted(counts)}")
        self.s = counts.pop()
        if s is not None and s != self.s:
            raise ValueError(f"matrix is {self.s}-sparse, not {s}-sparse")
        if op_norm(a) > 1 + 1e-9:
            raise ValueError("operator norm exceeds 1")
        self._a = a
        self._loc = [np.flatnonzero(np.abs(a[:, j]) > 1e-15) for j in range(a.shape[0])]
        self.entry_queries = 0
        self.loc_queries = 0

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def entry(self, i: int, j: int) -> complex:
        return complex(self._a[i, j])

    def location(self, j: int, ell: int) -> int:
        """``nu(j, ell)``: row of the ``ell``-th nonzero in column ``j``."""
        return int(self._loc[j][ell])

    def loc_unitary(self) -> np.ndarray:
        """``|ell>_R |j>_C -> |nu(j, ell)>_R |j>_C`` completed to a permutation."""
        self.loc_queries += 1
        d = self.dim
        perm = np.zeros((d * d, d * d))
        for j in range(d):
            rows = list(self._loc[j])
            rest = [r for r in range(d) if r not in set(rows)]
            targets = rows + rest
            for ell in range(d):
                perm[targets[ell] * d + j, ell * d + j] = 1
        return perm

    def entry_rotation(self) -> np.ndarray:
        """``|0>|k,j> -> A_kj|0>|k,j> + sqrt(1-|A_kj|^2)|1>|k,j>``.

        Realized as write-entry, controlled rotation, erase-entry, so it
        costs one ``O_A`` and one ``O_A^{-1}`` query.
        """
        self.entry_queries += 2
        d = self.dim
        a = self._a.reshape(-1)  # index k * d + j
        b = np.sqrt(np.clip(1 - np.abs(a) ** 2, 0, None))
        dd = d * d
        u = np.zeros((2 * dd, 2 * dd), dtype=complex)
        idx = np.arange(dd)
        u[idx, idx] = a
        u[dd + idx, idx] = b
        u[idx, dd + idx] = -b
        u[dd + idx, dd + idx] = a.conj()
        return u


def block_encode_sparse(a: SparseMatrixOracle) -> np.ndarray:
    """``U = W3^{-1} W2 W1`` on ``(ancilla, R, C)`` with top-left block ``A / s``.

    ``W1`` puts a uniform superposition over ``ell < s`` in ``R`` and calls
    ``O_loc``; ``W3`` is ``W1`` followed by swapping ``R`` and ``C``;
    ``W2`` rotates the ancilla by the entry ``A_kj``.  The block is read off
    at ancilla ``0`` and ``R = 0^n``, which are the first ``2^n`` indices.
    """
    d = a.dim
    uni = np.zeros(d)
    uni[: a.s] = 1 / math.sqrt(a.s)
    prep = np.kron(householder_prep(uni), np.eye(d))
    w1_rc = a.loc_unitary() @ prep
    swap = np.eye(d * d)[[c * d + r for r in range(d) for c in range(d)]]
    w3_rc = swap @ a.loc_unitary() @ prep
    w1 = np.kron(np.eye(2), w1_rc)
    w3 = np.kron(np.eye(2), w3_rc)
    w2 = a.entry_rotation()
    return w3.conj().T @ w2 @ w1


def random_sparse_hermitian(n: int, s: int, rng=None) -> np.ndarray:
    """Random Hermitian ``2^n`` matrix with exactly ``s in {1, 2}`` nonzeros per column, norm <= 1."""
    rng = make_rng(rng)
    d = 1 << n
    if s == 1:
        a = np.diag(rng.uniform(0.2, 1, d) * rng.choice([-1, 1], d)).astype(complex)
    elif s == 2:
        perm = rng.permutation(d)
        a = np.zeros((d, d), dtype=complex)
        for i in range(0, d, 2):
            x, y = perm[i], perm[i + 1]
            a[x, y] = rng.uniform(0.2, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            a[y, x] = np.conj(a[x, y])
        a += np.diag(rng.uniform(0.2, 1, d) * rng.choice([-1, 1], d))
    else:
        raise ValueError("only s in {1, 2} is supported")
    return a / max(op_norm(a), 1.0)

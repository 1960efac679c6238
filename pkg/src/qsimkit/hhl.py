"""Basic HHL linear-system solver on a dense simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import circuit_unitary, inverse
from .fourier import qft_circuit
from .hamsim import PauliHamiltonian
from .numeric import (
    H,
    DimensionError,
    as_matrix,
    herm_eig,
    herm_expm,
    householder_prep,
    is_hermitian,
    tensor_all,
)
from .state import StateVector, make_rng, sample_index


class ConditioningError(ValueError):
    """The matrix violates the eigenvalue or phase-representability promise."""


@dataclass
class HhlReport:
    """Diagnostics of one ``hhl_solve`` call."""

    rounds: int = 0
    kappa_hat: float = 0.0
    success_probability: float = 0.0
    attempts: int = 0


def decode_eigenvalue(k: int, n_p: int, t: float) -> float:
    """Eigenvalue encoded by the phase-register value ``k`` of ``exp(iAt)``.

    Phases below 1/2 are positive eigenvalues, the rest wrap to negative ones.
    """
    phi = k / (1 << n_p)
    return 2 * math.pi * (phi if phi < 0.5 else phi - 1) / t


def check_representable(a: np.ndarray, kappa: float, n_p: int, t: float, tol: float = 1e-9) -> np.ndarray:
    """Return the eigenvalues, raising if they are outside ``±[1/kappa, 1]`` or
    if ``exp(iAt)`` has eigenphases that are not exact ``n_p``-bit fractions."""
    lam = herm_eig(a)[0]
    if np.any(np.abs(lam) < 1 / kappa - tol) or np.any(np.abs(lam) > 1 + tol):
        raise ConditioningError(f"eigenvalues {lam} are not in ±[1/kappa, 1] for kappa={kappa}")
    scaled = lam * t / (2 * math.pi) * (1 << n_p)
    if np.any(np.abs(scaled - np.round(scaled)) > 1e-7):
        raise ConditioningError("eigenphases of exp(iAt) are not exact n_p-bit fractions")
    if np.any(np.abs(scaled) >= (1 << (n_p - 1)) - 1e-9):
        raise ConditioningError("eigenphase wraps past 1/2; increase n_p or lower t")
    return lam


def phase_estimation_unitary(u: np.ndarray, n_p: int) -> np.ndarray:
    """``(QFT^{-1} (x) I) sum_k |k><k| (x) U^k (H^n (x) I)`` on (phase, system)."""
    dim = u.shape[0]
    size = 1 << n_p
    powers = np.empty((size, dim, dim), dtype=complex)
    powers[0] = np.eye(dim)
    for k in range(1, size):
        powers[k] = powers[k - 1] @ u
    hadamards = tensor_all(*([H] * n_p))
    controlled = np.zeros((size * dim, size * dim), dtype=complex)
    for k in range(size):
        controlled[k * dim:(k + 1) * dim, k * dim:(k + 1) * dim] = powers[k]
    iqft = circuit_unitary(inverse(qft_circuit(n_p)))
    return np.kron(iqft, np.eye(dim)) @ controlled @ np.kron(hadamards, np.eye(dim))


def rotation_unitary(kappa: float, n_p: int, t: float, dim: int) -> np.ndarray:
    """Ancilla rotation ``|0> -> c|0> + sqrt(1-c^2)|1>`` with ``c = 1/(kappa lambda_k)``,
    controlled on the phase register; ancilla is the most significant qubit."""
    size = 1 << n_p
    block = size * dim
    u = np.zeros((2 * block, 2 * block))
    for k in range(size):
        lam = decode_eigenvalue(k, n_p, t)
        c = 1 / (kappa * lam) if k and abs(kappa * lam) >= 1 - 1e-12 else 1.0
        c = max(-1.0, min(1.0, c))
        s = math.sqrt(1 - c * c)
        rows = np.arange(k * dim, (k + 1) * dim)
        u[rows, rows] = c
        u[block + rows, rows] = s
        u[rows, block + rows] = -s
        u[block + rows, block + rows] = c
    return u


def hhl_solve(a, b: StateVector, kappa: float, n_p: int, rng=None, t: float = 1.0, max_attempts: int = 50, report: HhlReport | None = None) -> StateVector:
    """Return (an approximation of) ``A^{-1}|b>`` normalized.

    Runs phase estimation on ``exp(iAt)``, rotates an ancilla by
    ``1/(kappa lambda)``, uncomputes the phase register and amplifies the
    ancilla-0 branch for ``round(pi / (4 theta) - 1/2)`` rounds, where
    ``sin(theta) = 1/kappa_hat`` is the good-branch amplitude read off the
    simulated state; this keeps the final success probability at least 1/2.
    The ancilla is then measured and the whole procedure repeated on failure.
    """
    mat = a.matrix() if isinstance(a, PauliHamiltonian) else as_matrix(a)
    if not is_hermitian(mat):
        raise ConditioningError("A must be Hermitian")
    dim = mat.shape[0]
    if b.dim != dim:
        raise DimensionError("b does not match A")
    if kappa < 1:
        raise ConditioningError("kappa must be at least 1")
    rng = make_rng(rng)
    check_representable(mat, kappa, n_p, t)

    size = 1 << n_p
    block = size * dim
    pe = phase_estimation_unitary(herm_expm(mat, t), n_p)
    pe2 = np.kron(np.eye(2), pe)
    prep_b = np.kron(np.eye(2 * size), householder_prep(b.amplitudes))
    prep = pe2.conj().T @ rotation_unitary(kappa, n_p, t, dim) @ pe2 @ prep_b
    prep_dag = prep.conj().T

    start = prep[:, 0]
    good = np.zeros(2 * block, dtype=bool)
    good[:dim] = True  # ancilla 0 and phase register 0
    amp = float(np.linalg.norm(start[good]))
    if amp < 1e-12:
        raise ConditioningError("good branch has zero amplitude")
    theta = math.asin(min(amp, 1.0))
    rounds = max(0, round(math.pi / (4 * theta) - 0.5))
    state = start.copy()
    for _ in range(rounds):
        state[good] *= -1
        state = prep_dag @ state
        state[0] *= -1
        state = -(prep @ state)
    probs = np.abs(state) ** 2
    p_good = float(probs[good].sum())
    if report is not None:
        report.rounds = rounds
        report.kappa_hat = 1 / amp
        report.success_probability = p_good
    branch = np.array([probs[good].sum(), probs[~good].sum()])
    for attempt in range(1, max_attempts + 1):
        if sample_index(branch, rng) == 0:
            if report is not None:
                report.attempts = attempt
            x = state[:dim]
            return StateVector(x / np.linalg.norm(x))
    raise RuntimeError("HHL failed to post-select the ancilla")

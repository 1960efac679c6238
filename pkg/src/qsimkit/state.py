"""State vectors, density matrices and measurement.

Qubit ``0`` is the most significant bit of a basis index, so the basis state
``|b0 b1 ... b_{n-1}>`` has index ``int("b0b1...", 2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .numeric import (
    DimensionError,
    as_matrix,
    herm_eig,
    is_hermitian,
    is_unitary,
    log2_exact,
    symmetrize,
)

MAX_QUBITS = 26
NORM_TOL = 1e-9
PROB_FLOOR = 1e-12


class CapacityError(ValueError):
    """Requested register is larger than the simulator accepts."""


def make_rng(seed=None) -> np.random.Generator:
    """Seeded ``numpy`` generator; passes an existing generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")


def sample_index(probs, rng) -> int:
    """Inverse-CDF sampling from unnormalized weights with one uniform draw."""
    p = np.asarray(probs, dtype=float).copy()
    p[p < PROB_FLOOR] = 0.0
    total = p.sum()
    if total <= 0:
        raise ValueError("no outcome has non-negligible probability")
    cdf = np.cumsum(p)
    u = make_rng(rng).random() * total
    idx = int(np.searchsorted(cdf, u, side="right"))
    # u can equal cdf[-1] only through rounding
    idx = min(idx, len(p) - 1)
    while p[idx] == 0.0:
        idx -= 1
    return idx


# -- gate kernel -------------------------------------------------------------


def apply_matrix(amps: np.ndarray, n: int, gate: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a ``2**k`` gate to ``targets`` of an amplitude array.

    ``amps`` has shape ``(2**n, *batch)``; trailing axes are carried along,
    which lets a whole matrix be pushed through a circuit at once.  The
    update contracts only the target axes, costing ``O(2**n * 2**k)``.
    """
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate targets {tuple(targets)}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} qubits")
    if gate.shape != (1 << k, 1 << k):
        raise DimensionError(f"gate of shape {gate.shape} does not act on {k} qubits")
    batch = amps.shape[1:]
    psi = amps.reshape((2,) * n + batch)
    g = gate.reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the k output axes first; move them back into place
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(amps.shape)


def apply_local_diagonal(amps: np.ndarray, n: int, diag: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Fast path for a diagonal ``2**k`` gate: broadcast multiply, no contraction."""
    k = len(targets)
    shape = [1] * n
    for t in targets:
        shape[t] = 2
    # diag is indexed by the target bits in target order; lay it out on the axes
    d = np.asarray(diag).reshape((2,) * k)
    d = np.moveaxis(d, list(range(k)), list(np.argsort(np.argsort(targets))))
    d = d.reshape(shape)
    batch = amps.shape[1:]
    out = amps.reshape((2,) * n + batch) * d.reshape(shape + [1] * len(batch))
    return out.reshape(amps.shape)


def _bit(index: np.ndarray | int, q: int, n: int):
    return (index >> (n - 1 - q)) & 1


# -- state vector ------------------------------------------------------------


@dataclass
class StateVector:
    """Normalized amplitudes of an ``n``-qubit pure state."""

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = log2_exact(a.size)
        check_capacity(n)
        norm = np.linalg.norm(a)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state has norm {norm}, expected 1")
        self.amplitudes = a
        self.n_qubits = n

    @classmethod
    def basis(cls, index: int, n: int) -> "StateVector":
        check_capacity(n)
        a = np.zeros(1 << n, dtype=complex)
        a[index] = 1
        return cls(a)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        return cls.basis(int(bits, 2), len(bits))

    @classmethod
    def from_unnormalized(cls, vec) -> "StateVector":
        v = np.asarray(vec, dtype=complex).ravel()
        return cls(v / np.linalg.norm(v))

    @classmethod
    def random(cls, n: int, rng=None) -> "StateVector":
        rng = make_rng(rng)
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return cls.from_unnormalized(v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2

    def equiv(self, other: "StateVector", tol: float = 1e-9) -> bool:
        """Equality up to global phase."""
        return self.dim == other.dim and abs(abs(self.inner(other)) - 1) <= tol

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> str:
        return json.dumps(
            {
                "qubit_count": self.n_qubits,
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        obj = json.loads(text)
        amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
        st = cls(amps)
        if st.n_qubits != obj["qubit_count"]:
            raise DimensionError("qubit_count does not match amplitude count")
        return st


def apply_gate(state: StateVector, gate, targets: Sequence[int]) -> StateVector:
    """Return ``(gate on targets (x) identity) |state>``."""
    g = as_matrix(gate)
    if not is_unitary(g):
        raise ValueError("gate is not unitary")
    out = apply_matrix(state.amplitudes, state.n_qubits, g, list(targets))
    return StateVector(out)


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Born distribution of the listed qubits, indexed MSB-first in list order."""
    n = state.n_qubits
    p = state.probabilities().reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in qubits)
    m = p.sum(axis=rest) if rest else p
    # sum keeps remaining axes in ascending order; reorder to the requested order
    order = sorted(qubits)
    m = np.transpose(m, [order.index(q) for q in qubits])
    return m.reshape(-1)


def measure_computational(state: StateVector, qubits: Sequence[int], rng=None):
    """Measure ``qubits`` in the computational basis.

    Returns ``(outcome, collapsed_state)`` where ``outcome`` is a tuple of
    bits in the order of ``qubits``.
    """
    qubits = list(qubits)
    if not qubits:
        raise ValueError("need at least one qubit to measure")
    n = state.n_qubits
    probs = marginal_probabilities(state, qubits)
    k = sample_index(probs, rng)
    bits = tuple((k >> (len(qubits) - 1 - i)) & 1 for i in range(len(qubits)))
    idx = np.arange(state.dim)
    keep = np.ones(state.dim, dtype=bool)
    for q, b in zip(qubits, bits):
        keep &= _bit(idx, q, n) == b
    amps = np.where(keep, state.amplitudes, 0)
    amps = amps / np.sqrt(probs[k])
    return bits, StateVector(amps)


def measure_all(state: StateVector, rng=None) -> int:
    return sample_index(state.probabilities(), rng)


# -- general measurements ----------------------------------------------------


@dataclass
class ProjectiveMeasurement:
    projectors: list

    def __post_init__(self):
        ps = [as_matrix(p) for p in self.projectors]
        if not ps:
            raise ValueError("empty measurement")
        d = ps[0].shape[0]
        for i, p in enumerate(ps):
            if p.shape != (d, d) or np.max(np.abs(p @ p - p)) > 1e-9 or not is_hermitian(p):
                raise ValueError(f"element {i} is not a projector")
        if np.max(np.abs(sum(ps) - np.eye(d))) > 1e-9:
            raise ValueError("projectors do not sum to identity")
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if np.max(np.abs(ps[i] @ ps[j])) > 1e-9:
                    raise ValueError(f"projectors {i} and {j} are not orthogonal")
        self.projectors = ps

    @classmethod
    def from_observable(cls, observable, decimals: int = 9) -> tuple["ProjectiveMeasurement", np.ndarray]:
        """Eigenprojectors of a Hermitian matrix, with their eigenvalues (descending)."""
        w, v = herm_eig(observable)
        keys = np.round(w, decimals)
        values = sorted(set(keys.tolist()), reverse=True)
        projs = []
        for val in values:
            cols = v[:, keys == val]
            projs.append(cols @ cols.conj().T)
        return cls(projs), np.array(values)

    @classmethod
    def basis(cls, vectors) -> "ProjectiveMeasurement":
        return cls([np.outer(v, np.conj(v)) for v in vectors])

    def probabilities(self, state: StateVector) -> np.ndarray:
        a = state.amplitudes
        return np.array([np.vdot(a, p @ a).real for p in self.projectors])


def measure_projective(state: StateVector, m: ProjectiveMeasurement, rng=None):
    """Return ``(index, P_j|phi> / ||P_j|phi>||)``."""
    if m.projectors[0].shape[0] != state.dim:
        raise DimensionError("measurement does not match state dimension")
    probs = m.probabilities(state)
    j = sample_index(probs, rng)
    post = m.projectors[j] @ state.amplitudes
    return j, StateVector(post / np.linalg.norm(post))


@dataclass
class Povm:
    elements: list

    def __post_init__(self):
        es = [as_matrix(e) for e in self.elements]
        if not es:
            raise ValueError("empty POVM")
        d = es[0].shape[0]
        for i, e in enumerate(es):
            if e.shape != (d, d) or not is_hermitian(e) or np.linalg.eigvalsh(symmetrize(e))[0] < -1e-9:
                raise ValueError(f"element {i} is not positive semidefinite")
        if np.max(np.abs(sum(es) - np.eye(d))) > 1e-9:
            raise ValueError("POVM elements do not sum to identity")
        self.elements = es

    def probabilities(self, state: StateVector) -> np.ndarray:
        a = state.amplitudes
        return np.array([max(np.vdot(a, e @ a).real, 0.0) for e in self.elements])


def sample_povm(state: StateVector, p: Povm, rng=None) -> int:
    if p.elements[0].shape[0] != state.dim:
        raise DimensionError("POVM does not match state dimension")
    return sample_index(p.probabilities(state), rng)


def expectation(state: StateVector, observable) -> float:
    m = as_matrix(observable)
    if m.shape != (state.dim, state.dim):
        raise DimensionError("observable does not match state dimension")
    m = symmetrize(m)
    return float(np.vdot(state.amplitudes, m @ state.amplitudes).real)


# -- mixed states ------------------------------------------------------------


@dataclass
class DensityMatrix:
    matrix: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        n = log2_exact(m.shape[0])
        if m.shape[0] != m.shape[1]:
            raise DimensionError("density matrix must be square")
        m = symmetrize(m)
        if abs(np.trace(m).real - 1) > 1e-9:
            raise ValueError("density matrix must have unit trace")
        if np.linalg.eigvalsh(m)[0] < -1e-9:
            raise ValueError("density matrix must be positive semidefinite")
        self.matrix = m
        self.n_qubits = n

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        return cls(sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states)))

    def eigenvalues(self) -> np.ndarray:
        return herm_eig(self.matrix)[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep`` (ascending qubit order)."""
    n = rho.n_qubits
    keep = sorted(set(keep))
    if not keep or len(keep) == n:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if any(not 0 <= q < n for q in keep):
        raise ValueError("qubit index out of range")
    drop = [q for q in range(n) if q not in keep]
    t = rho.matrix.reshape((2,) * (2 * n))
    # trace out dropped qubits from highest to lowest so axis numbers stay valid
    cur = n
    for q in sorted(drop, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + cur)
        cur -= 1
    d = 1 << len(keep)
    return DensityMatrix(t.reshape(d, d))


def schmidt(state: StateVector, split: int, tol: float = 1e-10):
    """Schmidt decomposition across the first ``split`` qubits.

    Diagonalizes the reduced state of side A; each B vector is
    ``(<a_i| (x) I)|psi> / lambda_i`` with ``lambda_i`` the norm of that
    projection.  Returns ``(lambdas, a_vectors,
    b_vectors)`` with vectors as rows.
    """
    n = state.n_qubits
    if not 1 <= split < n:
        raise ValueError(f"split must be in [1, {n - 1}]")
    da, db = 1 << split, 1 << (n - split)
    m = state.amplitudes.reshape(da, db)
    rho_a = m @ m.conj().T
    w, v = herm_eig(rho_a)
    lambdas, avecs, bvecs = [], [], []
    for vec in v.T:
        # |(<a_i| x I)psi| equals sqrt(w_i) but stays accurate to machine
        # precision when w_i is tiny, where sqrt(w_i) would amplify rounding
        b = vec.conj() @ m
        lam = np.linalg.norm(b)
        if lam <= tol:
            continue
        lambdas.append(lam)
        avecs.append(vec)
        bvecs.append(b / lam)
    return np.array(lambdas), np.array(avecs), np.array(bvecs)


def state_distance(a: StateVector, b: StateVector) -> float:
    """Euclidean distance between amplitude vectors."""
    if a.dim != b.dim:
        raise DimensionError("state dimensions differ")
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def total_variation(a: StateVector, b: StateVector) -> float:
    """Total variation distance between the two Born distributions."""
    if a.dim != b.dim:
        raise DimensionError("state dimensions differ")
    return float(0.5 * np.sum(np.abs(a.probabilities() - b.probabilities())))

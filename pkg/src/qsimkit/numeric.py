"""Dense complex linear algebra used throughout the toolkit.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The helpers here
cover tensor products, the Pauli basis, Hermitian eigendecomposition and
exponentials, and operator-norm distances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


class DimensionError(ValueError):
    """Raised when a matrix or vector has an unusable shape."""


class NotHermitianError(ValueError):
    pass


class NotUnitaryError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def log2_exact(d: int) -> int:
    """Return k with 2**k == d, or raise DimensionError."""
    if d < 1 or d & (d - 1):
        raise DimensionError(f"dimension {d} is not a power of two")
    return d.bit_length() - 1


def tensor(a, b) -> np.ndarray:
    """Kronecker product with block layout ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(*mats) -> np.ndarray:
    return reduce(tensor, mats)


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(a)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(u)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])), initial=0.0) <= tol


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    m = as_matrix(u)
    if not is_unitary(m, tol):
        raise NotUnitaryError("matrix is not unitary within tolerance")
    return m


def symmetrize(h) -> np.ndarray:
    """Validate Hermiticity and return ``(h + h*) / 2``."""
    m = as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return (m + m.conj().T) / 2


# -- Pauli basis -------------------------------------------------------------


@dataclass(frozen=True)
class PauliString:
    """A weighted tensor product of single-qubit Paulis, e.g. ``0.5 * XZ``."""

    label: str
    coefficient: complex = 1.0

    def __post_init__(self):
        if not self.label or any(c not in PAULI for c in self.label):
            raise ValueError(f"invalid Pauli label {self.label!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.label)

    def matrix(self) -> np.ndarray:
        return self.coefficient * tensor_all(*(PAULI[c] for c in self.label))


def pauli_labels(k: int) -> list[str]:
    """All ``4**k`` labels in lexicographic I < X < Y < Z order."""
    return ["".join(p) for p in itertools.product("IXYZ", repeat=k)]


def pauli_decompose(a) -> np.ndarray:
    """Coefficients ``alpha_P`` with ``a = sum_P alpha_P P`` over all Pauli strings.

    Uses the normalized Hilbert-Schmidt inner product ``Tr(P* A) / d``; the
    ordering matches :func:`pauli_labels`.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("pauli_decompose needs a square matrix")
    k = log2_exact(m.shape[0])
    d = m.shape[0]
    return np.array(
        [np.trace(PauliString(lab).matrix().conj().T @ m) / d for lab in pauli_labels(k)]
    )


# -- Hermitian eigenproblem --------------------------------------------------


def jacobi_eigh(h, tol: float = 1e-13, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Each rotation zeroes one off-diagonal pair; sweeps stop once the
    off-diagonal Frobenius norm falls below ``tol`` (relative to the
    matrix norm).  Returns ``(eigenvalues descending, eigenvector columns)``.
    """
    a = symmetrize(h).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # phase-rotate so the pivot is real, then do a real Jacobi rotation
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2 * abs(apq))
                if tau == 0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 1 / (2 * tau)  # sqrt(1 + tau^2) would overflow
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]], dtype=complex)
                cols = a[:, [p, q]] @ rot
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = rot.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                vc = v[:, [p, q]] @ rot
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def herm_eig(h, method: str = "lapack"):
    """Eigenvalues (descending) and orthonormal eigenvector columns of ``h``.

    ``method="jacobi"`` uses :func:`jacobi_eigh`; the default defers to
    LAPACK, which is much faster beyond a few dozen dimensions.
    """
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    m = symmetrize(h)
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def herm_expm(h, t: float = 1.0) -> np.ndarray:
    """``exp(i h t)`` via the eigendecomposition of Hermitian ``h``."""
    w, v = herm_eig(h)
    return (v * np.exp(1j * w * t)) @ v.conj().T


def op_norm(a) -> float:
    m = as_matrix(a)
    w, _ = herm_eig(m.conj().T @ m)
    return float(np.sqrt(max(w[0], 0.0)))


def op_norm_diff(a, b) -> float:
    """Largest singular value of ``a - b``."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"shape mismatch {ma.shape} vs {mb.shape}")
    return op_norm(ma - mb)


def householder_prep(target) -> np.ndarray:
    """Unitary whose first column is the normalized vector ``target``.

    Built as a Householder reflection.  When ``target[0]`` is real and
    non-negative the result is Hermitian and therefore its own inverse;
    otherwise the phase of ``target[0]`` is applied globally.
    """
    v = np.asarray(target, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1) > 1e-9:
        raise ValueError("target must be normalized")
    d = v.size
    ph = v[0] / abs(v[0]) if abs(v[0]) > 1e-15 else 1.0
    w = -v / ph
    w[0] += 1
    wn = np.linalg.norm(w)
    if wn < 1e-14:
        return ph * np.eye(d, dtype=complex)
    w /= wn
    return ph * (np.eye(d, dtype=complex) - 2 * np.outer(w, w.conj()))

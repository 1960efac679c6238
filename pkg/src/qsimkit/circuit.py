"""Gate catalog, circuits, simulation and path-sum amplitudes.

Text format, one operation per line (``#`` starts a comment)::

    QUBITS 3
    H 0
    CNOT 0 1
    RPHI 2 0.7853981633974483
    TOFFOLI 0 1 2

Qubit indices are 0-based; index 0 is the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .numeric import H, X, Y, Z, DimensionError, check_unitary, dagger, log2_exact
from .state import StateVector, apply_local_diagonal, apply_matrix, check_capacity

S_GATE = np.diag([1, 1j]).astype(complex)
T_GATE = np.diag([1, np.exp(1j * np.pi / 4)])


def r_phi(phi: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * phi)])


def r_s(s: int) -> np.ndarray:
    """``diag(1, exp(2 pi i / 2**s))``."""
    return r_phi(2 * np.pi / 2**s)


def controlled(u) -> np.ndarray:
    """Block-diagonal ``[[I, 0], [0, U]]``; the control is the first qubit."""
    m = check_unitary(u)
    d = m.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = m
    return out


CNOT = controlled(X)
CZ = controlled(Z)
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
TOFFOLI = controlled(CNOT)

_FIXED = {
    "H": (H, 1),
    "X": (X, 1),
    "Y": (Y, 1),
    "Z": (Z, 1),
    "S": (S_GATE, 1),
    "T": (T_GATE, 1),
    "CNOT": (CNOT, 2),
    "CZ": (CZ, 2),
    "SWAP": (SWAP, 2),
    "TOFFOLI": (TOFFOLI, 3),
}
_SELF_INVERSE = {"H", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "TOFFOLI"}
# kinds taking a numeric parameter, with their arity
_PARAM = {"RPHI": 1, "RS": 1, "CRPHI": 2, "CRS": 2}


@dataclass(frozen=True, eq=False)
class GateOp:
    """One gate application.

    ``kind`` is a catalog name, ``"CUSTOM"`` (``param`` holds the matrix) or
    ``"CCUSTOM"`` (the first target controls the custom matrix on the rest).
    """

    kind: str
    targets: tuple
    param: object = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{kind}: duplicate targets {self.targets}")
        if kind in _FIXED:
            arity = _FIXED[kind][1]
        elif kind in _PARAM:
            arity = _PARAM[kind]
            if self.param is None:
                raise ValueError(f"{kind} needs a parameter")
            if kind in ("RS", "CRS"):
                object.__setattr__(self, "param", int(self.param))
            else:
                object.__setattr__(self, "param", float(self.param))
        elif kind in ("CUSTOM", "CCUSTOM"):
            m = check_unitary(self.param)
            object.__setattr__(self, "param", m)
            arity = log2_exact(m.shape[0]) + (kind == "CCUSTOM")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != arity:
            raise ValueError(f"{kind} acts on {arity} qubits, got targets {self.targets}")

    def matrix(self) -> np.ndarray:
        m = self.__dict__.get("_matrix")
        if m is None:
            m = self._build_matrix()
            m.setflags(write=False)
            object.__setattr__(self, "_matrix", m)
            object.__setattr__(self, "_diagonal", bool(np.all(m == np.diag(np.diag(m)))))
        return m

    @property
    def is_diagonal(self) -> bool:
        self.matrix()
        return self.__dict__["_diagonal"]

    def _build_matrix(self) -> np.ndarray:
        k = self.kind
        if k in _FIXED:
            return _FIXED[k][0]
        if k == "RPHI":
            return r_phi(self.param)
        if k == "RS":
            return r_s(self.param)
        if k == "CRPHI":
            return controlled(r_phi(self.param))
        if k == "CRS":
            return controlled(r_s(self.param))
        if k == "CUSTOM":
            return self.param.copy()
        return controlled(self.param)

    def adjoint(self) -> "GateOp":
        k = self.kind
        if k in _SELF_INVERSE:
            return self
        if k == "S":
            return GateOp("RPHI", self.targets, -np.pi / 2)
        if k == "T":
            return GateOp("RPHI", self.targets, -np.pi / 4)
        if k == "RPHI":
            return GateOp("RPHI", self.targets, -self.param)
        if k == "RS":
            return GateOp("RPHI", self.targets, -2 * np.pi / 2**self.param)
        if k == "CRPHI":
            return GateOp("CRPHI", self.targets, -self.param)
        if k == "CRS":
            return GateOp("CRPHI", self.targets, -2 * np.pi / 2**self.param)
        return GateOp(k, self.targets, dagger(self.param))

    def __eq__(self, other):
        if not isinstance(other, GateOp):
            return NotImplemented
        if (self.kind, self.targets) != (other.kind, other.targets):
            return False
        if isinstance(self.param, np.ndarray) or isinstance(other.param, np.ndarray):
            return np.array_equal(self.param, other.param)
        return self.param == other.param

    __hash__ = None

    def __repr__(self):
        if self.kind in _PARAM:
            return f"GateOp({self.kind}, {self.targets}, {self.param})"
        return f"GateOp({self.kind}, {self.targets})"


@dataclass
class Circuit:
    n_qubits: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        check_capacity(self.n_qubits)
        self.ops = list(self.ops)
        for op in self.ops:
            self._check(op)

    def _check(self, op: GateOp):
        if any(not 0 <= t < self.n_qubits for t in op.targets):
            raise ValueError(f"{op!r} targets a qubit outside 0..{self.n_qubits - 1}")

    def add(self, kind: str, *targets: int, param=None) -> "Circuit":
        op = GateOp(kind, targets, param)
        self._check(op)
        self.ops.append(op)
        return self

    def append(self, op: GateOp) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, other: "Circuit | Iterable[GateOp]") -> "Circuit":
        for op in other.ops if isinstance(other, Circuit) else other:
            self.append(op)
        return self

    def shifted(self, offset: int, n_qubits: int) -> "Circuit":
        """The same ops relabelled onto qubits ``offset..`` of a wider register."""
        return Circuit(n_qubits, [GateOp(o.kind, [t + offset for t in o.targets], o.param) for o in self.ops])

    def __len__(self):
        return len(self.ops)

    def count(self, kind: str) -> int:
        return sum(op.kind == kind.upper() for op in self.ops)


def inverse(c: Circuit) -> Circuit:
    """Reverse the gate order and take each gate's adjoint."""
    return Circuit(c.n_qubits, [op.adjoint() for op in reversed(c.ops)])


def run_ops(amps: np.ndarray, n: int, ops: Sequence[GateOp]) -> np.ndarray:
    """Apply ``ops`` in order to an amplitude array of shape ``(2**n, *batch)``."""
    for op in ops:
        if op.is_diagonal:
            amps = apply_local_diagonal(amps, n, np.diag(op.matrix()), op.targets)
        else:
            amps = apply_matrix(amps, n, op.matrix(), op.targets)
    return amps


def simulate(c: Circuit, input=0) -> StateVector:
    """Run ``c`` on a basis index or a :class:`StateVector`."""
    if isinstance(input, StateVector):
        if input.n_qubits != c.n_qubits:
            raise DimensionError(f"state has {input.n_qubits} qubits, circuit has {c.n_qubits}")
        amps = input.amplitudes.copy()
    else:
        idx = int(input)
        if not 0 <= idx < 1 << c.n_qubits:
            raise DimensionError(f"basis index {idx} out of range")
        amps = np.zeros(1 << c.n_qubits, dtype=complex)
        amps[idx] = 1
    return StateVector(run_ops(amps, c.n_qubits, c.ops))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full ``2**n`` matrix, obtained by pushing the identity through the kernel."""
    d = 1 << c.n_qubits
    return run_ops(np.eye(d, dtype=complex), c.n_qubits, c.ops)


# -- path sum ----------------------------------------------------------------


def _successors(op: GateOp, mat: np.ndarray, index: int, n: int):
    """Nonzero entries ``(new_index, <new|G|index>)`` of one gate column."""
    shifts = [n - 1 - t for t in op.targets]
    k = len(shifts)
    col = 0
    for s in shifts:
        col = (col << 1) | ((index >> s) & 1)
    base = index
    for s in shifts:
        base &= ~(1 << s)
    for row in np.flatnonzero(np.abs(mat[:, col]) > 1e-15):
        new = base
        for pos, s in enumerate(shifts):
            if (row >> (k - 1 - pos)) & 1:
                new |= 1 << s
        yield new, mat[row, col]


def path_sum_amplitude(c: Circuit, input: int, output: int) -> complex:
    """``<output| U_T ... U_1 |input>`` as a sum over basis-state paths.

    Walks the paths depth-first, following only nonzero gate entries, so
    memory stays ``O(T * n)`` while the number of paths visited is at most
    ``prod_j 2**k_j``.
    """
    n = c.n_qubits
    mats = [op.matrix() for op in c.ops]
    T = len(c.ops)

    def walk(step: int, index: int, weight: complex) -> complex:
        if step == T:
            return weight if index == output else 0.0
        total = 0.0
        for new, amp in _successors(c.ops[step], mats[step], index, n):
            total += walk(step + 1, new, weight * amp)
        return total

    return complex(walk(0, int(input), 1.0 + 0j))


# -- text format ---------------------------------------------------------------


def emit_circuit(c: Circuit) -> str:
    lines = [f"QUBITS {c.n_qubits}"]
    for op in c.ops:
        if op.kind in ("CUSTOM", "CCUSTOM"):
            raise ValueError("custom matrices have no text representation")
        parts = [op.kind, *map(str, op.targets)]
        if op.kind in _PARAM:
            parts.append(repr(op.param))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, n_qubits: int | None = None) -> Circuit:
    """Parse the text format.  Without a ``QUBITS`` line the width is inferred."""
    ops = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0].upper()
        try:
            if kind == "QUBITS":
                declared = int(parts[1])
                continue
            if kind in _PARAM:
                ops.append(GateOp(kind, [int(p) for p in parts[1:-1]], parts[-1]))
            else:
                ops.append(GateOp(kind, [int(p) for p in parts[1:]]))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    n = n_qubits or declared
    if n is None:
        n = 1 + max((t for op in ops for t in op.targets), default=0)
    return Circuit(n, ops)


def random_circuit(n: int, depth: int, rng, kinds: Sequence[str] | None = None) -> Circuit:
    """Random catalog circuit, handy for property tests and demos."""
    kinds = list(kinds or ["H", "X", "Y", "Z", "S", "T", "RPHI", "RS", "CNOT", "CZ", "SWAP", "TOFFOLI", "CRPHI"])
    c = Circuit(n)
    while len(c) < depth:
        kind = kinds[rng.integers(len(kinds))]
        arity = _FIXED[kind][1] if kind in _FIXED else _PARAM[kind]
        if arity > n:
            continue
        targets = rng.choice(n, size=arity, replace=False).tolist()
        param = None
        if kind in ("RPHI", "CRPHI"):
            param = float(rng.uniform(-np.pi, np.pi))
        elif kind in ("RS", "CRS"):
            param = int(rng.integers(1, 6))
        c.add(kind, *targets, param=param)
    return c

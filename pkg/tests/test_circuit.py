import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsimkit.circuit import (
    CNOT,
    CZ,
    SWAP,
    TOFFOLI,
    Circuit,
    GateOp,
    circuit_unitary,
    controlled,
    emit_circuit,
    inverse,
    parse_circuit,
    path_sum_amplitude,
    random_circuit,
    simulate,
)
from qsimkit.numeric import H, I2, X, Z, NotUnitaryError, tensor
from qsimkit.state import StateVector

CATALOG = ["H", "X", "Y", "Z", "S", "T", "CNOT", "CZ", "SWAP", "TOFFOLI"]


def dense_product(c):
    """Circuit unitary by multiplying full 2^n matrices built with Kronecker
    products and explicit index permutations."""
    n = c.n_qubits
    d = 1 << n
    u = np.eye(d, dtype=complex)
    for op in c.ops:
        g = op.matrix()
        k = len(op.targets)
        full = np.zeros((d, d), dtype=complex)
        for col in range(d):
            bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
            sub = int("".join(str(bits[t]) for t in op.targets), 2)
            for row_sub in range(1 << k):
                new = list(bits)
                for i, t in enumerate(op.targets):
                    new[t] = (row_sub >> (k - 1 - i)) & 1
                row = int("".join(map(str, new)), 2)
                full[row, col] += g[row_sub, sub]
        u = full @ u
    return u


def test_bell_circuit_with_z():
    c = Circuit(2).add("H", 0).add("CNOT", 0, 1).add("Z", 1)
    expected = StateVector(np.array([1, 0, 0, -1]) / math.sqrt(2))
    assert simulate(c, 0).equiv(expected)


def test_empty_circuit_is_identity(rng):
    s = StateVector.random(3, rng)
    assert np.allclose(simulate(Circuit(3), s).amplitudes, s.amplitudes)
    assert len(inverse(Circuit(2))) == 0


def test_hxh_is_z(rng):
    s = StateVector.random(1, rng)
    c = Circuit(1).add("H", 0).add("X", 0).add("H", 0)
    assert np.allclose(simulate(c, s).amplitudes, (Z @ s.amplitudes))


def test_simulate_dimension_mismatch():
    with pytest.raises(ValueError):
        simulate(Circuit(2).add("H", 0), StateVector.basis(0, 3))


def test_inverse_of_t_is_rphi():
    inv = inverse(Circuit(1).add("T", 0))
    assert inv.ops == [GateOp("RPHI", (0,), -math.pi / 4)]


@pytest.mark.parametrize("seed", range(5))
def test_inverse_round_trip(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(4, 20, rng)
    s = StateVector.random(4, rng)
    back = simulate(inverse(c), simulate(c, s))
    assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-9)


def test_controlled_examples():
    assert np.allclose(controlled(X), np.eye(4)[[0, 1, 3, 2]])
    assert np.allclose(controlled(I2), np.eye(4))
    cz = controlled(Z)
    assert np.allclose(np.diag(cz), [1, 1, 1, -1])
    with pytest.raises(NotUnitaryError):
        controlled(2 * X)


def test_hadamard_conjugation_reverses_cnot():
    hh = tensor(H, H)
    reversed_cnot = np.eye(4)[[0, 3, 2, 1]]
    assert np.allclose(hh @ CNOT @ hh, reversed_cnot, atol=1e-10)


def test_swap_from_three_cnots():
    c = Circuit(2).add("CNOT", 0, 1).add("CNOT", 1, 0).add("CNOT", 0, 1)
    assert np.allclose(circuit_unitary(c), SWAP)


def test_toffoli_and_cz_catalog():
    assert np.allclose(TOFFOLI, np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]])
    assert np.allclose(CZ, np.diag([1, 1, 1, -1]))


@pytest.mark.parametrize("kind", CATALOG + ["RPHI", "RS", "CRPHI", "CRS"])
def test_catalog_gates_are_unitary(kind):
    param = {"RPHI": 0.3, "CRPHI": -1.1, "RS": 3, "CRS": 2}.get(kind)
    arity = {"CNOT": 2, "CZ": 2, "SWAP": 2, "TOFFOLI": 3, "CRPHI": 2, "CRS": 2}.get(kind, 1)
    g = GateOp(kind, tuple(range(arity)), param).matrix()
    assert np.allclose(g @ g.conj().T, np.eye(len(g)), atol=1e-12)
    adj = GateOp(kind, tuple(range(arity)), param).adjoint().matrix()
    assert np.allclose(adj @ g, np.eye(len(g)), atol=1e-12)


def test_gateop_arity_checked():
    with pytest.raises(ValueError):
        GateOp("CNOT", (0,))
    with pytest.raises(ValueError):
        Circuit(2).add("H", 2)


@pytest.mark.parametrize("seed", range(4))
def test_circuit_unitary_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(3, 12, rng)
    assert np.allclose(circuit_unitary(c), dense_product(c), atol=1e-10)


def test_path_sum_examples():
    assert path_sum_amplitude(Circuit(2), 1, 1) == 1
    assert path_sum_amplitude(Circuit(2), 1, 2) == 0
    assert path_sum_amplitude(Circuit(1).add("H", 0), 0, 0) == pytest.approx(1 / math.sqrt(2))


@given(st.integers(0, 2**32 - 1))
def test_path_sum_matches_simulation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    c = random_circuit(n, int(rng.integers(1, 11)), rng)
    i, o = int(rng.integers(1 << n)), int(rng.integers(1 << n))
    assert abs(path_sum_amplitude(c, i, o) - simulate(c, i).amplitudes[o]) < 1e-9


def test_text_round_trip(rng):
    c = random_circuit(4, 25, rng, kinds=CATALOG + ["RPHI", "RS", "CRPHI", "CRS"])
    again = parse_circuit(emit_circuit(c))
    assert again.n_qubits == 4
    assert again.ops == c.ops
    assert emit_circuit(again) == emit_circuit(c)


def test_parse_text_format():
    c = parse_circuit("H 0\nCNOT 0 1  # entangle\nRPHI 2 0.7853981634\nTOFFOLI 0 1 2\n")
    assert c.n_qubits == 3
    assert [op.kind for op in c.ops] == ["H", "CNOT", "RPHI", "TOFFOLI"]
    with pytest.raises(ValueError):
        parse_circuit("CNOT 0\n")


def test_count_and_shift():
    c = Circuit(2).add("H", 0).add("H", 1).add("CNOT", 0, 1)
    assert c.count("H") == 2
    s = c.shifted(1, 3)
    assert s.n_qubits == 3 and s.ops[2].targets == (1, 2)

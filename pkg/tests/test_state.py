import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsimkit.circuit import CNOT
from qsimkit.numeric import H, I2, X, Z, tensor, tensor_all
from qsimkit.state import (
    CapacityError,
    DensityMatrix,
    Povm,
    ProjectiveMeasurement,
    StateVector,
    apply_gate,
    apply_matrix,
    expectation,
    make_rng,
    marginal_probabilities,
    measure_computational,
    measure_projective,
    partial_trace,
    sample_index,
    sample_povm,
    schmidt,
    state_distance,
    total_variation,
)
from conftest import random_unitary

EPR = StateVector(np.array([1, 0, 0, 1]) / math.sqrt(2))


def full_operator(gate, targets, n):
    """Dense 2^n matrix of ``gate`` on ``targets`` by permuting a Kronecker product."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    big = tensor(gate, np.eye(1 << (n - k)))
    order = list(targets) + rest  # axis j of big is qubit order[j]
    perm = np.argsort(order)
    t = big.reshape((2,) * (2 * n))
    t = np.transpose(t, list(perm) + [n + p for p in perm])
    return t.reshape(1 << n, 1 << n)


def test_hadamard_on_zero():
    out = apply_gate(StateVector.basis(0, 1), H, [0])
    assert np.allclose(out.amplitudes, [1 / math.sqrt(2)] * 2)


def test_cnot_on_10():
    out = apply_gate(StateVector.from_bits("10"), CNOT, [0, 1])
    assert out.equiv(StateVector.from_bits("11"))


def test_identity_gate_is_noop(rng):
    s = StateVector.random(3, rng)
    for q in range(3):
        assert np.allclose(apply_gate(s, I2, [q]).amplitudes, s.amplitudes)


def test_apply_gate_rejects_bad_input():
    s = StateVector.basis(0, 2)
    with pytest.raises(ValueError):
        apply_gate(s, np.array([[1, 1], [0, 1]]), [0])
    with pytest.raises(ValueError):
        apply_gate(s, CNOT, [1, 1])
    with pytest.raises(ValueError):
        apply_gate(s, H, [2])


def test_capacity_guard():
    with pytest.raises(CapacityError):
        StateVector.basis(0, 27)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_two_qubit_kernel_matches_dense_operator(n, rng):
    s = StateVector.random(n, rng)
    u = random_unitary(4, rng)
    targets = list(rng.choice(n, 2, replace=False))
    fast = apply_gate(s, u, targets).amplitudes
    slow = full_operator(u, targets, n) @ s.amplitudes
    assert np.allclose(fast, slow, atol=1e-10)


def test_batched_kernel_matches_columns(rng):
    batch = rng.normal(size=(8, 3)) + 0j
    u = random_unitary(2, rng)
    out = apply_matrix(batch, 3, u, [1])
    for j in range(3):
        assert np.allclose(out[:, j], apply_matrix(batch[:, j], 3, u, [1]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_norm_preserved_and_reversible(seed, n):
    rng = np.random.default_rng(seed)
    s = StateVector.random(n, rng)
    u = random_unitary(2, rng)
    q = int(rng.integers(n))
    out = apply_gate(s, u, [q])
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-9
    back = apply_gate(out, u.conj().T, [q])
    assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-9)


def test_measure_basis_state_is_deterministic(rng):
    bits, post = measure_computational(StateVector.basis(1, 1), [0], rng)
    assert bits == (1,)
    assert post.equiv(StateVector.basis(1, 1))


def test_measure_plus_is_fair():
    plus = StateVector(np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(marginal_probabilities(plus, [0]), [0.5, 0.5])
    rng = make_rng(5)
    counts = sum(measure_computational(plus, [0], rng)[0][0] for _ in range(4000))
    assert abs(counts / 4000 - 0.5) < 3 * math.sqrt(0.25 / 4000)


def test_epr_collapse():
    rng = make_rng(0)
    for _ in range(20):
        (b,), post = measure_computational(EPR, [0], rng)
        assert post.equiv(StateVector.basis(3 * b, 2))


def test_marginal_order_follows_argument_order():
    s = StateVector.from_bits("10")
    assert np.allclose(marginal_probabilities(s, [0, 1]), [0, 0, 1, 0])
    assert np.allclose(marginal_probabilities(s, [1, 0]), [0, 1, 0, 0])


def test_half_space_projective_measurement():
    # basis states labelled |1>, ..., |N> live at indices 0, ..., N-1
    N = 8
    amps = np.zeros(N)
    amps[0] = 1 / math.sqrt(3)
    amps[N - 1] = math.sqrt(2 / 3)
    phi = StateVector(amps)
    p1 = np.diag([1.0] * (N // 2) + [0.0] * (N // 2))
    m = ProjectiveMeasurement([p1, np.eye(N) - p1])
    assert np.allclose(m.probabilities(phi), [1 / 3, 2 / 3])
    rng = make_rng(3)
    for _ in range(50):
        j, post = measure_projective(phi, m, rng)
        if j == 0:
            assert post.equiv(StateVector.basis(0, 3))
            break
    else:
        pytest.fail("outcome 1 never observed")


def test_single_projector_measurement(rng):
    s = StateVector.random(2, rng)
    j, post = measure_projective(s, ProjectiveMeasurement([np.eye(4)]), rng)
    assert j == 0 and np.allclose(post.amplitudes, s.amplitudes)


def test_invalid_projective_measurement():
    with pytest.raises(ValueError):
        ProjectiveMeasurement([np.diag([1, 0]), np.diag([1, 1])])
    with pytest.raises(ValueError):
        ProjectiveMeasurement([np.diag([1, 0])])


def test_rank_one_measurement_frequencies():
    rng = make_rng(11)
    s = StateVector.random(2, rng)
    m = ProjectiveMeasurement.basis(np.eye(4))
    trials = 20000
    counts = np.bincount([measure_projective(s, m, rng)[0] for _ in range(trials)], minlength=4)
    p = s.probabilities()
    sigma = np.sqrt(p * (1 - p) / trials)
    assert np.all(np.abs(counts / trials - p) <= 3 * sigma + 1e-12)


def discrimination_povm():
    minus = np.array([1, -1]) / math.sqrt(2)
    e0 = 0.5 * np.outer(minus, minus)
    e1 = 0.5 * np.diag([0, 1])
    return Povm([e0, e1, np.eye(2) - e0 - e1])


def test_povm_on_zero_and_plus():
    p = discrimination_povm()
    assert np.allclose(p.probabilities(StateVector.basis(0, 1)), [0.25, 0, 0.75])
    plus = StateVector(np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(p.probabilities(plus), [0, 0.25, 0.75])
    rng = make_rng(2)
    assert all(sample_povm(plus, p, rng) != 0 for _ in range(200))


def test_trivial_povm(rng):
    assert sample_povm(StateVector.random(1, rng), Povm([np.eye(2)]), rng) == 0


def test_invalid_povm():
    with pytest.raises(ValueError):
        Povm([np.diag([1, -0.5]), np.diag([0, 1.5])])


def test_expectation_examples():
    assert expectation(StateVector.basis(0, 1), Z) == pytest.approx(1)
    assert expectation(StateVector.basis(0, 1), X) == pytest.approx(0)
    assert expectation(EPR, tensor(Z, Z)) == pytest.approx(1)
    with pytest.raises(ValueError):
        expectation(StateVector.basis(0, 1), np.array([[0, 1], [0, 0]]))


def test_partial_trace_examples(rng):
    assert np.allclose(partial_trace(EPR.density(), [0]).matrix, np.eye(2) / 2)
    a, b = StateVector.random(1, rng), StateVector.random(2, rng)
    reduced = partial_trace(a.tensor(b).density(), [0])
    assert np.allclose(reduced.matrix, np.outer(a.amplitudes, a.amplitudes.conj()))
    r = partial_trace(StateVector.random(3, rng).density(), [0, 2])
    assert np.trace(r.matrix).real == pytest.approx(1, abs=1e-10)
    with pytest.raises(ValueError):
        partial_trace(EPR.density(), [0, 1])


def test_schmidt_examples(rng):
    lam, _, _ = schmidt(EPR, 1)
    assert np.allclose(lam, [1 / math.sqrt(2)] * 2)
    prod = StateVector.random(1, rng).tensor(StateVector.random(2, rng))
    lam, _, _ = schmidt(prod, 1)
    assert np.allclose(lam, [1])
    # A is one qubit, B is a qutrit embedded in two qubits
    amps = np.zeros(8)
    amps[[0b000, 0b001, 0b101, 0b110]] = 0.5
    s = StateVector(amps)
    lam, _, _ = schmidt(s, 1)
    m = amps.reshape(2, 4)
    oracle = np.sqrt(np.sort(np.linalg.eigvalsh(m @ m.T))[::-1])
    assert np.allclose(lam, oracle)


@given(st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_schmidt_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    s = StateVector.random(n, rng)
    split = int(rng.integers(1, n))
    lam, a, b = schmidt(s, split)
    rebuilt = sum(l * np.kron(x, y) for l, x, y in zip(lam, a, b))
    assert np.allclose(rebuilt, s.amplitudes, atol=1e-9)
    assert np.isclose(np.sum(lam**2), 1)
    assert np.allclose(a.conj() @ a.T, np.eye(len(lam)), atol=1e-9)
    assert np.allclose(b.conj() @ b.T, np.eye(len(lam)), atol=1e-9)
    keep = list(range(split))
    w = partial_trace(s.density(), keep).eigenvalues()
    assert np.allclose(w[: len(lam)], lam**2, atol=1e-9)


def test_distances(rng):
    s = StateVector.random(2, rng)
    assert state_distance(s, s) == 0
    assert state_distance(StateVector.basis(0, 1), StateVector.basis(1, 1)) == pytest.approx(math.sqrt(2))


@given(st.integers(0, 2**32 - 1))
def test_tvd_bounded_by_euclidean(seed):
    rng = np.random.default_rng(seed)
    a = StateVector.random(3, rng)
    b = StateVector.from_unnormalized(a.amplitudes + 0.05 * rng.normal(size=8))
    assert total_variation(a, b) <= state_distance(a, b) + 1e-12


@given(st.integers(0, 2**32 - 1))
def test_projective_probabilities_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    obs = random_unitary(4, rng)
    obs = obs @ np.diag([1, 1, -1, 2]) @ obs.conj().T
    m, values = ProjectiveMeasurement.from_observable(obs)
    assert list(values) == [2, 1, -1]
    assert np.sum(m.probabilities(StateVector.random(2, rng))) == pytest.approx(1, abs=1e-9)


def test_equiv_ignores_global_phase(rng):
    s = StateVector.random(2, rng)
    t = StateVector(np.exp(0.4j) * s.amplitudes)
    assert s.equiv(t)
    assert not s.equiv(StateVector.random(2, rng))


def test_json_round_trip(rng):
    s = StateVector.random(3, rng)
    assert np.allclose(StateVector.from_json(s.to_json()).amplitudes, s.amplitudes)


def test_sampling_is_seed_deterministic():
    p = [0.1, 0.2, 0.3, 0.4]
    a = [sample_index(p, make_rng(9)) for _ in range(1)]
    r1, r2 = make_rng(42), make_rng(42)
    assert [sample_index(p, r1) for _ in range(50)] == [sample_index(p, r2) for _ in range(50)]
    assert a[0] in range(4)


def test_zero_probability_branch_never_sampled():
    rng = make_rng(0)
    assert all(sample_index([0.5, 0.0, 0.5], rng) != 1 for _ in range(2000))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))
    rho = DensityMatrix.mixture([0.5, 0.5], [StateVector.basis(0, 1), StateVector.basis(1, 1)])
    assert rho.purity() == pytest.approx(0.5)
    assert np.allclose(rho.eigenvalues(), [0.5, 0.5])
    assert tensor_all(I2, I2).shape == (4, 4)

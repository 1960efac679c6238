"""Non-local games: CHSH, the magic square and Mermin's three-player game."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .numeric import H, X, Y, Z, check_unitary, tensor
from .query import PromiseError
from .state import (
    ProjectiveMeasurement,
    StateVector,
    apply_gate,
    make_rng,
    measure_projective,
    sample_index,
)

CLASSICAL = "classical-deterministic"
SHARED_RANDOM = "classical-shared-random"
QUANTUM = "quantum"


def rotation(theta: float) -> np.ndarray:
    """``R(theta) = [[cos, -sin], [sin, cos]]``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass
class GameStrategy:
    """A strategy for a two-player game with one input bit and one output bit each.

    * ``classical-deterministic``: ``alice[x]`` and ``bob[y]`` are output bits.
    * ``classical-shared-random``: ``mixture`` lists ``(weight, GameStrategy)``.
    * ``quantum``: ``state`` is shared (Alice owns qubit 0), ``alice[x]`` and
      ``bob[y]`` are single-qubit unitaries applied before a computational
      basis measurement.
    """

    kind: str
    alice: list = field(default_factory=list)
    bob: list = field(default_factory=list)
    state: StateVector | None = None
    mixture: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind == CLASSICAL:
            if any(v not in (0, 1) for v in list(self.alice) + list(self.bob)):
                raise ValueError("deterministic responses must be bits")
        elif self.kind == QUANTUM:
            if self.state is None or self.state.n_qubits != 2:
                raise ValueError("quantum CHSH strategy needs a 2-qubit state")
            self.alice = [check_unitary(u) for u in self.alice]
            self.bob = [check_unitary(u) for u in self.bob]
        elif self.kind == SHARED_RANDOM:
            weights = [w for w, _ in self.mixture]
            if not self.mixture or min(weights) < 0 or abs(sum(weights) - 1) > 1e-9:
                raise ValueError("mixture weights must be a probability distribution")
        else:
            raise ValueError(f"unknown strategy kind {self.kind!r}")


def chsh_reference_strategy() -> GameStrategy:
    """Shared ``(|00> - |11>)/sqrt2``; rotate by ``-pi/16`` on input 0 and ``3pi/16`` on input 1."""
    state = StateVector(np.array([1, 0, 0, -1]) / math.sqrt(2))
    rots = [rotation(-math.pi / 16), rotation(3 * math.pi / 16)]
    return GameStrategy(QUANTUM, alice=rots, bob=rots, state=state)


def chsh_output_distribution(strategy: GameStrategy, x: int, y: int) -> np.ndarray:
    """Exact joint distribution of ``(a, b)`` indexed ``2a + b``."""
    if strategy.kind == CLASSICAL:
        p = np.zeros(4)
        p[2 * strategy.alice[x] + strategy.bob[y]] = 1
        return p
    if strategy.kind == SHARED_RANDOM:
        return sum(w * chsh_output_distribution(s, x, y) for w, s in strategy.mixture)
    st = apply_gate(strategy.state, strategy.alice[x], [0])
    st = apply_gate(st, strategy.bob[y], [1])
    return st.probabilities()


def chsh_win_probabilities(strategy: GameStrategy) -> np.ndarray:
    """Win probability ``P[a xor b = x and y]`` per input, indexed ``2x + y``."""
    out = np.zeros(4)
    for x, y in itertools.product((0, 1), repeat=2):
        p = chsh_output_distribution(strategy, x, y)
        out[2 * x + y] = sum(p[2 * a + b] for a, b in itertools.product((0, 1), repeat=2) if a ^ b == x & y)
    return out


def classical_chsh_strategies():
    """All 16 deterministic strategies."""
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        yield GameStrategy(CLASSICAL, alice=[a0, a1], bob=[b0, b1])


def best_classical_chsh() -> float:
    return max(float(chsh_win_probabilities(s).mean()) for s in classical_chsh_strategies())


@dataclass
class ChshReport:
    exact: np.ndarray
    empirical: np.ndarray
    average_exact: float
    average_empirical: float


def play_chsh(strategy: GameStrategy, trials: int, rng=None) -> ChshReport:
    """Exact per-input win probabilities plus ``trials`` sampled rounds per input."""
    rng = make_rng(rng)
    exact = chsh_win_probabilities(strategy)
    empirical = np.zeros(4)
    for x, y in itertools.product((0, 1), repeat=2):
        dist = chsh_output_distribution(strategy, x, y)
        wins = 0
        for _ in range(trials):
            k = sample_index(dist, rng)
            wins += (k >> 1) ^ (k & 1) == x & y
        empirical[2 * x + y] = wins / trials if trials else float("nan")
    return ChshReport(exact, empirical, float(exact.mean()), float(empirical.mean()))


# -- magic square --------------------------------------------------------------

MAGIC_SQUARE = [
    [(X, X), (Y, Z), (Z, Y)],
    [(Y, Y), (Z, X), (X, Z)],
    [(Z, Z), (X, Y), (Y, X)],
]

#: Alice plays the rows of the first matrix, Bob the columns of the second.
CLASSICAL_ALICE = np.array([[0, 0, 0], [0, 0, 0], [1, 1, 0]])
CLASSICAL_BOB = np.array([[0, 0, 0], [0, 0, 0], [1, 1, 1]])


def magic_observable(row: int, col: int) -> np.ndarray:
    """The two-qubit observable at 1-based ``(row, col)``."""
    a, b = MAGIC_SQUARE[row - 1][col - 1]
    return tensor(a, b)


def _singlet_pairs() -> StateVector:
    """Qubits ``(A1, A2, B1, B2)`` with singlets on ``(A1, B1)`` and ``(A2, B2)``."""
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    amps = np.einsum("ac,bd->abcd", singlet.reshape(2, 2), singlet.reshape(2, 2))
    return StateVector(amps.reshape(-1))


def _measurements(x: int, y: int) -> list:
    out = []
    for c in range(1, 4):
        out.append(tensor(magic_observable(x, c), np.eye(4)))
    for r in range(1, 4):
        out.append(tensor(np.eye(4), magic_observable(r, y)))
    pms = []
    for obs in out:
        pm, values = ProjectiveMeasurement.from_observable(obs)
        pms.append((pm, values))
    return pms


def _outcome_bit(value: float) -> int:
    return 0 if value > 0 else 1


def _check_inputs(x: int, y: int):
    if x not in (1, 2, 3) or y not in (1, 2, 3):
        raise ValueError("magic-square inputs are 1-based row/column indices in 1..3")


def play_magic_square(x: int, y: int, rng=None):
    """Sequentially measure row ``x`` (Alice) and column ``y`` (Bob); returns bit tuples."""
    _check_inputs(x, y)
    rng = make_rng(rng)
    st = _singlet_pairs()
    bits = []
    for pm, values in _measurements(x, y):
        j, st = measure_projective(st, pm, rng)
        bits.append(_outcome_bit(values[j]))
    return tuple(bits[:3]), tuple(bits[3:])


def magic_square_distribution(x: int, y: int, sequential: bool = True) -> dict:
    """Exact distribution over ``(a, b)`` output tuples.

    ``sequential=True`` walks the tree of successive projective measurements;
    ``sequential=False`` uses products of the commuting eigenprojectors, i.e.
    one joint measurement.
    """
    _check_inputs(x, y)
    pms = _measurements(x, y)
    start = _singlet_pairs().amplitudes
    dist: dict = {}
    if sequential:
        def walk(vec, depth, bits):
            if depth == len(pms):
                p = float(np.vdot(vec, vec).real)
                if p > 1e-15:
                    key = (tuple(bits[:3]), tuple(bits[3:]))
                    dist[key] = dist.get(key, 0.0) + p
                return
            pm, values = pms[depth]
            for proj, val in zip(pm.projectors, values):
                walk(proj @ vec, depth + 1, bits + [_outcome_bit(val)])

        walk(start, 0, [])
        return dist
    for choice in itertools.product(*[range(len(pm.projectors)) for pm, _ in pms]):
        proj = np.eye(16)
        for (pm, _), j in zip(pms, choice):
            proj = proj @ pm.projectors[j]
        p = float(np.vdot(start, proj @ start).real)
        if p > 1e-15:
            bits = [_outcome_bit(pms[k][1][j]) for k, j in enumerate(choice)]
            key = (tuple(bits[:3]), tuple(bits[3:]))
            dist[key] = dist.get(key, 0.0) + p
    return dist


def magic_square_wins(x: int, y: int, a, b) -> bool:
    return sum(a) % 2 == 0 and sum(b) % 2 == 1 and a[y - 1] == b[x - 1]


def classical_magic_square_rate(alice=CLASSICAL_ALICE, bob=CLASSICAL_BOB) -> float:
    """Fraction of the 9 inputs won when Alice outputs rows and Bob columns."""
    alice, bob = np.asarray(alice), np.asarray(bob)
    wins = sum(magic_square_wins(x, y, alice[x - 1], bob[:, y - 1]) for x in range(1, 4) for y in range(1, 4))
    return wins / 9


# -- Mermin's game -------------------------------------------------------------

MERMIN_INPUTS = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


def mermin_state() -> StateVector:
    amps = np.zeros(8)
    amps[0b000], amps[0b011], amps[0b101], amps[0b110] = 0.5, -0.5, -0.5, -0.5
    return StateVector(amps)


def _mermin_post_state(x: int, y: int, z: int) -> StateVector:
    if (x ^ y ^ z) != 0 or any(v not in (0, 1) for v in (x, y, z)):
        raise PromiseError("Mermin inputs must satisfy x xor y xor z = 0")
    st = mermin_state()
    for q, v in enumerate((x, y, z)):
        if v:
            st = apply_gate(st, H, [q])
    return st


def mermin_win_probability(x: int, y: int, z: int) -> float:
    st = _mermin_post_state(x, y, z)
    target = int(x or y or z)
    probs = st.probabilities()
    return float(sum(p for k, p in enumerate(probs) if bin(k).count("1") % 2 == target))


def play_mermin(x: int, y: int, z: int, rng=None) -> tuple:
    """Each player applies H iff their input is 1, then measures their qubit."""
    st = _mermin_post_state(x, y, z)
    k = sample_index(st.probabilities(), make_rng(rng))
    return (k >> 2) & 1, (k >> 1) & 1, k & 1


def classical_mermin_best() -> tuple:
    """``(best number of promise inputs won, count of strategies winning all 4)``
    over the 64 deterministic strategies."""
    best, perfect = 0, 0
    for table in itertools.product((0, 1), repeat=6):
        a, b, c = table[0:2], table[2:4], table[4:6]
        wins = sum((a[x] ^ b[y] ^ c[z]) == int(x or y or z) for x, y, z in MERMIN_INPUTS)
        best = max(best, wins)
        perfect += wins == 4
    return best, perfect

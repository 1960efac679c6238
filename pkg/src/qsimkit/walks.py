"""Random walks on regular graphs, the Szegedy walk operator and MNRS search.

The walk acts on ``C^N (x) C^N`` with basis ``|x>|y>`` (current vertex,
previous vertex); index ``x * N + y``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .fourier import _inverse_qft_ops
from .circuit import run_ops
from .numeric import herm_eig, householder_prep
from .state import make_rng, sample_index


class GraphError(ValueError):
    pass


@dataclass
class RegularGraph:
    """Undirected ``d``-regular graph given by adjacency lists, with marked vertices."""

    adjacency: list
    marked: frozenset = frozenset()
    labels: list | None = None

    def __post_init__(self):
        adj = [sorted(set(int(v) for v in nb)) for nb in self.adjacency]
        n = len(adj)
        if n < 2:
            raise GraphError("graph needs at least two vertices")
        degrees = {len(nb) for nb in adj}
        if len(degrees) != 1 or 0 in degrees:
            raise GraphError(f"graph is not regular (degrees {sorted(degrees)})")
        for x, nb in enumerate(adj):
            if x in nb:
                raise GraphError(f"self-loop at vertex {x}")
            for y in nb:
                if not 0 <= y < n or x not in adj[y]:
                    raise GraphError(f"edge {x}-{y} is not symmetric")
        self.adjacency = adj
        self.marked = frozenset(int(m) for m in self.marked)
        if any(not 0 <= m < n for m in self.marked):
            raise GraphError("marked vertex out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def degree(self) -> int:
        return len(self.adjacency[0])

    @property
    def epsilon(self) -> float:
        return len(self.marked) / self.n_vertices

    def with_marked(self, marked: Iterable[int]) -> "RegularGraph":
        return RegularGraph(self.adjacency, frozenset(marked), self.labels)

    def transition_matrix(self) -> np.ndarray:
        n, d = self.n_vertices, self.degree
        p = np.zeros((n, n))
        for x, nb in enumerate(self.adjacency):
            p[x, nb] = 1 / d
        return p

    def is_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            for y in self.adjacency[queue.popleft()]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n_vertices


def complete_graph(n: int, marked: Iterable[int] = ()) -> RegularGraph:
    return RegularGraph([[y for y in range(n) if y != x] for x in range(n)], frozenset(marked))


def cycle_graph(n: int, marked: Iterable[int] = ()) -> RegularGraph:
    return RegularGraph([[(x - 1) % n, (x + 1) % n] for x in range(n)], frozenset(marked))


def complete_bipartite(d: int, marked: Iterable[int] = ()) -> RegularGraph:
    """``K_{d,d}``: vertices ``0..d-1`` on one side, ``d..2d-1`` on the other."""
    left, right = list(range(d)), list(range(d, 2 * d))
    return RegularGraph([right] * d + [left] * d, frozenset(marked))


def hypercube_graph(k: int, marked: Iterable[int] = ()) -> RegularGraph:
    return RegularGraph([[x ^ (1 << b) for b in range(k)] for x in range(1 << k)], frozenset(marked))


def johnson_graph(n: int, r: int, marked: Iterable[int] = ()) -> RegularGraph:
    """``J(n, r)``: ``r``-subsets of ``range(n)``, adjacent when they share ``r-1`` elements."""
    subsets = list(itertools.combinations(range(n), r))
    index = {s: i for i, s in enumerate(subsets)}
    adj = []
    for s in subsets:
        nb = []
        for out in s:
            for inn in range(n):
                if inn not in s:
                    t = tuple(sorted(set(s) - {out} | {inn}))
                    nb.append(index[t])
        adj.append(nb)
    return RegularGraph(adj, frozenset(marked), [frozenset(s) for s in subsets])


def collision_graph(values: Sequence[int], r: int = 2) -> RegularGraph:
    """Johnson graph ``J(n, r)`` marking the subsets that contain a collision of ``values``."""
    g = johnson_graph(len(values), r)
    marked = [
        i
        for i, s in enumerate(g.labels)
        if len({values[j] for j in s}) < len(s)
    ]
    return g.with_marked(marked)


# -- spectra -----------------------------------------------------------------


def spectral_gap(g: RegularGraph):
    """Eigenvalues of ``P`` (descending) and ``delta = 1 - max_{i>=2} |lambda_i|``."""
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    w, _ = herm_eig(g.transition_matrix())
    return w, float(1 - np.max(np.abs(w[1:])))


def is_bipartite(g: RegularGraph) -> bool:
    color = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if y not in color:
                color[y] = 1 - color[x]
                queue.append(y)
            elif color[y] == color[x]:
                return False
    return True


# -- walk operator -------------------------------------------------------------


@dataclass
class WalkOperator:
    """``W(P) = ref(B) ref(A)`` and its building blocks for one graph."""

    graph: RegularGraph
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.graph.n_vertices

    @cached_property
    def neighbour_states(self) -> np.ndarray:
        """Row ``x`` is ``|p_x> = sum_y sqrt(P_xy) |y>``."""
        return np.sqrt(self.graph.transition_matrix())

    @cached_property
    def a_vectors(self) -> np.ndarray:
        """Columns ``|x>|p_x>``, an orthonormal basis of subspace A."""
        n = self.n
        vecs = np.zeros((n * n, n))
        for x in range(n):
            vecs[x * n : (x + 1) * n, x] = self.neighbour_states[x]
        return vecs

    @cached_property
    def b_vectors(self) -> np.ndarray:
        """Columns ``|p_y>|y>``, an orthonormal basis of subspace B."""
        n = self.n
        vecs = np.zeros((n * n, n))
        for y in range(n):
            vecs[np.arange(n) * n + y, y] = self.neighbour_states[y]
        return vecs

    @cached_property
    def step_a(self) -> np.ndarray:
        """Map (1): ``|x>|0> -> |x>|p_x>``, a Householder per value of ``x``."""
        n = self.n
        u = np.zeros((n * n, n * n), dtype=complex)
        for x in range(n):
            u[x * n : (x + 1) * n, x * n : (x + 1) * n] = householder_prep(self.neighbour_states[x])
        return u

    @cached_property
    def step_b(self) -> np.ndarray:
        """Map (2): ``|0>|y> -> |p_y>|y>``, i.e. map (1) conjugated by the register swap."""
        n = self.n
        swap = np.eye(n * n)[[y * n + x for x in range(n) for y in range(n)]]
        return swap @ self.step_a @ swap

    def _second_register_zero(self) -> np.ndarray:
        return np.tile(np.where(np.arange(self.n) == 0, 1.0, -1.0), self.n)

    @cached_property
    def ref_a(self) -> np.ndarray:
        """Undo (1), negate unless the second register is 0, redo (1)."""
        s = self.step_a
        return (s * self._second_register_zero()) @ s.conj().T

    @cached_property
    def ref_b(self) -> np.ndarray:
        s = self.step_b
        first_zero = np.repeat(np.where(np.arange(self.n) == 0, 1.0, -1.0), self.n)
        return (s * first_zero) @ s.conj().T

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.ref_b @ self.ref_a

    def uniform_state(self) -> np.ndarray:
        """``|U> = N^{-1/2} sum_x |x>|p_x>``."""
        return self.a_vectors.sum(axis=1) / math.sqrt(self.n)

    def powers(self, m: int) -> list:
        """``[W, W^2, W^4, ..., W^{2^(m-1)}]`` by repeated squaring."""
        key = ("pow", m)
        if key not in self._cache:
            out = [self.matrix]
            for _ in range(m - 1):
                out.append(out[-1] @ out[-1])
            self._cache[key] = out
        return self._cache[key]

    def edge_subspace(self) -> np.ndarray:
        """Orthonormal basis of ``A + B``, the space the search stays in."""
        u, s, _ = np.linalg.svd(np.hstack([self.a_vectors, self.b_vectors]), full_matrices=False)
        return u[:, s > 1e-10]

    def eigenphases(self) -> np.ndarray:
        """Eigenvalue angles of ``W`` restricted to ``A + B``, in ``(-pi, pi]``."""
        q = self.edge_subspace()
        w = np.linalg.eigvals(q.T @ self.matrix @ q)
        return np.angle(w)


def walk_operator(g: RegularGraph) -> np.ndarray:
    return WalkOperator(g).matrix


def phase_precision_bits(delta: float) -> int:
    """Ancilla width for ``R(P)``: ``ceil(log2(2 / sqrt(delta))) + 2``."""
    return math.ceil(math.log2(2 / math.sqrt(delta))) + 2


@dataclass
class MnrsResult:
    vertex: int | None
    rounds: int
    checks: int
    success_probability: float
    epsilon_guesses: list = field(default_factory=list)


def mnrs_rounds(epsilon: float) -> int:
    return round(math.pi / (4 * math.asin(math.sqrt(epsilon))) - 0.5)


def mnrs_round(g: RegularGraph, epsilon: float, rng=None, walk: WalkOperator | None = None) -> MnrsResult:
    """One search run assuming a marked fraction ``epsilon``.

    Starts in ``|U>``, alternates the mark-phase flip with ``R(P)`` for
    ``round(pi/(4 asin sqrt(epsilon)) - 1/2)`` rounds, measures the first
    register and checks the vertex classically.
    """
    rng = make_rng(rng)
    walk = walk or WalkOperator(g)
    n = g.n_vertices
    _, delta = spectral_gap(g)
    m = phase_precision_bits(delta)
    k = mnrs_rounds(epsilon)
    marks = np.ones(n)
    marks[list(g.marked)] = -1
    flip = np.repeat(marks, n)
    state = np.zeros((1 << m, n * n), dtype=complex)
    state[0] = walk.uniform_state()
    for _ in range(k):
        state = state * flip
        state = reflect_around_uniform(walk, state, m)
    probs = (np.abs(state.reshape(1 << m, n, n)) ** 2).sum(axis=(0, 2))
    p_good = float(probs[list(g.marked)].sum()) if g.marked else 0.0
    x = sample_index(probs, rng)
    found = x if x in g.marked else None
    return MnrsResult(found, k, k + 1, p_good, [epsilon])


def reflect_around_uniform(walk: WalkOperator, state: np.ndarray, m: int) -> np.ndarray:
    """``R(P)`` on the joint ``(ancilla, edge)`` register, shape ``(2**m, N**2)``.

    Phase estimation on ``W`` writes an ``m``-bit estimate into the ancilla,
    every nonzero estimate gets a minus sign, and the estimation is undone.
    The ancilla is kept explicitly so imperfect estimates leak amplitude
    out of ``|0>`` rather than being silently discarded.
    """
    from .query import hadamard_all

    powers = walk.powers(m)
    rows = np.arange(1 << m)
    reg = hadamard_all(state, m)
    for q in range(m):
        mask = (rows >> (m - 1 - q)) & 1 == 1
        reg[mask] = reg[mask] @ powers[m - 1 - q].T
    inv_qft = _inverse_qft_ops(m)
    reg = run_ops(reg, m, inv_qft)
    reg[1:] *= -1
    reg = run_ops(reg, m, [op.adjoint() for op in reversed(inv_qft)])
    for q in reversed(range(m)):
        mask = (rows >> (m - 1 - q)) & 1 == 1
        reg[mask] = reg[mask] @ powers[m - 1 - q].conj()
    return hadamard_all(reg, m)


def mnrs_search(g: RegularGraph, rng=None) -> MnrsResult:
    """Search with unknown ``epsilon`` using guesses ``1/2, 1/4, ...`` down to ``1/N``."""
    rng = make_rng(rng)
    walk = WalkOperator(g)
    guesses, rounds, checks = [], 0, 0
    eps = 0.5
    while True:
        res = mnrs_round(g, eps, rng, walk)
        guesses.append(eps)
        rounds += res.rounds
        checks += res.checks
        if res.vertex is not None:
            return MnrsResult(res.vertex, rounds, checks, res.success_probability, guesses)
        if eps <= 1 / g.n_vertices:
            return MnrsResult(None, rounds, checks, res.success_probability, guesses)
        eps /= 2

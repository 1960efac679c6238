import itertools
import math

import numpy as np
import pytest

from qsimkit.games import (
    CLASSICAL,
    CLASSICAL_ALICE,
    CLASSICAL_BOB,
    MERMIN_INPUTS,
    SHARED_RANDOM,
    GameStrategy,
    best_classical_chsh,
    chsh_reference_strategy,
    chsh_win_probabilities,
    classical_chsh_strategies,
    classical_magic_square_rate,
    classical_mermin_best,
    magic_observable,
    magic_square_distribution,
    magic_square_wins,
    mermin_state,
    mermin_win_probability,
    play_chsh,
    play_magic_square,
    play_mermin,
)
from qsimkit.numeric import tensor
from qsimkit.query import PromiseError
from qsimkit.state import make_rng


def test_chsh_quantum_per_input_value():
    w = chsh_win_probabilities(chsh_reference_strategy())
    assert np.allclose(w, math.cos(math.pi / 8) ** 2, atol=1e-9)
    assert np.ptp(w) < 1e-9


def test_chsh_best_classical_is_three_quarters():
    assert best_classical_chsh() == 0.75
    assert not any(np.all(chsh_win_probabilities(s) == 1) for s in classical_chsh_strategies())


def test_chsh_all_zero_strategy():
    w = chsh_win_probabilities(GameStrategy(CLASSICAL, alice=[0, 0], bob=[0, 0]))
    assert list(w) == [1, 1, 1, 0]


def test_shared_randomness_does_not_help():
    strategies = list(classical_chsh_strategies())
    mix = GameStrategy(SHARED_RANDOM, mixture=[(1 / 16, s) for s in strategies])
    assert chsh_win_probabilities(mix).mean() <= 0.75


def test_chsh_sampled_matches_exact():
    rep = play_chsh(chsh_reference_strategy(), 5000, make_rng(0))
    p = math.cos(math.pi / 8) ** 2
    assert np.all(np.abs(rep.empirical - p) <= 3 * math.sqrt(p * (1 - p) / 5000))


def test_magic_square_rows_and_columns_commute():
    for r in range(1, 4):
        for c1, c2 in itertools.combinations(range(1, 4), 2):
            a, b = magic_observable(r, c1), magic_observable(r, c2)
            assert np.max(np.abs(a @ b - b @ a)) < 1e-12
            a, b = magic_observable(c1, r), magic_observable(c2, r)
            assert np.max(np.abs(a @ b - b @ a)) < 1e-12


def test_magic_square_row_and_column_products():
    for r in range(1, 4):
        prod = magic_observable(r, 1) @ magic_observable(r, 2) @ magic_observable(r, 3)
        assert np.allclose(prod, np.eye(4))
        prod = magic_observable(1, r) @ magic_observable(2, r) @ magic_observable(3, r)
        assert np.allclose(prod, -np.eye(4))


@pytest.mark.parametrize("x,y", list(itertools.product(range(1, 4), repeat=2)))
def test_magic_square_quantum_always_wins(x, y):
    dist = magic_square_distribution(x, y)
    assert sum(dist.values()) == pytest.approx(1)
    assert all(magic_square_wins(x, y, a, b) for a, b in dist)
    joint = magic_square_distribution(x, y, sequential=False)
    assert set(joint) == set(dist)
    rng = make_rng(3 * x + y)
    for _ in range(25):
        assert magic_square_wins(x, y, *play_magic_square(x, y, rng))


def test_magic_square_classical_rate():
    assert classical_magic_square_rate() == pytest.approx(8 / 9)
    assert (CLASSICAL_ALICE.sum(axis=1) % 2 == 0).all()
    assert (CLASSICAL_BOB.sum(axis=0) % 2 == 1).all()


def test_magic_square_rejects_bad_inputs():
    with pytest.raises(ValueError):
        play_magic_square(0, 1)


def test_mermin_state_norm():
    assert np.linalg.norm(mermin_state().amplitudes) == pytest.approx(1)


@pytest.mark.parametrize("xyz", MERMIN_INPUTS)
def test_mermin_quantum_wins(xyz):
    assert mermin_win_probability(*xyz) == pytest.approx(1)
    rng = make_rng(sum(xyz))
    for _ in range(100):
        a, b, c = play_mermin(*xyz, rng)
        assert a ^ b ^ c == int(any(xyz))


def test_mermin_classical_strategies_fail():
    best, perfect = classical_mermin_best()
    assert best == 3 and perfect == 0


def test_mermin_promise():
    with pytest.raises(PromiseError):
        play_mermin(1, 0, 0)


def test_quantum_strategy_validation():
    with pytest.raises(ValueError):
        GameStrategy("quantum", alice=[np.eye(2)] * 2, bob=[np.eye(2)] * 2, state=None)
    assert tensor(np.eye(2), np.eye(2)).shape == (4, 4)

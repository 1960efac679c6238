"""Grover search, step by step.

Run with ``python demos/grover_and_amplification.py``.

With ``t`` marked items out of ``N`` the uniform superposition makes an angle
``theta = asin(sqrt(t/N))`` with the "bad" subspace, and each Grover iterate
rotates it by ``2 theta``.  After ``k`` iterates the success probability is
``sin^2((2k+1) theta)``.  This script watches that rotation happen.
"""

import math

import numpy as np

from qsimkit.query import BitOracle, grover, grover_angle, grover_iterations, grover_state
from qsimkit.state import make_rng

rng = make_rng(2024)

# Four items, one marked: theta = pi/6, so a single iterate lands exactly on it.
o = BitOracle.from_indices(2, [2])
res = grover(o, 1, rng)
print(f"N=4, t=1: theta = {grover_angle(4, 1):.6f} (pi/6 = {math.pi / 6:.6f})")
print(f"  iterations = {res.iterations}, success probability = {res.success_probability:.12f}, found index {res.index}")

# A larger instance: the success probability oscillates with k.
n, t = 8, 3
marked = rng.choice(1 << n, t, replace=False)
o = BitOracle.from_indices(n, marked)
theta = grover_angle(1 << n, t)
print(f"\nN={1 << n}, t={t}: recommended k = {grover_iterations(1 << n, t)}")
print("   k   simulated   sin^2((2k+1)theta)")
for k in range(0, 25, 3):
    amps = grover_state(o, k)
    p = float(np.sum(np.abs(amps[o.bits == 1]) ** 2))
    print(f"  {k:2d}   {p:.6f}    {math.sin((2 * k + 1) * theta) ** 2:.6f}")
print("Overshooting the recommended k rotates past the target and the probability falls again.")

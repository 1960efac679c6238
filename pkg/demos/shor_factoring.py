"""Factoring by period finding.

Run with ``python demos/shor_factoring.py``.

To factor ``N`` pick a random ``x`` coprime to ``N`` and find the period
``r`` of ``a -> x^a mod N``.  If ``r`` is even and ``x^(r/2) != -1 mod N``
then ``gcd(x^(r/2) +- 1, N)`` is a nontrivial factor.  The period comes from
Fourier sampling over ``q`` points followed by a continued-fraction
expansion of the measured ``b / q``.
"""

from qsimkit.classical import convergents, modexp
from qsimkit.fourier import find_period, period_register_bits, shor_factor
from qsimkit.state import make_rng

rng = make_rng(7)

# Period of 7^a mod 10: the sequence 1, 7, 9, 3, 1, ... repeats every 4 steps.
res = find_period(lambda a: modexp(7, a, 10), 10, rng)
print(f"7^a mod 10: q = {res.q} (register of {period_register_bits(10)} qubits), period = {res.period}")
print(f"  samples b: {res.samples}")
for b in res.samples:
    if b:
        print(f"  convergents of {b}/{res.q}: {[str(c) for c in convergents(b, res.q)]}")

for N in (15, 21, 35):
    out = shor_factor(N, rng)
    print(f"\nN = {N}: factor {out.factor} after {out.attempts} attempt(s); quantum step used: {out.used_quantum}")
    for step in out.history:
        print(f"  {step}")

"""Dense state-vector simulation of textbook quantum algorithms and protocols.

Conventions: qubit 0 is the most significant bit of a basis index, indices
are 0-based, and all randomness flows through ``numpy.random.Generator``
objects created by :func:`qsimkit.state.make_rng`.
"""

from .circuit import Circuit, GateOp, circuit_unitary, emit_circuit, parse_circuit, path_sum_amplitude, simulate
from .numeric import PauliString, herm_eig, herm_expm, pauli_decompose
from .state import (
    DensityMatrix,
    Povm,
    ProjectiveMeasurement,
    StateVector,
    make_rng,
    measure_computational,
    measure_projective,
    partial_trace,
    schmidt,
)

__all__ = [
    "Circuit",
    "DensityMatrix",
    "GateOp",
    "PauliString",
    "Povm",
    "ProjectiveMeasurement",
    "StateVector",
    "circuit_unitary",
    "emit_circuit",
    "herm_eig",
    "herm_expm",
    "make_rng",
    "measure_computational",
    "measure_projective",
    "parse_circuit",
    "partial_trace",
    "path_sum_amplitude",
    "pauli_decompose",
    "schmidt",
    "simulate",
]

__version__ = "0.1.0"

"""Commuting-cluster compiler and noisy statevector simulator for SYK-type
Majorana Hamiltonians.

The pipeline: sample random quartic couplings, map Majorana operators to
qubits, partition the resulting Pauli sum into commuting clusters, compile
each cluster into a diagonalizing Clifford plus a shared rotation ladder,
and run the Trotterized evolution exactly or under a stochastic two-qubit
depolarizing noise model with twirling and self-mitigation.
"""

__version__ = "0.1.0"

from .pauli import PauliString, WeightedPauli, PauliSum
from .syk import SykParams, SykInstance, Hamiltonian, sample_couplings, build_hamiltonian
from .clustering import build_graph, dsatur_partition, reduction_factor
from .circuit import Gate, Circuit, CouplingMap
from .synth import diagonalize_cluster, trotter_step, trotter_circuit, resource_table
from .sim import StateVector, NoiseModel, apply_circuit, exact_evolve
from .observables import return_probability_exact, otoc_exact, disorder_average

__all__ = [
    "PauliString", "WeightedPauli", "PauliSum",
    "SykParams", "SykInstance", "Hamiltonian",
    "sample_couplings", "build_hamiltonian",
    "build_graph", "dsatur_partition", "reduction_factor",
    "Gate", "Circuit", "CouplingMap",
    "diagonalize_cluster", "trotter_step", "trotter_circuit", "resource_table",
    "StateVector", "NoiseModel", "apply_circuit", "exact_evolve",
    "return_probability_exact", "otoc_exact", "disorder_average",
]

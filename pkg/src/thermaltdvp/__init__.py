"""Finite-temperature spin-chain simulation on purified matrix product states.

Imaginary-time evolution is carried out with a two-site sweep scheme; an
optional per-block two-site Clifford disentangler keeps bond entanglement
down while the Hamiltonian is tracked exactly as a conjugated Pauli sum.
A dense exact-diagonalization oracle and a CLI for benchmark curves are
included.
"""

__version__ = "0.1.0"

from .pauli import PauliString, WeightedPauliSum
from .clifford import CliffordTableau, enumerate_two_site_cliffords
from .mps import MPSState, TruncationPolicy, infinite_temperature_mps
from .tdvp import SweepConfig
from .models import ModelSpec, build_heisenberg_chain, build_j1j2
from .thermal import SimulationPlan, ThermalRecord, run

__all__ = [
    "PauliString",
    "WeightedPauliSum",
    "CliffordTableau",
    "enumerate_two_site_cliffords",
    "MPSState",
    "TruncationPolicy",
    "infinite_temperature_mps",
    "SweepConfig",
    "ModelSpec",
    "build_heisenberg_chain",
    "build_j1j2",
    "SimulationPlan",
    "ThermalRecord",
    "run",
]

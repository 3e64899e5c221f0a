"""Correlations and discord in the deformed toric code via its Ising mapping."""

from .ising import BETA_C, IsingModel, IsingMoment, Method, elliptic_K, onsager_nn_correlation
from .lattice import SpinPairKind, TorusLattice, build_lattice
from .model import GroundState, PauliString, build_ground_state, global_discord, spin_vs_rest
from .quantum import binary_entropy, mutual_information, quantum_discord, von_neumann_entropy
from .scan import SweepConfig, SweepRow, detect_critical_point, run_sweep

__version__ = "0.1.0"

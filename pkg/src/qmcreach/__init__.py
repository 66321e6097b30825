"""Reachability analysis for quantum Markov chains.

Parse a QASM circuit body plus a channel specification into a chain,
compute the subspace reachable from an initial state with a
breadth-first search over dimensions, and cross-check the result
against a density-matrix oracle.
"""

from .numerics import CapExceeded, DEFAULT_TOL, QUBIT_CAP_DEFAULT, Tolerances
from .qasm_front import Circuit, GateKind, GateOp, QasmError, circuit_to_qasm, parse_qasm
from .qmc_model import (
    AmplitudeDamping,
    BitFlip,
    ChannelSite,
    CustomKraus,
    MeasureZ,
    PhaseFlip,
    QuantumMarkovChain,
    Reset,
    build_qmc,
    kraus_for,
    load_channels,
)
from .simulator import (
    BranchSet,
    apply_circuit,
    apply_gate,
    choi_branches,
    max_entangled,
    partial_trace_branches,
    step_image,
)
from .reach_engine import ReachReport, SubspaceBasis, contains, mutual_containment, reachable_subspace
from .oracle import ORACLE_QUBIT_CAP, density_from_vectors, join, oracle_reachable, support_basis

__version__ = "0.1.0"

__all__ = [
    "AmplitudeDamping", "BitFlip", "BranchSet", "CapExceeded", "ChannelSite",
    "Circuit", "CustomKraus", "DEFAULT_TOL", "GateKind", "GateOp", "MeasureZ",
    "ORACLE_QUBIT_CAP", "PhaseFlip", "QUBIT_CAP_DEFAULT", "QasmError",
    "QuantumMarkovChain", "ReachReport", "Reset", "SubspaceBasis", "Tolerances",
    "apply_circuit", "apply_gate", "build_qmc", "choi_branches", "circuit_to_qasm",
    "contains", "density_from_vectors", "join", "kraus_for", "load_channels",
    "max_entangled", "mutual_containment", "oracle_reachable",
    "partial_trace_branches", "parse_qasm", "reachable_subspace", "step_image",
    "support_basis",
]

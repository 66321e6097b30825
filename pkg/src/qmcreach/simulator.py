"""One-step simulation of a quantum Markov chain on pure states.

The step image of a state is the set of unnormalized Kraus-branch
successor vectors.  Branch operators are never assembled as d x d
matrices here: gates and 2x2 Kraus factors are applied to vectors one
at a time, so memory stays linear in the state dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    CapExceeded,
    DEFAULT_TOL,
    QUBIT_CAP_DEFAULT,
    Tolerances,
    matvec_2level,
    num_qubits_of,
)
from .qasm_front import Circuit, GateKind, GateOp
from .qmc_model import QuantumMarkovChain, branch_plan

__all__ = [
    "BranchSet", "u3_matrix", "apply_gate", "apply_circuit", "step_image",
    "partial_trace_branches", "max_entangled", "choi_branches",
]

_SQ2 = 1.0 / math.sqrt(2.0)

GATE_1Q = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=np.complex128),
}

_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_XP1 = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # X after projecting onto |1>


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """Standard single-qubit rotation u3(theta, phi, lambda)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [[c, -np.exp(1j * lam) * s],
         [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


def _axis_index(n: int, fixed: dict[int, int]):
    """Index tuple selecting the slice where the given qubit axes equal the given bits."""
    idx: list[object] = [slice(None)] * n
    for q, bit in fixed.items():
        idx[q] = bit
    return tuple(idx)


def apply_gate(g: GateOp, v: np.ndarray) -> np.ndarray:
    """Apply one gate to a state vector, returning a new vector."""
    n = num_qubits_of(v)
    if max(g.qubits) >= n:
        raise ValueError(f"gate {g} exceeds qubit count {n}")
    if g.kind in GATE_1Q:
        return matvec_2level(GATE_1Q[g.kind], g.qubits[0], v)
    if g.kind is GateKind.U3:
        return matvec_2level(u3_matrix(*g.params), g.qubits[0], v)

    t = v.reshape((2,) * n).copy()
    if g.kind is GateKind.CX:
        c, tq = g.qubits
        sel = _axis_index(n, {c: 1})
        # slicing removed axis c, so target axis shifts down past it
        t[sel] = np.flip(t[sel], axis=tq - (1 if tq > c else 0))
    elif g.kind is GateKind.CZ:
        c, tq = g.qubits
        t[_axis_index(n, {c: 1, tq: 1})] *= -1.0
    elif g.kind is GateKind.CCX:
        c1, c2, tq = g.qubits
        sel = _axis_index(n, {c1: 1, c2: 1})
        t[sel] = np.flip(t[sel], axis=tq - sum(1 for c in (c1, c2) if tq > c))
    elif g.kind is GateKind.SWAP:
        a, b = g.qubits
        t = np.swapaxes(t, a, b)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled gate kind {g.kind}")
    return t.reshape(v.shape[0])


def apply_circuit(circuit: Circuit, v: np.ndarray) -> np.ndarray:
    for op in circuit.ops:
        v = apply_gate(op, v)
    return v


@dataclass
class BranchSet:
    """Unnormalized successor vectors with their Kraus-choice provenance.

    ``provenance[i]`` is the tuple of per-site Kraus indices that
    produced ``branches[i]``; branches below the drop threshold are not
    retained.
    """

    num_qubits: int
    branches: list[np.ndarray] = field(default_factory=list)
    provenance: list[tuple[int, ...]] = field(default_factory=list)

    def add(self, vec: np.ndarray, choice: tuple[int, ...], drop: float):
        if float(np.linalg.norm(vec)) >= drop:
            self.branches.append(vec)
            self.provenance.append(choice)

    def __len__(self):
        return len(self.branches)


def _run_branch(qmc: QuantumMarkovChain, plan, choice: tuple[int, ...], v: np.ndarray) -> np.ndarray:
    """Interleave body gates with the chosen Kraus factor of each site."""
    site_ptr = 0
    w = v
    for gate_index, op in enumerate(qmc.body.ops):
        while site_ptr < len(plan.sites) and plan.sites[site_ptr].position == gate_index:
            site = plan.sites[site_ptr]
            w = matvec_2level(plan.kraus_lists[site_ptr][choice[site_ptr]], site.qubit, w)
            site_ptr += 1
        w = apply_gate(op, w)
    while site_ptr < len(plan.sites):  # sites at position == len(ops)
        site = plan.sites[site_ptr]
        w = matvec_2level(plan.kraus_lists[site_ptr][choice[site_ptr]], site.qubit, w)
        site_ptr += 1
    return w


def step_image(qmc: QuantumMarkovChain, v: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> BranchSet:
    """All Kraus-branch successors of v under one step of the chain.

    Branch order follows the lexicographic Kraus index tuples, so the
    result is deterministic.  For a unitary chain the single branch is
    the circuit body applied to v.
    """
    if num_qubits_of(v) != qmc.num_qubits:
        raise ValueError(f"state has {num_qubits_of(v)} qubits, chain has {qmc.num_qubits}")
    plan = branch_plan(qmc)
    out = BranchSet(num_qubits=qmc.num_qubits)
    for choice in plan.choices():
        out.add(_run_branch(qmc, plan, choice, v), choice, tol.branch_drop)
    return out


def partial_trace_branches(v: np.ndarray, traced_qubit: int, tol: Tolerances = DEFAULT_TOL) -> BranchSet:
    """Trace out one qubit of a pure state without leaving vector form.

    Measure the qubit in the Z basis and flip on outcome one, keeping
    both branches: {P0 v, X P1 v}.  The traced qubit ends in |0> in
    every branch, and the branch set as a density operator,
    sum |b><b|, equals |0><0| on that qubit tensored with the partial
    trace of |v><v| over it.
    """
    n = num_qubits_of(v)
    if not (0 <= traced_qubit < n):
        raise ValueError(f"traced qubit {traced_qubit} out of range for {n} qubits")
    out = BranchSet(num_qubits=n)
    out.add(matvec_2level(_P0, traced_qubit, v), (0,), tol.branch_drop)
    out.add(matvec_2level(_XP1, traced_qubit, v), (1,), tol.branch_drop)
    return out


def max_entangled(n: int, cap: int = QUBIT_CAP_DEFAULT) -> np.ndarray:
    """The maximally entangled state on 2n qubits, pairing qubit i with qubit n+i."""
    if n < 1:
        raise ValueError("need at least one qubit per half")
    if 2 * n > cap:
        raise CapExceeded(f"maximally entangled state needs {2*n} qubits, cap is {cap}")
    d = 1 << n
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / math.sqrt(d)
    return v


def choi_branches(qmc: QuantumMarkovChain, tol: Tolerances = DEFAULT_TOL,
                  cap: int = QUBIT_CAP_DEFAULT) -> BranchSet:
    """Pure-state decomposition of the (normalized) Choi matrix of the step.

    Each branch operator acts on the first half of the maximally
    entangled state; sum |b><b| over the result equals J(E)/d.
    """
    n = qmc.num_qubits
    phi = max_entangled(n, cap=cap)  # raises CapExceeded when 2n > cap
    plan = branch_plan(qmc)
    out = BranchSet(num_qubits=2 * n)
    for choice in plan.choices():
        # qubit indices 0..n-1 address the first half of the doubled register
        out.add(_run_branch(qmc, plan, choice, phi), choice, tol.branch_drop)
    return out

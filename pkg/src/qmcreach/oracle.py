"""Brute-force density-matrix reference for reachability.

The reachable subspace from rho equals the support of
sigma = sum_{i=0}^{d-1} E^i(rho), so a small-scale implementation that
materializes branch operators as dense matrices and iterates the
channel d-1 times gives an independent answer to check the search
engine against.  Everything here is deliberately simple and O(d^3)-ish
per step; the qubit cap keeps it honest.

Matrix route: gates are embedded by Kronecker products and branch
operators composed by matrix multiplication, sharing no application
machinery with the vector simulator.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .numerics import CapExceeded, DEFAULT_TOL, Tolerances, gram_schmidt
from .qasm_front import GateKind, GateOp
from .qmc_model import QuantumMarkovChain, branch_plan
from .reach_engine import SubspaceBasis

__all__ = [
    "ORACLE_QUBIT_CAP", "branch_operators", "evolve_density", "support_basis",
    "oracle_reachable", "join", "density_from_vectors", "validate_density",
]

ORACLE_QUBIT_CAP = 6

_I2 = np.eye(2, dtype=np.complex128)
_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)

# single-qubit gate matrices, written out rather than imported, so the
# oracle's numbers come from a second source
_SQ2 = 2.0 ** -0.5
_GATE_1Q = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    GateKind.S: np.diag([1, 1j]).astype(np.complex128),
    GateKind.SDG: np.diag([1, -1j]).astype(np.complex128),
    GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128),
    GateKind.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]).astype(np.complex128),
}


def _embed(m: np.ndarray, qubit: int, n: int) -> np.ndarray:
    factors = [_I2] * n
    factors[qubit] = m
    return reduce(np.kron, factors)


def _u3(theta, phi, lam):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=np.complex128,
    )


def gate_matrix(op: GateOp, n: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of one gate."""
    if op.kind in _GATE_1Q:
        return _embed(_GATE_1Q[op.kind], op.qubits[0], n)
    if op.kind is GateKind.U3:
        return _embed(_u3(*op.params), op.qubits[0], n)
    d = 1 << n
    if op.kind is GateKind.CX:
        c, t = op.qubits
        return _embed(_P0, c, n) + _embed(_P1, c, n) @ _embed(_GATE_1Q[GateKind.X], t, n)
    if op.kind is GateKind.CZ:
        c, t = op.qubits
        return _embed(_P0, c, n) + _embed(_P1, c, n) @ _embed(_GATE_1Q[GateKind.Z], t, n)
    if op.kind is GateKind.CCX:
        c1, c2, t = op.qubits
        both = _embed(_P1, c1, n) @ _embed(_P1, c2, n)
        return np.eye(d, dtype=np.complex128) - both + both @ _embed(_GATE_1Q[GateKind.X], t, n)
    if op.kind is GateKind.SWAP:
        a, b = op.qubits
        cnot = lambda x, y: _embed(_P0, x, n) + _embed(_P1, x, n) @ _embed(_GATE_1Q[GateKind.X], y, n)
        return cnot(a, b) @ cnot(b, a) @ cnot(a, b)
    raise ValueError(f"unhandled gate kind {op.kind}")  # pragma: no cover


def _require_cap(qmc: QuantumMarkovChain, cap: int):
    if qmc.num_qubits > cap:
        raise CapExceeded(
            f"oracle handles at most {cap} qubits, chain has {qmc.num_qubits}"
        )


def branch_operators(qmc: QuantumMarkovChain, cap: int = ORACLE_QUBIT_CAP) -> list[np.ndarray]:
    """Every branch of one step as an explicit matrix, in branch-index order."""
    _require_cap(qmc, cap)
    n = qmc.num_qubits
    plan = branch_plan(qmc)
    gate_mats = [gate_matrix(op, n) for op in qmc.body.ops]
    ops = []
    for choice in plan.choices():
        b = np.eye(1 << n, dtype=np.complex128)
        site_ptr = 0
        for gate_index, g in enumerate(gate_mats):
            while site_ptr < len(plan.sites) and plan.sites[site_ptr].position == gate_index:
                k = plan.kraus_lists[site_ptr][choice[site_ptr]]
                b = _embed(k, plan.sites[site_ptr].qubit, n) @ b
                site_ptr += 1
            b = g @ b
        while site_ptr < len(plan.sites):
            k = plan.kraus_lists[site_ptr][choice[site_ptr]]
            b = _embed(k, plan.sites[site_ptr].qubit, n) @ b
            site_ptr += 1
        ops.append(b)
    return ops


def validate_density(rho: np.ndarray) -> np.ndarray:
    """Check Hermiticity, trace, and non-negative diagonal; return as complex128."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    tr = float(np.trace(rho).real)
    if not (0.0 < tr <= 1.0 + 1e-8):
        raise ValueError(f"density matrix trace {tr} outside (0, 1]")
    if float(rho.diagonal().real.min()) < -1e-10:
        raise ValueError("density matrix has a negative diagonal entry")
    return rho


def evolve_density(qmc: QuantumMarkovChain, rho: np.ndarray, cap: int = ORACLE_QUBIT_CAP) -> np.ndarray:
    """One step of the chain on a density matrix: sum_B B rho B^dag."""
    _require_cap(qmc, cap)
    bs = branch_operators(qmc, cap)
    out = np.zeros_like(np.asarray(rho, dtype=np.complex128))
    for b in bs:
        out += b @ rho @ b.conj().T
    return out


def support_basis(rho: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column space of a Hermitian PSD matrix.

    Column-pivoted Gram-Schmidt: repeatedly take the largest remaining
    column, stopping when the best pivot norm falls to
    tol.null_threshold.  For Hermitian PSD input the column space
    equals the span of eigenvectors with nonzero eigenvalue, so no
    eigensolver is needed.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[0]
    n = d.bit_length() - 1
    if rho.shape != (d, d) or (1 << n) != d:
        raise ValueError(f"expected a square matrix with power-of-two size, got {rho.shape}")
    cols = rho.copy()
    basis: list[np.ndarray] = []
    while len(basis) < d:
        norms = np.linalg.norm(cols, axis=0)
        j = int(np.argmax(norms))
        if norms[j] <= tol.null_threshold:
            break
        q = cols[:, j] / norms[j]
        basis.append(q)
        cols -= np.outer(q, q.conj() @ cols)
    return SubspaceBasis(num_qubits=n, vectors=tuple(basis))


def oracle_reachable(
    qmc: QuantumMarkovChain,
    rho: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = ORACLE_QUBIT_CAP,
) -> SubspaceBasis:
    """Reachable subspace as supp of the running average of E^i(rho), i < d.

    Every term is renormalized to unit trace before it joins the
    average, so each power contributes equal weight 1/d and no
    direction is lost to scaling, whether the channel shrinks traces or
    not.  The span is unaffected: the terms are positive semidefinite
    and the weights strictly positive.
    """
    _require_cap(qmc, cap)
    rho = validate_density(rho)
    if rho.shape[0] != 1 << qmc.num_qubits:
        raise ValueError("density matrix size does not match the chain")
    d = 1 << qmc.num_qubits
    cur = rho / np.trace(rho).real
    acc = cur
    for i in range(1, d):
        cur = evolve_density(qmc, cur, cap)
        tr = float(np.trace(cur).real)
        if tr <= 1e-100:  # channel annihilated the state; later powers stay zero
            break
        cur = cur / tr
        acc = (i * acc + cur) / (i + 1)
    return support_basis(acc, tol)


def join(a: SubspaceBasis, b: SubspaceBasis, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Smallest subspace containing both: Gram-Schmidt over the union."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("subspaces live on different qubit counts")
    merged = gram_schmidt(list(a.vectors) + list(b.vectors), tol)
    return SubspaceBasis(num_qubits=a.num_qubits, vectors=tuple(merged))


def density_from_vectors(vectors: list[np.ndarray], weights: list[float] | None = None) -> np.ndarray:
    """Unit-trace mixture sum_i w_i |v_i><v_i| of the given (nonzero) vectors."""
    if not vectors:
        raise ValueError("need at least one vector")
    if weights is None:
        weights = [1.0] * len(vectors)
    if len(weights) != len(vectors) or any(w <= 0 for w in weights):
        raise ValueError("weights must be positive and match the vector count")
    rho = np.zeros((vectors[0].shape[0],) * 2, dtype=np.complex128)
    for w, v in zip(weights, vectors):
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise ValueError("zero vector in mixture")
        u = v / nrm
        rho += w * np.outer(u, u.conj())
    return rho / np.trace(rho).real

"""Reachable-subspace computation by breadth-first search over dimensions.

Starting from an orthonormal basis of the initial support, repeatedly
expand frontier states through the chain's Kraus branches, keep only
the component of each successor orthogonal to everything found so far,
and stop when the queue drains or the whole space is spanned.  Each
accepted direction enlarges the basis by one, so the loop runs at most
d times.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .numerics import (
    CapExceeded,
    DEFAULT_TOL,
    QUBIT_CAP_DEFAULT,
    Tolerances,
    gram_schmidt,
    normalize,
    num_qubits_of,
    project_onto,
)
from .qmc_model import QuantumMarkovChain
from .simulator import step_image

__all__ = ["SubspaceBasis", "ReachReport", "reachable_subspace", "contains",
           "span_residual", "mutual_containment"]


@dataclass(frozen=True)
class SubspaceBasis:
    """Ordered orthonormal basis of a subspace of the n-qubit state space."""

    num_qubits: int
    vectors: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def check(self, tol: Tolerances = DEFAULT_TOL):
        """Assert orthonormality; raises on drift beyond tol.ortho_check."""
        for i, a in enumerate(self.vectors):
            nrm = float(np.linalg.norm(a))
            if abs(nrm - 1.0) > tol.ortho_check:
                raise RuntimeError(f"basis vector {i} has norm {nrm}")
            for j in range(i):
                ov = abs(np.vdot(self.vectors[j], a))
                if ov > tol.ortho_check:
                    raise RuntimeError(f"basis vectors {j},{i} overlap by {ov:.3e}")


@dataclass(frozen=True)
class ReachReport:
    subspace: SubspaceBasis
    iterations: int       # queue pops
    branch_evals: int     # Kraus branches examined
    saturated: bool       # basis filled the whole space
    wall_time: float      # seconds


def span_residual(basis: SubspaceBasis | list[np.ndarray], v: np.ndarray) -> float:
    """Norm of the component of v outside span(basis)."""
    vecs = basis.vectors if isinstance(basis, SubspaceBasis) else basis
    return float(np.linalg.norm(v - project_onto(list(vecs), v)))


def contains(subspace: SubspaceBasis, v: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether v lies in the subspace, up to tol.null_threshold (scale-aware)."""
    if v.shape[0] != 1 << subspace.num_qubits:
        raise ValueError("dimension mismatch between subspace and vector")
    scale = max(1.0, float(np.linalg.norm(v)))
    return span_residual(subspace, v) <= tol.null_threshold * scale


def mutual_containment(a: SubspaceBasis, b: SubspaceBasis, threshold: float) -> tuple[bool, float]:
    """Span equality test: every basis vector of each side fits in the other.

    Returns (verdict, worst residual).
    """
    worst = 0.0
    for v in a.vectors:
        worst = max(worst, span_residual(b, v))
    for v in b.vectors:
        worst = max(worst, span_residual(a, v))
    return worst <= threshold, worst


def reachable_subspace(
    qmc: QuantumMarkovChain,
    init: list[np.ndarray],
    tol: Tolerances = DEFAULT_TOL,
    cap: int = QUBIT_CAP_DEFAULT,
) -> ReachReport:
    """Orthonormal basis of the subspace reachable from span(init).

    ``init`` carries the support of the initial density operator as
    vectors (they need not be orthogonal or normalized).  Successor
    branches are normalized before projection, so thresholds act on
    unit-scale vectors throughout.
    """
    start = time.perf_counter()
    if qmc.num_qubits > cap:
        raise CapExceeded(f"chain has {qmc.num_qubits} qubits, cap is {cap}")
    if not init:
        raise ValueError("init must contain at least one vector")
    for v in init:
        if num_qubits_of(v) != qmc.num_qubits:
            raise ValueError("init vector dimension does not match the chain")

    basis = gram_schmidt(list(init), tol)
    if not basis:
        raise ValueError("init vectors are all numerically zero")

    d = 1 << qmc.num_qubits
    queue = deque(basis)
    iterations = 0
    branch_evals = 0
    count = len(basis)
    while queue and count < d:
        state = queue.popleft()
        iterations += 1
        image = step_image(qmc, state, tol)
        for branch in image.branches:
            branch_evals += 1
            unit = normalize(branch, tol)
            if unit is None:
                continue
            residual = normalize(unit - project_onto(basis, unit), tol)
            if residual is None:
                continue
            # second projection pass keeps the basis orthonormal over long runs
            residual = normalize(residual - project_onto(basis, residual), tol)
            if residual is None:
                continue
            basis.append(residual)
            queue.append(residual)
            count += 1

    subspace = SubspaceBasis(num_qubits=qmc.num_qubits, vectors=tuple(basis))
    subspace.check(tol)
    return ReachReport(
        subspace=subspace,
        iterations=iterations,
        branch_evals=branch_evals,
        saturated=(count >= d),
        wall_time=time.perf_counter() - start,
    )

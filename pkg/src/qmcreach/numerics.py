"""Dense complex linear algebra for state vectors.

Conventions used across the package:

* A state vector over ``n`` qubits is a 1-D ``numpy`` array of complex
  amplitudes with length ``2**n``.  Index bits are big-endian: qubit 0 is
  the most significant bit of the basis-state label, so ``|q0 q1 q2>``
  has index ``4*q0 + 2*q1 + q2`` for three qubits.
* Vectors are not required to be normalized.  Kraus branches legitimately
  shrink, so "normalized" is a predicate, not an invariant.
* ``None`` is the zero marker: operations that may collapse a vector to
  numerical zero (``normalize``) return ``None`` instead of a garbage
  direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

QUBIT_CAP_DEFAULT = 12


class CapExceeded(ValueError):
    """Raised when an operation would allocate state beyond the qubit cap."""


@dataclass(frozen=True)
class Tolerances:
    """Floating-point policy shared by the engine and the oracle.

    null_threshold
        Residual norm below which a vector counts as zero.
    branch_drop
        Branch norm below which a Kraus branch is discarded outright.
    ortho_check
        Permitted deviation in orthonormality assertions.
    """

    null_threshold: float = 1e-8
    branch_drop: float = 1e-12
    ortho_check: float = 1e-7

    def __post_init__(self):
        if not (0.0 < self.branch_drop < self.null_threshold < self.ortho_check < 1.0):
            raise ValueError(
                "tolerances must satisfy 0 < branch_drop < null_threshold"
                f" < ortho_check < 1, got {self}"
            )


DEFAULT_TOL = Tolerances()


def num_qubits_of(v: np.ndarray) -> int:
    """Qubit count of a state vector; rejects lengths that are not powers of two."""
    d = v.shape[0] if v.ndim == 1 else -1
    n = d.bit_length() - 1 if d > 0 else 0
    if v.ndim != 1 or d < 2 or (1 << n) != d:
        raise ValueError(f"state vector must be 1-D with power-of-two length >= 2, got shape {v.shape}")
    return n


def as_state(v) -> np.ndarray:
    """Coerce to a complex128 vector and validate the shape."""
    arr = np.asarray(v, dtype=np.complex128)
    num_qubits_of(arr)
    return arr


def inner_product(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b> with the conjugate on the first argument."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def normalize(v: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray | None:
    """Return v/||v||, or None when ||v|| <= tol.null_threshold.

    None is a value here (the zero subspace contribution), not an error.
    """
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("non-finite amplitude in state vector")
    nrm = float(np.linalg.norm(v))
    if nrm <= tol.null_threshold:
        return None
    return v / nrm


def project_onto(basis: list[np.ndarray], s: np.ndarray) -> np.ndarray:
    """Orthogonal projection of s onto span(basis).

    The basis must be pairwise orthonormal; the result is sum_i <i|s> |i>.
    An empty basis projects everything to the zero vector.
    """
    out = np.zeros_like(s)
    for b in basis:
        out += np.vdot(b, s) * b
    return out


def gram_schmidt(vs: list[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Maximal orthonormal subset spanning span(vs).

    Modified Gram-Schmidt with one full re-orthogonalization pass per
    accepted vector; vectors whose residual drops below null_threshold
    are discarded as linearly dependent.
    """
    basis: list[np.ndarray] = []
    for v in vs:
        r = v - project_onto(basis, v)
        r = r - project_onto(basis, r)  # second sweep restores orthogonality lost to cancellation
        u = normalize(r, tol)
        if u is not None:
            basis.append(u)
    return basis


def matvec_2level(m: np.ndarray, target: int, v: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one qubit of a state vector.

    ``m`` need not be unitary; Kraus factors and projectors go through
    the same path as gates.
    """
    n = num_qubits_of(v)
    if not (0 <= target < n):
        raise ValueError(f"target qubit {target} out of range for {n} qubits")
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    t = v.reshape((2,) * n)
    t = np.tensordot(m, np.moveaxis(t, target, 0), axes=([1], [0]))
    return np.moveaxis(t, 0, target).reshape(v.shape[0])

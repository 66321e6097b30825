"""Quantum Markov chain model: circuit body plus channel sites.

One step of the chain runs the circuit body with per-site Kraus
operators interleaved at their positions.  A site at position ``k``
fires immediately before the gate at index ``k``; position
``len(body.ops)`` means after the last gate.  A branch of the step is a
choice of one Kraus operator per site, so the step super-operator is
E(rho) = sum over branches of B rho B-dagger.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass

import numpy as np

from .qasm_front import Circuit

__all__ = [
    "BitFlip", "PhaseFlip", "AmplitudeDamping", "MeasureZ", "Reset", "CustomKraus",
    "ChannelKind", "ChannelSite", "QuantumMarkovChain", "KrausBranchPlan",
    "kraus_for", "build_qmc", "branch_plan", "load_channels",
    "BRANCH_WARN_LIMIT", "COMPLETENESS_TOL",
]

BRANCH_WARN_LIMIT = 64

# completeness slack for sum K^dag K = I on built-in kinds
COMPLETENESS_TOL = 1e-10

_I2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _check_unit_interval(name: str, value: float):
    if not (isinstance(value, (int, float)) and 0.0 <= float(value) <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class BitFlip:
    """Flips the qubit with probability p: {sqrt(1-p) I, sqrt(p) X}."""

    p: float

    def __post_init__(self):
        _check_unit_interval("p", self.p)


@dataclass(frozen=True)
class PhaseFlip:
    p: float

    def __post_init__(self):
        _check_unit_interval("p", self.p)


@dataclass(frozen=True)
class AmplitudeDamping:
    """Energy decay toward |0> with rate gamma."""

    gamma: float

    def __post_init__(self):
        _check_unit_interval("gamma", self.gamma)


@dataclass(frozen=True)
class MeasureZ:
    """Projective computational-basis measurement: branches {P0, P1}."""


@dataclass(frozen=True)
class Reset:
    """Measure, then flip on outcome one: branches {P0, X P1}. Leaves the qubit in |0>."""


@dataclass(frozen=True, eq=False)
class CustomKraus:
    """User-supplied 2x2 Kraus operators.

    Completeness (sum K^dag K = I) is not required; a violation is
    reported as a warning at construction, since deliberately
    trace-decreasing operator sets are a supported modeling tool.
    """

    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("custom Kraus list must not be empty")
        frozen = []
        for i, m in enumerate(self.matrices):
            arr = np.array(m, dtype=np.complex128)
            if arr.shape != (2, 2):
                raise ValueError(f"custom Kraus matrix {i} must be 2x2, got shape {arr.shape}")
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValueError(f"custom Kraus matrix {i} has non-finite entries")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "matrices", tuple(frozen))
        defect = np.abs(sum(m.conj().T @ m for m in self.matrices) - _I2).max()
        if defect > COMPLETENESS_TOL:
            warnings.warn(
                f"custom Kraus set is not trace-preserving (completeness defect {defect:.3e})",
                stacklevel=2,
            )

    def __eq__(self, other):
        if not isinstance(other, CustomKraus):
            return NotImplemented
        return len(self.matrices) == len(other.matrices) and all(
            np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices)
        )


ChannelKind = BitFlip | PhaseFlip | AmplitudeDamping | MeasureZ | Reset | CustomKraus


def kraus_for(kind: ChannelKind) -> list[np.ndarray]:
    """The 2x2 Kraus operators of a channel kind, in branch-index order."""
    if isinstance(kind, BitFlip):
        return [np.sqrt(1.0 - kind.p) * _I2, np.sqrt(kind.p) * _X]
    if isinstance(kind, PhaseFlip):
        return [np.sqrt(1.0 - kind.p) * _I2, np.sqrt(kind.p) * _Z]
    if isinstance(kind, AmplitudeDamping):
        g = kind.gamma
        return [
            np.array([[1, 0], [0, np.sqrt(1.0 - g)]], dtype=np.complex128),
            np.array([[0, np.sqrt(g)], [0, 0]], dtype=np.complex128),
        ]
    if isinstance(kind, MeasureZ):
        return [_P0.copy(), _P1.copy()]
    if isinstance(kind, Reset):
        return [_P0.copy(), _X @ _P1]
    if isinstance(kind, CustomKraus):
        return list(kind.matrices)
    raise TypeError(f"unknown channel kind {kind!r}")


@dataclass(frozen=True)
class ChannelSite:
    """A channel kind attached at (position, qubit) in the circuit body."""

    position: int
    qubit: int
    kind: ChannelKind


@dataclass(frozen=True)
class QuantumMarkovChain:
    """A circuit body with channel sites; together they define one step E.

    ``sites`` is kept sorted by position (stable, so same-position sites
    fire in declaration order).  Build instances through build_qmc.
    """

    body: Circuit
    sites: tuple[ChannelSite, ...]
    num_qubits: int

    @property
    def is_unitary(self) -> bool:
        return not self.sites


def build_qmc(
    body: Circuit,
    sites: list[ChannelSite] | tuple[ChannelSite, ...] = (),
    branch_limit: int = BRANCH_WARN_LIMIT,
) -> QuantumMarkovChain:
    """Validate body/site compatibility and assemble the chain.

    A branch count above ``branch_limit`` is legal but warned about:
    the step image enumerates every branch, so cost is linear in it.
    """
    n_positions = len(body.ops)
    count = 1
    for i, site in enumerate(sites):
        if not (0 <= site.position <= n_positions):
            raise ValueError(
                f"site {i} ({site}): position must lie in [0, {n_positions}]"
            )
        if not (0 <= site.qubit < body.num_qubits):
            raise ValueError(f"site {i} ({site}): qubit out of range for {body.num_qubits} qubits")
        count *= len(kraus_for(site.kind))
    if count > branch_limit:
        warnings.warn(
            f"channel structure yields {count} Kraus branches per step (limit {branch_limit});"
            " expect slow image computation",
            stacklevel=2,
        )
    ordered = tuple(sorted(sites, key=lambda s: s.position))
    return QuantumMarkovChain(body=body, sites=ordered, num_qubits=body.num_qubits)


@dataclass(frozen=True)
class KrausBranchPlan:
    """Per-site Kraus lists in firing order, plus the branch index space."""

    sites: tuple[ChannelSite, ...]
    kraus_lists: tuple[tuple[np.ndarray, ...], ...]
    branch_count: int

    def choices(self):
        """All branch index tuples, in deterministic lexicographic order."""
        return itertools.product(*(range(len(ks)) for ks in self.kraus_lists))


def branch_plan(qmc: QuantumMarkovChain) -> KrausBranchPlan:
    lists = tuple(tuple(kraus_for(s.kind)) for s in qmc.sites)
    count = 1
    for ks in lists:
        count *= len(ks)
    return KrausBranchPlan(sites=qmc.sites, kraus_lists=lists, branch_count=count)


# -- channel specification files --------------------------------------

_COMMON_FIELDS = {"kind", "position", "qubit"}
_KIND_FIELDS = {
    "bitflip": {"p"},
    "phaseflip": {"p"},
    "amplitude_damping": {"gamma"},
    "measure_z": set(),
    "reset": set(),
    "custom": {"kraus"},
}


def _site_from_entry(i: int, entry) -> ChannelSite:
    where = f"channels[{i}]"
    if not isinstance(entry, dict):
        raise ValueError(f"{where}: expected an object, got {type(entry).__name__}")
    kind_name = entry.get("kind")
    if kind_name not in _KIND_FIELDS:
        known = ", ".join(sorted(_KIND_FIELDS))
        raise ValueError(f"{where}: unknown kind {kind_name!r}; known kinds: {known}")
    allowed = _COMMON_FIELDS | _KIND_FIELDS[kind_name]
    extra = set(entry) - allowed
    missing = allowed - set(entry)
    if extra:
        raise ValueError(f"{where}: unknown fields {sorted(extra)}")
    if missing:
        raise ValueError(f"{where}: missing fields {sorted(missing)}")
    position, qubit = entry["position"], entry["qubit"]
    if not isinstance(position, int) or isinstance(position, bool) or position < 0:
        raise ValueError(f"{where}: position must be a non-negative integer")
    if not isinstance(qubit, int) or isinstance(qubit, bool) or qubit < 0:
        raise ValueError(f"{where}: qubit must be a non-negative integer")

    try:
        if kind_name == "bitflip":
            kind: ChannelKind = BitFlip(p=entry["p"])
        elif kind_name == "phaseflip":
            kind = PhaseFlip(p=entry["p"])
        elif kind_name == "amplitude_damping":
            kind = AmplitudeDamping(gamma=entry["gamma"])
        elif kind_name == "measure_z":
            kind = MeasureZ()
        elif kind_name == "reset":
            kind = Reset()
        else:
            kind = CustomKraus(matrices=tuple(_parse_kraus_matrix(j, m)
                                              for j, m in enumerate(_as_list(entry["kraus"]))))
    except ValueError as e:
        raise ValueError(f"{where}: {e}") from None
    return ChannelSite(position=position, qubit=qubit, kind=kind)


def _as_list(value):
    if not isinstance(value, list) or not value:
        raise ValueError("kraus must be a non-empty list of matrices")
    return value


def _parse_kraus_matrix(j: int, m) -> np.ndarray:
    # row-major 2x2: four [re, im] pairs
    if (
        not isinstance(m, list)
        or len(m) != 4
        or any(not isinstance(e, list) or len(e) != 2 for e in m)
    ):
        raise ValueError(f"kraus[{j}] must be four [re, im] pairs (row-major 2x2)")
    try:
        vals = [complex(float(re), float(im)) for re, im in m]
    except (TypeError, ValueError):
        raise ValueError(f"kraus[{j}] entries must be numbers") from None
    return np.array(vals, dtype=np.complex128).reshape(2, 2)


def load_channels(text: str) -> list[ChannelSite]:
    """Parse a channel specification document.

    Format: ``{"channels": [{"kind": "bitflip", "position": 0, "qubit": 0,
    "p": 0.5}, ...]}``.  Unknown fields anywhere are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"channel file is not valid JSON: {e}") from None
    if not isinstance(doc, dict) or set(doc) != {"channels"}:
        raise ValueError('channel file must be an object with the single key "channels"')
    if not isinstance(doc["channels"], list):
        raise ValueError('"channels" must be a list')
    return [_site_from_entry(i, entry) for i, entry in enumerate(doc["channels"])]

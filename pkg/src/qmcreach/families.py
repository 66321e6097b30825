"""Bundled circuit families and random instance generation.

Three families ship with the package, mirroring classic reachability
targets:

* ``qrw_circuit``: one step of a Hadamard-coined walk on a cycle of
  2**m positions.  The conditional increment/decrement of the position
  register uses a Toffoli ladder, which needs max(0, m-2) work qubits;
  work qubits start in |0> and every ladder restores them, so the walk
  dynamics live entirely in the work-qubits-at-zero sector.
* ``grover_circuit``: one Grover iteration (phase oracle for a single
  marked item, then the diffuser), again with ladder work qubits.
* ``rus_circuit``: the body of a repeat-until-success gadget on
  |+>|+>|psi> that applies the Z-rotation (I + 2iZ)/sqrt(5) to the data
  qubit when both ancilla measurements come out zero and the identity
  otherwise; measure and reset sites on the ancillas close the loop.

The QASM/JSON files under ``circuits/`` are generated from these
builders; a test keeps them in sync.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .numerics import QUBIT_CAP_DEFAULT, matvec_2level
from .qasm_front import Circuit, GateKind, GateOp, parse_qasm
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
    load_channels,
)

__all__ = [
    "qrw_circuit", "grover_circuit", "rus_circuit", "rus_sites",
    "basis_state", "uniform_init", "random_instance", "RandomInstance",
    "BenchInstance", "bench_instances", "bundled_text",
]

_H2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)


def _mcx(controls: list[int], target: int, work: list[int]) -> list[GateOp]:
    """Multi-controlled X via a Toffoli ladder.

    Needs len(controls) - 2 work qubits, all in |0>; they are restored
    by the ladder itself, so consecutive ladders may share them.  Not
    valid for work qubits in arbitrary states.
    """
    k = len(controls)
    if k == 0:
        return [GateOp(GateKind.X, (target,))]
    if k == 1:
        return [GateOp(GateKind.CX, (controls[0], target))]
    if k == 2:
        return [GateOp(GateKind.CCX, (controls[0], controls[1], target))]
    need = k - 2
    if len(work) < need:
        raise ValueError(f"{k}-controlled X needs {need} work qubits, have {len(work)}")
    w = work[:need]
    seq = [GateOp(GateKind.CCX, (controls[0], controls[1], w[0]))]
    for i in range(2, k - 1):
        seq.append(GateOp(GateKind.CCX, (controls[i], w[i - 2], w[i - 1])))
    seq.append(GateOp(GateKind.CCX, (controls[k - 1], w[need - 1], target)))
    for i in range(k - 2, 1, -1):
        seq.append(GateOp(GateKind.CCX, (controls[i], w[i - 2], w[i - 1])))
    seq.append(GateOp(GateKind.CCX, (controls[0], controls[1], w[0])))
    return seq


def _controlled_increment(coin: int, pos: list[int], work: list[int]) -> list[GateOp]:
    # ripple add of 1, most significant position bit first so lower bits
    # still hold their original values when used as controls
    seq: list[GateOp] = []
    for i in range(len(pos)):
        seq.extend(_mcx([coin] + pos[i + 1:], pos[i], work))
    return seq


def qrw_circuit(position_bits: int) -> Circuit:
    """One step of the coined walk on a cycle of 2**position_bits nodes.

    Qubit 0 is the coin, qubits 1..m the position register (most
    significant first), and the trailing max(0, m-2) qubits are ladder
    work qubits.  Coin zero steps forward, coin one steps backward.
    """
    m = position_bits
    if m < 1:
        raise ValueError("need at least one position bit")
    coin = 0
    pos = list(range(1, 1 + m))
    work = list(range(1 + m, 1 + m + max(0, m - 2)))
    n = 1 + m + len(work)

    ops: list[GateOp] = [GateOp(GateKind.H, (coin,))]
    # +1 when the coin is zero
    ops.append(GateOp(GateKind.X, (coin,)))
    ops.extend(_controlled_increment(coin, pos, work))
    ops.append(GateOp(GateKind.X, (coin,)))
    # -1 when the coin is one: conjugate the increment by X on the position register
    for q in pos:
        ops.append(GateOp(GateKind.X, (q,)))
    ops.extend(_controlled_increment(coin, pos, work))
    for q in pos:
        ops.append(GateOp(GateKind.X, (q,)))
    return Circuit(num_qubits=n, ops=tuple(ops))


def _mcz(qubits: list[int], work: list[int]) -> list[GateOp]:
    # phase flip on |1...1> of the given qubits: conjugate a multi-controlled
    # X on the last qubit by Hadamards
    t = qubits[-1]
    return [GateOp(GateKind.H, (t,)), *_mcx(qubits[:-1], t, work), GateOp(GateKind.H, (t,))]


def grover_circuit(search_bits: int, marked: int = 0) -> Circuit:
    """One Grover iteration over ``search_bits`` qubits with one marked item.

    Search qubits come first (qubit 0 = most significant bit of the
    item label), followed by max(0, search_bits - 3) ladder work
    qubits.  The default marked item 0 keeps the all-zeros basis state
    inside the two-dimensional rotation plane, so the bundled circuits
    reach dimension 2 from the uniform and the all-zeros init alike.
    """
    k = search_bits
    if k < 2:
        raise ValueError("need at least two search qubits")
    if not (0 <= marked < (1 << k)):
        raise ValueError(f"marked item {marked} out of range for {k} bits")
    search = list(range(k))
    work = list(range(k, k + max(0, k - 3)))
    n = k + len(work)

    flips = [q for q in search if not (marked >> (k - 1 - q)) & 1]
    ops: list[GateOp] = []
    # oracle: phase -1 exactly on |marked>
    for q in flips:
        ops.append(GateOp(GateKind.X, (q,)))
    ops.extend(_mcz(search, work))
    for q in flips:
        ops.append(GateOp(GateKind.X, (q,)))
    # diffuser: reflect about the uniform superposition
    for q in search:
        ops.append(GateOp(GateKind.H, (q,)))
    for q in search:
        ops.append(GateOp(GateKind.X, (q,)))
    ops.extend(_mcz(search, work))
    for q in search:
        ops.append(GateOp(GateKind.X, (q,)))
    for q in search:
        ops.append(GateOp(GateKind.H, (q,)))
    return Circuit(num_qubits=n, ops=tuple(ops))


def rus_circuit() -> Circuit:
    """Loop body of the repeat-until-success gadget on two ancillas + data.

    Gate order: Toffoli, S on data, Toffoli, H on both ancillas, Z on
    data, then two more Hadamards that re-prepare |+>|+> after the
    measure/reset sites fire.  On ancilla outcome 00 the data qubit
    picks up (I + 2iZ)/sqrt(5) up to phase; every other outcome leaves
    it unchanged, so repetition needs no correction.
    """
    ops = (
        GateOp(GateKind.CCX, (0, 1, 2)),
        GateOp(GateKind.S, (2,)),
        GateOp(GateKind.CCX, (0, 1, 2)),
        GateOp(GateKind.H, (0,)),
        GateOp(GateKind.H, (1,)),
        GateOp(GateKind.Z, (2,)),
        GateOp(GateKind.H, (0,)),
        GateOp(GateKind.H, (1,)),
    )
    return Circuit(num_qubits=3, ops=ops)


def rus_sites() -> list[ChannelSite]:
    """Measure both ancillas, then reset them, between the H pairs (position 6)."""
    return [
        ChannelSite(position=6, qubit=0, kind=MeasureZ()),
        ChannelSite(position=6, qubit=1, kind=MeasureZ()),
        ChannelSite(position=6, qubit=0, kind=Reset()),
        ChannelSite(position=6, qubit=1, kind=Reset()),
    ]


# -- initial states ----------------------------------------------------


def basis_state(num_qubits: int, bits: str) -> np.ndarray:
    """Computational basis state from a bitstring (qubit 0 first)."""
    if len(bits) != num_qubits or any(c not in "01" for c in bits):
        raise ValueError(f"need a {num_qubits}-character bitstring, got {bits!r}")
    v = np.zeros(1 << num_qubits, dtype=np.complex128)
    v[int(bits, 2)] = 1.0
    return v


def uniform_init(num_qubits: int, active: list[int]) -> np.ndarray:
    """All-zeros state with Hadamards applied to the given qubits."""
    v = basis_state(num_qubits, "0" * num_qubits)
    for q in active:
        v = matvec_2level(_H2, q, v)
    return v


def _random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def _random_unitary_2x2(rng: np.random.Generator) -> np.ndarray:
    th, ph, la, al = rng.uniform(0.0, 2.0 * math.pi, size=4)
    c, s = math.cos(th / 2), math.sin(th / 2)
    u = np.array(
        [[c, -np.exp(1j * la) * s], [np.exp(1j * ph) * s, np.exp(1j * (ph + la)) * c]],
        dtype=np.complex128,
    )
    return np.exp(1j * al) * u


@dataclass
class RandomInstance:
    seed: int
    qmc: QuantumMarkovChain
    init_vectors: list[np.ndarray]


def random_instance(
    seed: int,
    min_qubits: int = 1,
    max_qubits: int = 3,
    max_gates: int = 10,
    max_sites: int = 2,
) -> RandomInstance:
    """Deterministic random chain + init for engine/oracle cross-checks.

    Bodies draw from the whole gate set, sites from every built-in
    channel kind; custom sites use a random unitary so instances stay
    trace-preserving.  The init is a random pure state or a rank-2
    pair.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min_qubits, max_qubits + 1))

    one_q = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
             GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.U3]
    kinds = list(one_q)
    if n >= 2:
        kinds += [GateKind.CX, GateKind.CZ, GateKind.SWAP]
    if n >= 3:
        kinds += [GateKind.CCX]

    ops = []
    for _ in range(int(rng.integers(0, max_gates + 1))):
        kind = kinds[int(rng.integers(len(kinds)))]
        arity = {GateKind.CX: 2, GateKind.CZ: 2, GateKind.SWAP: 2, GateKind.CCX: 3}.get(kind, 1)
        qubits = tuple(int(q) for q in rng.choice(n, size=arity, replace=False))
        params = tuple(float(x) for x in rng.uniform(0.0, 2.0 * math.pi, size=3)) if kind is GateKind.U3 else ()
        ops.append(GateOp(kind, qubits, params))
    body = Circuit(num_qubits=n, ops=tuple(ops))

    site_makers = [
        lambda: BitFlip(p=float(rng.uniform(0.0, 1.0))),
        lambda: PhaseFlip(p=float(rng.uniform(0.0, 1.0))),
        lambda: AmplitudeDamping(gamma=float(rng.uniform(0.0, 1.0))),
        lambda: MeasureZ(),
        lambda: Reset(),
        lambda: CustomKraus(matrices=(_random_unitary_2x2(rng),)),
    ]
    sites = []
    for _ in range(int(rng.integers(0, max_sites + 1))):
        kind = site_makers[int(rng.integers(len(site_makers)))]()
        sites.append(ChannelSite(
            position=int(rng.integers(0, len(ops) + 1)),
            qubit=int(rng.integers(0, n)),
            kind=kind,
        ))

    init = [_random_state(rng, n)]
    if rng.random() < 0.5:
        init.append(_random_state(rng, n))
    return RandomInstance(seed=seed, qmc=build_qmc(body, sites), init_vectors=init)


# -- bundled benchmark table -------------------------------------------


def bundled_text(name: str) -> str:
    """Contents of a file shipped under the circuits/ data directory."""
    return (resources.files("qmcreach.circuits") / name).read_text(encoding="utf-8")


@dataclass
class BenchInstance:
    name: str
    op_type: str  # unitary | noise | measure
    qmc: QuantumMarkovChain
    init_vectors: list[np.ndarray]
    cap: int = QUBIT_CAP_DEFAULT


def _load_bundle(qasm_name: str, channels_name: str | None) -> QuantumMarkovChain:
    body = parse_qasm(bundled_text(qasm_name))
    sites = load_channels(bundled_text(channels_name)) if channels_name else []
    return build_qmc(body, sites)


def bench_instances(stretch: bool = False) -> list[BenchInstance]:
    """The benchmark table rows, built from the shipped circuit files.

    The stretch row is a 256-node walk on 15 qubits whose conditional
    shift alone takes over a hundred Toffolis; it runs for minutes, so
    it stays opt-in.
    """
    rows: list[BenchInstance] = []

    for bits in (4, 5):
        qmc = _load_bundle(f"grover_n{bits + max(0, bits - 3)}.qasm", None)
        n = qmc.num_qubits
        rows.append(BenchInstance(
            name=f"grover-n{n}", op_type="unitary", qmc=qmc,
            init_vectors=[uniform_init(n, list(range(bits)))],
        ))

    for cycle, m in ((4, 2), (8, 3), (16, 4)):
        qmc = _load_bundle(f"qrw_c{cycle}.qasm", None)
        rows.append(BenchInstance(
            name=f"qrw-c{cycle}", op_type="unitary", qmc=qmc,
            init_vectors=[basis_state(qmc.num_qubits, "0" * qmc.num_qubits)],
        ))

    qmc = _load_bundle("qrw_c4.qasm", "qrw_c4_bitflip.channels.json")
    rows.append(BenchInstance(
        name="qrw-c4-bitflip", op_type="noise", qmc=qmc,
        init_vectors=[basis_state(3, "000")],
    ))

    qmc = _load_bundle("qrw_c8.qasm", "qrw_c8_damped.channels.json")
    rows.append(BenchInstance(
        name="qrw-c8-damped", op_type="noise", qmc=qmc,
        init_vectors=[basis_state(5, "00000"), basis_state(5, "10000")],
    ))

    qmc = _load_bundle("rus3.qasm", "rus3.channels.json")
    psi = _random_state(np.random.default_rng(2026), 1)
    data = np.kron(uniform_init(2, [0, 1]), psi)
    rows.append(BenchInstance(
        name="rus3", op_type="measure", qmc=qmc, init_vectors=[data],
    ))

    if stretch:
        qmc = _load_bundle("qrw_c256.qasm", None)
        n = qmc.num_qubits
        rows.append(BenchInstance(
            name="qrw-c256", op_type="unitary", qmc=qmc, cap=n,
            init_vectors=[basis_state(n, "0" * n), basis_state(n, "1" + "0" * (n - 1))],
        ))
    return rows

"""OpenQASM 2.0 front end.

Parses the gate subset needed for circuit bodies of quantum Markov
chains.  Non-unitary statements (``measure``, ``reset``) are rejected
here on purpose: measurements and resets are channel sites, declared in
the channel specification alongside the circuit, so that the circuit
body stays purely unitary.

Supported statements: the ``OPENQASM 2.0;`` header, an optional
``include "qelib1.inc";``, ``qreg``/``creg`` declarations, ``barrier``
(ignored), comments, and gates from the set
x y z h s sdg t tdg u3 cx cz ccx swap.  Multiple quantum registers are
flattened into one index space in declaration order.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field

__all__ = ["GateKind", "GateOp", "Circuit", "QasmError", "parse_qasm", "circuit_to_qasm"]


class QasmError(ValueError):
    """Parse or validation failure, carrying a 1-based source line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GateKind(str, enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    U3 = "u3"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    SWAP = "swap"


GATE_ARITY = {
    GateKind.X: 1, GateKind.Y: 1, GateKind.Z: 1, GateKind.H: 1,
    GateKind.S: 1, GateKind.SDG: 1, GateKind.T: 1, GateKind.TDG: 1,
    GateKind.U3: 1, GateKind.CX: 2, GateKind.CZ: 2, GateKind.CCX: 3,
    GateKind.SWAP: 2,
}

GATE_PARAM_COUNT = {kind: (3 if kind is GateKind.U3 else 0) for kind in GateKind}


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind.value} takes {GATE_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind.value} qubits must be distinct, got {self.qubits}")
        if len(self.params) != GATE_PARAM_COUNT[self.kind]:
            raise ValueError(f"{self.kind.value} takes {GATE_PARAM_COUNT[self.kind]} parameters, got {self.params}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over a flat qubit index space.

    ``cregs`` records classical register declarations from the source;
    they play no role in simulation.
    """

    num_qubits: int
    ops: tuple[GateOp, ...]
    cregs: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        for op in self.ops:
            if max(op.qubits) >= self.num_qubits:
                raise ValueError(f"gate {op} exceeds qubit count {self.num_qubits}")


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<comment>//[^\n]*)
      | (?P<newline>\n)
      | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
      | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<string>"[^"\n]*")
      | (?P<symbol>->|[;,()\[\]+\-*/])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    line = 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmError(f"unexpected character {source[pos]!r}", line)
        kind = m.lastgroup
        text = m.group()
        if kind == "newline":
            line += 1
        elif kind not in ("ws", "comment"):
            tokens.append((kind, text, line))
        pos = m.end()
    tokens.append(("eof", "", line))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def expect(self, kind, text=None):
        k, t, line = self.cur
        if k != kind or (text is not None and t != text):
            want = text if text is not None else kind
            raise QasmError(f"expected {want!r}, found {t or 'end of input'!r}", line)
        return self.advance()

    def fail(self, message):
        raise QasmError(message, self.cur[2])

    # -- expressions ---------------------------------------------------

    def parse_expr(self) -> float:
        value = self.parse_term()
        while self.cur[:2] in (("symbol", "+"), ("symbol", "-")):
            op = self.advance()[1]
            rhs = self.parse_term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def parse_term(self) -> float:
        value = self.parse_factor()
        while self.cur[:2] in (("symbol", "*"), ("symbol", "/")):
            op, _, line = self.cur
            sym = self.advance()[1]
            rhs = self.parse_factor()
            if sym == "/":
                if rhs == 0.0:
                    raise QasmError("division by zero in parameter expression", line)
                value /= rhs
            else:
                value *= rhs
        return value

    def parse_factor(self) -> float:
        k, t, line = self.cur
        if (k, t) == ("symbol", "-"):
            self.advance()
            return -self.parse_factor()
        if (k, t) == ("symbol", "("):
            self.advance()
            value = self.parse_expr()
            self.expect("symbol", ")")
            return value
        if k == "number":
            self.advance()
            return float(t)
        if k == "id" and t == "pi":
            self.advance()
            return math.pi
        raise QasmError(f"malformed parameter expression at {t or 'end of input'!r}", line)

    # -- statements ----------------------------------------------------

    def parse_program(self) -> Circuit:
        self.expect("id", "OPENQASM")
        _, version, line = self.expect("number")
        if version != "2.0":
            raise QasmError(f"unsupported OPENQASM version {version}; only 2.0 is accepted", line)
        self.expect("symbol", ";")

        qreg_base: dict[str, tuple[int, int]] = {}  # name -> (flat base, size)
        total_qubits = 0
        cregs: list[tuple[str, int]] = []
        ops: list[GateOp] = []

        while self.cur[0] != "eof":
            k, t, line = self.cur
            if k != "id":
                self.fail(f"expected a statement, found {t!r}")
            if t == "include":
                self.advance()
                _, fname, line = self.expect("string")
                if fname != '"qelib1.inc"':
                    raise QasmError(f"unsupported include {fname}; only \"qelib1.inc\" is known", line)
                self.expect("symbol", ";")
            elif t in ("qreg", "creg"):
                self.advance()
                _, name, _ = self.expect("id")
                self.expect("symbol", "[")
                _, size_text, sline = self.expect("number")
                self.expect("symbol", "]")
                self.expect("symbol", ";")
                if not size_text.isdigit() or int(size_text) < 1:
                    raise QasmError(f"register size must be a positive integer, got {size_text}", sline)
                size = int(size_text)
                if t == "qreg":
                    if name in qreg_base:
                        raise QasmError(f"duplicate qreg {name!r}", line)
                    qreg_base[name] = (total_qubits, size)
                    total_qubits += size
                else:
                    cregs.append((name, size))
            elif t == "barrier":
                self.advance()
                while self.cur[:2] != ("symbol", ";"):
                    if self.cur[0] == "eof":
                        self.fail("unterminated barrier statement")
                    self.advance()
                self.advance()
            elif t in ("measure", "reset"):
                raise QasmError(
                    f"{t!r} is not allowed in the circuit body; declare it as a"
                    f" channel site ({'measure_z' if t == 'measure' else 'reset'})"
                    " in the channel specification instead",
                    line,
                )
            elif t in ("gate", "opaque", "if"):
                raise QasmError(f"{t!r} statements are not supported by this subset", line)
            else:
                ops.append(self._parse_gate(qreg_base))

        if total_qubits == 0:
            raise QasmError("no qreg declared", self.cur[2])
        return Circuit(num_qubits=total_qubits, ops=tuple(ops), cregs=tuple(cregs))

    def _parse_gate(self, qreg_base) -> GateOp:
        _, name, line = self.advance()
        try:
            kind = GateKind(name)
        except ValueError:
            supported = " ".join(k.value for k in GateKind)
            raise QasmError(f"unknown gate {name!r}; supported gates: {supported}", line) from None

        params: list[float] = []
        if self.cur[:2] == ("symbol", "("):
            self.advance()
            if self.cur[:2] != ("symbol", ")"):
                params.append(self.parse_expr())
                while self.cur[:2] == ("symbol", ","):
                    self.advance()
                    params.append(self.parse_expr())
            self.expect("symbol", ")")
        if len(params) != GATE_PARAM_COUNT[kind]:
            raise QasmError(
                f"{name} takes {GATE_PARAM_COUNT[kind]} parameters, got {len(params)}", line
            )
        for p in params:
            if not math.isfinite(p):
                raise QasmError(f"non-finite parameter value {p!r}", line)

        qubits = [self._parse_operand(qreg_base)]
        while self.cur[:2] == ("symbol", ","):
            self.advance()
            qubits.append(self._parse_operand(qreg_base))
        self.expect("symbol", ";")

        if len(qubits) != GATE_ARITY[kind]:
            raise QasmError(f"{name} takes {GATE_ARITY[kind]} qubits, got {len(qubits)}", line)
        if len(set(qubits)) != len(qubits):
            raise QasmError(f"{name} operands must be distinct qubits", line)
        return GateOp(kind=kind, qubits=tuple(qubits), params=tuple(params))

    def _parse_operand(self, qreg_base) -> int:
        k, name, line = self.cur
        if k != "id":
            self.fail(f"expected a qubit operand, found {name or 'end of input'!r}")
        self.advance()
        if name not in qreg_base:
            raise QasmError(f"undeclared quantum register {name!r}", line)
        if self.cur[:2] != ("symbol", "["):
            raise QasmError("whole-register operands are not supported; index each qubit", line)
        self.advance()
        _, idx_text, iline = self.expect("number")
        self.expect("symbol", "]")
        if not idx_text.isdigit():
            raise QasmError(f"qubit index must be an integer, got {idx_text}", iline)
        idx = int(idx_text)
        base, size = qreg_base[name]
        if idx >= size:
            raise QasmError(f"index {idx} out of range for register {name!r} of size {size}", iline)
        return base + idx


def parse_qasm(source: str) -> Circuit:
    """Parse OpenQASM 2.0 text into a Circuit.

    Every failure raises QasmError with a 1-based line number; no other
    exception escapes for any text input.
    """
    return _Parser(_tokenize(source)).parse_program()


def _fmt_param(x: float) -> str:
    return repr(float(x))


def circuit_to_qasm(circuit: Circuit) -> str:
    """Pretty-print a Circuit; re-parsing the output reproduces the Circuit."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    for name, size in circuit.cregs:
        lines.append(f"creg {name}[{size}];")
    for op in circuit.ops:
        head = op.kind.value
        if op.params:
            head += "(" + ",".join(_fmt_param(p) for p in op.params) + ")"
        args = ",".join(f"q[{q}]" for q in op.qubits)
        lines.append(f"{head} {args};")
    return "\n".join(lines) + "\n"

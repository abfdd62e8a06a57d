"""Gate-level circuit representation, OPENQASM 2.0 import/export, ECR
rebase, and coupling-map routing.

Conventions: qubits are indexed 0..width-1; for two-qubit gates the
operand order is (control, target) for CX and (q0, q1) for ECR, where
ECR(q0, q1) = (X_{q0} + Y_{q0} X_{q1}) / sqrt(2).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

KINDS_1Q = ("h", "s", "sdg", "x", "y", "z", "rz")
KINDS_2Q = ("cx", "ecr", "swap")
KINDS = KINDS_1Q + KINDS_2Q + ("barrier", "measure")

_INVERSE_SELF = {"h", "x", "y", "z", "cx", "ecr", "swap", "barrier"}


class RoutingError(ValueError):
    pass


class UnsupportedGateError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    param: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in KINDS_2Q and (len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]):
            raise ValueError(f"{self.kind} needs two distinct qubits")
        if self.kind in KINDS_1Q and len(self.qubits) != 1:
            raise ValueError(f"{self.kind} takes one qubit")
        if self.kind == "rz":
            if self.param is None or self.param != self.param:
                raise ValueError("rz needs a finite angle")


@dataclass
class Circuit:
    width: int
    gates: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("width must be positive")
        for g in self.gates:
            if any(q < 0 or q >= self.width for q in g.qubits):
                raise ValueError(f"gate {g.kind} operand out of range")

    def add(self, kind: str, *qubits, param: float = None):
        g = Gate(kind, tuple(qubits), param)
        if any(q < 0 or q >= self.width for q in g.qubits):
            raise ValueError(f"gate {kind} operand out of range")
        self.gates.append(g)
        return self

    def __len__(self):
        return len(self.gates)


def two_qubit_count(c: Circuit) -> int:
    """CX and ECR count 1 each; a SWAP costs three two-qubit gates."""
    total = 0
    for g in c.gates:
        if g.kind in ("cx", "ecr"):
            total += 1
        elif g.kind == "swap":
            total += 3
    return total


def inverse(c: Circuit) -> Circuit:
    """Reverse gate order, invert each gate (rz angles negate, s <-> sdg)."""
    out = []
    for g in reversed(c.gates):
        if g.kind in _INVERSE_SELF:
            out.append(g)
        elif g.kind == "s":
            out.append(Gate("sdg", g.qubits))
        elif g.kind == "sdg":
            out.append(Gate("s", g.qubits))
        elif g.kind == "rz":
            out.append(Gate("rz", g.qubits, -g.param))
        else:
            raise UnsupportedGateError(f"cannot invert {g.kind}")
    return Circuit(c.width, out, dict(c.metadata))


def concat(a: Circuit, b: Circuit) -> Circuit:
    if a.width != b.width:
        raise ValueError("widths differ")
    return Circuit(a.width, a.gates + b.gates, dict(a.metadata))


def repeat(c: Circuit, times: int) -> Circuit:
    return Circuit(c.width, c.gates * times, dict(c.metadata))


# ---------------------------------------------------------------- QASM 2.0

def export_qasm2(c: Circuit) -> str:
    """OPENQASM 2.0 text; angles at 17 significant digits.  ECR must be
    lowered (see lower_ecr) before export."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.width}];"]
    if any(g.kind == "measure" for g in c.gates):
        lines.append(f"creg c[{c.width}];")
    for g in c.gates:
        if g.kind == "ecr":
            raise UnsupportedGateError("lower ECR gates before QASM export")
        if g.kind == "rz":
            lines.append(f"rz({g.param:.17g}) q[{g.qubits[0]}];")
        elif g.kind == "barrier":
            ops = ",".join(f"q[{q}]" for q in g.qubits)
            lines.append(f"barrier {ops};")
        elif g.kind == "measure":
            q = g.qubits[0]
            lines.append(f"measure q[{q}] -> c[{q}];")
        elif g.kind in KINDS_1Q:
            lines.append(f"{g.kind} q[{g.qubits[0]}];")
        else:
            ops = ",".join(f"q[{q}]" for q in g.qubits)
            lines.append(f"{g.kind} {ops};")
    return "\n".join(lines) + "\n"


def parse_qasm2(text: str) -> Circuit:
    """Parse the subset emitted by export_qasm2 (plain float angles)."""
    width = None
    gates = []
    for raw in text.splitlines():
        line = raw.split("//")[0].strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise ValueError(f"missing semicolon: {raw!r}")
        stmt = line[:-1].strip()
        if stmt.startswith("OPENQASM") or stmt.startswith("include") or stmt.startswith("creg"):
            continue
        if stmt.startswith("qreg"):
            width = int(stmt[stmt.index("[") + 1:stmt.index("]")])
            continue
        if stmt.startswith("measure"):
            q = int(stmt[stmt.index("[") + 1:stmt.index("]")])
            gates.append(Gate("measure", (q,)))
            continue
        head, _, ops = stmt.partition(" ")
        param = None
        if "(" in head:
            name, arg = head.split("(", 1)
            param = float(arg.rstrip(")"))
        else:
            name = head
        qubits = tuple(int(tok[tok.index("[") + 1:tok.index("]")])
                       for tok in ops.replace(" ", "").split(","))
        if name == "barrier":
            gates.append(Gate("barrier", qubits))
        elif name == "rz":
            gates.append(Gate("rz", qubits, param))
        elif name in KINDS_1Q or name in KINDS_2Q:
            gates.append(Gate(name, qubits))
        else:
            raise ValueError(f"unsupported statement: {raw!r}")
    if width is None:
        raise ValueError("no qreg declaration")
    return Circuit(width, gates)


# ------------------------------------------------------------- ECR rebase

def rebase_to_ecr(c: Circuit) -> Circuit:
    """Replace every CX by an ECR dressed with single-qubit gates.

    CX(a,b) = e^{-i pi/4} X_a . ECR(a,b) . (S_a tensor H_b S_b H_b),
    fixed by dense matrix check.
    """
    out = Circuit(c.width, [], dict(c.metadata))
    for g in c.gates:
        if g.kind == "cx":
            a, b = g.qubits
            out.add("s", a)
            out.add("h", b)
            out.add("s", b)
            out.add("h", b)
            out.add("ecr", a, b)
            out.add("x", a)
        else:
            out.gates.append(g)
    return out


def lower_swaps(c: Circuit) -> Circuit:
    """Expand each SWAP into its three-CX decomposition."""
    out = Circuit(c.width, [], dict(c.metadata))
    for g in c.gates:
        if g.kind == "swap":
            a, b = g.qubits
            out.add("cx", a, b)
            out.add("cx", b, a)
            out.add("cx", a, b)
        else:
            out.gates.append(g)
    return out


def lower_ecr(c: Circuit) -> Circuit:
    """Rewrite ECR in terms of qelib1 gates (inverse dressing of
    rebase_to_ecr): ECR(a,b) = e^{i pi/4} X_a . CX(a,b) . (Sdg_a tensor H_b Sdg_b H_b)."""
    out = Circuit(c.width, [], dict(c.metadata))
    for g in c.gates:
        if g.kind == "ecr":
            a, b = g.qubits
            out.add("sdg", a)
            out.add("h", b)
            out.add("sdg", b)
            out.add("h", b)
            out.add("cx", a, b)
            out.add("x", a)
        else:
            out.gates.append(g)
    return out


# ---------------------------------------------------------------- routing

@dataclass
class CouplingMap:
    edges: list  # undirected (p, q) pairs, p < q
    layout: list = None  # virtual index -> physical index

    def __post_init__(self):
        self.edges = sorted(set((min(p, q), max(p, q)) for p, q in self.edges))
        if any(p == q for p, q in self.edges):
            raise ValueError("self-loop in coupling map")

    @classmethod
    def path(cls, k: int) -> "CouplingMap":
        return cls([(i, i + 1) for i in range(k - 1)])

    @classmethod
    def all_to_all(cls, k: int) -> "CouplingMap":
        return cls([(i, j) for i in range(k) for j in range(i + 1, k)])

    @classmethod
    def from_edge_list(cls, text: str) -> "CouplingMap":
        """One edge per line: two integer endpoints, '#' comments allowed."""
        edges = []
        for raw in text.splitlines():
            line = raw.split("#")[0].strip()
            if not line:
                continue
            p, q = line.replace(",", " ").split()
            edges.append((int(p), int(q)))
        return cls(edges)

    def size(self) -> int:
        return 1 + max(max(e) for e in self.edges) if self.edges else 1

    def neighbors(self, p: int) -> list:
        out = [b for a, b in self.edges if a == p] + [a for a, b in self.edges if b == p]
        return sorted(out)

    def adjacent(self, p: int, q: int) -> bool:
        return (min(p, q), max(p, q)) in set(self.edges)


def _bfs_path(cmap: CouplingMap, src: int, dst: int):
    """Deterministic shortest path; ties resolved by smallest predecessor."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            break
        for w in cmap.neighbors(v):
            if w not in prev:
                prev[w] = v
                queue.append(w)
    if dst not in prev:
        return None
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def route(c: Circuit, cmap: CouplingMap) -> Circuit:
    """Insert SWAPs so every two-qubit gate acts on a coupled pair.

    Greedy: walk gates in order; when a gate's operands are not adjacent,
    repeatedly swap one endpoint a step along the shortest physical path,
    choosing which end to move by the distance the *next* two-qubit gate
    would see (look-ahead of one), ties moving the second operand.
    """
    size = max(cmap.size(), c.width)
    layout = list(cmap.layout) if cmap.layout else list(range(c.width))
    if len(layout) < c.width:
        raise RoutingError("layout smaller than circuit width")
    # precheck connectivity over the physical qubits we may touch
    used = set(layout[:c.width])
    for p in used:
        reach = {p}
        frontier = [p]
        while frontier:
            nxt = []
            for v in frontier:
                for w in cmap.neighbors(v):
                    if w not in reach:
                        reach.add(w)
                        nxt.append(w)
            frontier = nxt
        if not used <= reach:
            raise RoutingError("coupling map disconnected over used qubits")
        break

    def dist(p, q):
        if p == q:
            return 0
        path = _bfs_path(cmap, p, q)
        return len(path) - 1 if path else 10 ** 9

    twoq = [i for i, g in enumerate(c.gates) if g.kind in KINDS_2Q]
    next_2q = {}
    for pos, i in enumerate(twoq):
        next_2q[i] = twoq[pos + 1] if pos + 1 < len(twoq) else None

    out = Circuit(size, [], dict(c.metadata))
    out.metadata["initial_layout"] = list(layout)
    for i, g in enumerate(c.gates):
        if g.kind not in KINDS_2Q:
            if g.kind == "barrier":
                out.add("barrier", *sorted(layout[q] for q in g.qubits))
            elif g.kind == "measure":
                out.add("measure", layout[g.qubits[0]])
            else:
                out.add(g.kind, layout[g.qubits[0]], param=g.param)
            continue
        a, b = g.qubits
        while not cmap.adjacent(layout[a], layout[b]):
            path = _bfs_path(cmap, layout[a], layout[b])
            if path is None:
                raise RoutingError("no path between operands")
            # candidate swaps: move b's qubit back along the path, or a's forward
            cands = [(path[-1], path[-2]), (path[0], path[1])]
            scored = []
            for idx, (p, q) in enumerate(cands):
                trial = list(layout)
                ia = trial.index(p) if p in trial else None
                ib = trial.index(q) if q in trial else None
                if ia is not None:
                    trial[ia] = q
                if ib is not None:
                    trial[ib] = p
                here = dist(trial[a], trial[b])
                la = next_2q.get(i)
                ahead = 0
                if la is not None:
                    na, nb = c.gates[la].qubits
                    ahead = dist(trial[na], trial[nb])
                scored.append((here, ahead, idx, (p, q), trial))
            _, _, _, (p, q), layout = min(scored)
            out.add("swap", min(p, q), max(p, q))
        out.add(g.kind, layout[a], layout[b])
    out.metadata["final_layout"] = list(layout)
    return out

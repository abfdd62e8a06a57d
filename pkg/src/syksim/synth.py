"""Commuting-cluster circuit synthesis.

Each cluster is lowered to V . D . V^dag where V is a Clifford found by
symplectic elimination over GF(2) and D is a diagonal evolution built
from CX parity ladders with Rz rotations.  A small search over per-qubit
Hadamard pre-frames plus a lookahead-2 ladder ordering keeps the
two-qubit count at the reference values for N <= 8 and inside the
tolerance band above that.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, inverse
from .pauli import PauliString, WeightedPauli, commutes
from .syk import SykParams, SykInstance, build_hamiltonian, Hamiltonian
from .clustering import build_graph, dsatur_partition, ClusterPartition


def _pc(v: int) -> int:
    return v.bit_count()


def _high(v: int) -> int:
    return v.bit_length() - 1


def _low(v: int) -> int:
    return (v & -v).bit_length() - 1


# ---------------------------------------------------------------------------
# Conjugation of a signed Pauli (x, z, s) by Clifford gates, g P g^dag.
# Gates are tuples ("h", q) / ("s", q) / ("sdg", q) / ("cx", c, t) / ("cz", a, b).

def _conj_gate(g, x, z, s):
    kind = g[0]
    if kind == "h":
        j = 1 << g[1]
        if x & z & j:
            s = -s
        xb, zb = x & j, z & j
        x = (x & ~j) | zb
        z = (z & ~j) | xb
    elif kind == "s":
        j = 1 << g[1]
        if x & z & j:
            s = -s
        z ^= x & j
    elif kind == "sdg":
        j = 1 << g[1]
        if x & j and not (z & j):
            s = -s
        z ^= x & j
    elif kind == "cx":
        c, t = 1 << g[1], 1 << g[2]
        if (x & c) and (z & t) and bool(x & t) == bool(z & c):
            s = -s
        if x & c:
            x ^= t
        if z & t:
            z ^= c
    elif kind == "cz":
        a, b = 1 << g[1], 1 << g[2]
        if (x & a) and (x & b) and bool(z & a) != bool(z & b):
            s = -s
        if x & b:
            z ^= a
        if x & a:
            z ^= b
    else:
        raise ValueError(kind)
    return x, z, s


def _conj_seq(gates, x, z, s=1):
    for g in gates:
        x, z, s = _conj_gate(g, x, z, s)
    return x, z, s


# ---------------------------------------------------------------------------
# Diagonalizing Clifford for one cluster: H pre-frame, then CX collapse of
# an X-block row echelon form, then S/CZ phase cleanup, then a Hadamard layer.

def _diag_gates(masks, n, frame):
    gates = [("h", j) for j in range(n) if (frame >> j) & 1]
    rows = []
    for x, z in masks:
        xx, zz, _ = _conj_seq(gates, x, z)
        rows.append((xx, zz))
    # independent rows over GF(2), keyed by the 2n-bit word (x << n) | z
    basis = []
    for x, z in rows:
        v = (x << n) | z
        for b in basis:
            bv = (b[0] << n) | b[1]
            if bv and (v >> _high(bv)) & 1:
                v ^= bv
        if v:
            basis.append([v >> n, v & ((1 << n) - 1)])
    # echelon form on the X block, pivot = highest set bit
    pivots = []
    purez = []
    for r in basis:
        for pr, pcol in pivots:
            if (r[0] >> pcol) & 1:
                r[0] ^= pr[0]
                r[1] ^= pr[1]
        if r[0]:
            col = _high(r[0])
            for pr, _ in pivots:
                if (pr[0] >> col) & 1:
                    pr[0] ^= r[0]
                    pr[1] ^= r[1]
            pivots.append((r, col))
        else:
            purez.append(r)
    allrows = [r for r, _ in pivots] + purez

    def apply_all(g):
        gates.append(g)
        for r in allrows:
            r[0], r[1], _ = _conj_gate(g, r[0], r[1], 1)

    for r, col in pivots:
        sup = r[0] & ~(1 << col)
        while sup:
            q = _low(sup)
            sup &= sup - 1
            apply_all(("cx", col, q))
    for i, (r, col) in enumerate(pivots):
        if (r[1] >> col) & 1:
            apply_all(("s", col))
        for r2, col2 in pivots[i + 1:]:
            if (r[1] >> col2) & 1:
                apply_all(("cz", col, col2))
    for _, col in pivots:
        apply_all(("h", col))
    for r in allrows:
        if r[0]:
            raise AssertionError("diagonalization left an X component")
    return gates


def _v_two_qubit(gates) -> int:
    return sum(1 for g in gates if g[0] in ("cx", "cz"))


# ---------------------------------------------------------------------------
# Shared parity-ladder planning: queue sorted by support mask, lookahead 2,
# fold target = highest support bit, partial refold between terms.

def _transition(t, fold, tq, rest):
    if tq == t:
        return _pc(fold & ~rest) + _pc(rest & ~fold)
    return _pc(fold) + _pc(rest)


def _ladder_order(supports):
    """Emission order and CX cost for the given Z-support masks."""
    queue = sorted((s, i) for i, s in enumerate(supports) if s)
    order = []
    cost, t, fold = 0, -1, 0
    while queue:
        best = None
        for w, (s, i) in enumerate(queue[:2]):
            tq = _high(s)
            c = _transition(t, fold, tq, s & ~(1 << tq))
            if best is None or (c, w) < best[:2]:
                best = (c, w)
        c, w = best
        s, i = queue.pop(w)
        tq = _high(s)
        order.append(i)
        cost += c
        t, fold = tq, s & ~(1 << tq)
    return order, cost + _pc(fold)


def ladder_cost(supports) -> int:
    return _ladder_order(supports)[1]


def _cluster_plan_cost(masks, n, frame) -> int:
    gates = _diag_gates(masks, n, frame)
    sups = []
    for x, z in masks:
        _, zz, _ = _conj_seq(gates, x, z)
        sups.append(zz)
    return 2 * _v_two_qubit(gates) + ladder_cost(sups)


def _best_frame(masks, n) -> int:
    """Hadamard pre-frame minimizing the planned cost: exhaustive for
    n <= 4, else first-improvement single-bit hill climb from identity."""
    if n <= 4:
        best, bf = None, 0
        for f in range(1 << n):
            c = _cluster_plan_cost(masks, n, f)
            if best is None or c < best:
                best, bf = c, f
        return bf
    f = 0
    cur = _cluster_plan_cost(masks, n, f)
    improved = True
    while improved:
        improved = False
        for j in range(n):
            g = f ^ (1 << j)
            c = _cluster_plan_cost(masks, n, g)
            if c < cur:
                f, cur, improved = g, c, True
    return f


# ---------------------------------------------------------------------------

@dataclass
class DiagonalizedCluster:
    clifford: Circuit           # V with CZ lowered to H.CX.H
    diag_terms: list            # WeightedPauli, Z/I strings, signs folded in
    frame: int                  # Hadamard pre-frame bitmask
    gate_seq: list              # raw (kind, qubits...) tuples incl. cz


def _lowered_circuit(gates, n) -> Circuit:
    c = Circuit(n)
    for g in gates:
        if g[0] == "cz":
            c.add("h", g[2])
            c.add("cx", g[1], g[2])
            c.add("h", g[2])
        elif g[0] == "cx":
            c.add("cx", g[1], g[2])
        else:
            c.add(g[0], g[1])
    return c


def diagonalize_cluster(terms, n=None) -> DiagonalizedCluster:
    """Find V with V P V^dag diagonal for every cluster term P."""
    terms = list(terms)
    if n is None:
        n = terms[0].string.n
    for i, a in enumerate(terms):
        for b in terms[i + 1:]:
            if not commutes(a.string, b.string):
                raise ValueError("cluster terms must pairwise commute")
    masks = [(t.string.x, t.string.z) for t in terms]
    frame = _best_frame(masks, n)
    gates = _diag_gates(masks, n, frame)
    diag = []
    for t in terms:
        xx, zz, s = _conj_seq(gates, t.string.x, t.string.z)
        if xx:
            raise AssertionError("image not diagonal")
        diag.append(WeightedPauli(PauliString(n, 0, zz), s * t.coeff))
    return DiagonalizedCluster(_lowered_circuit(gates, n), diag, frame, gates)


def synth_diagonal_evolution(diag_terms, dt, n=None) -> Circuit:
    """Circuit for exp(-i dt sum_k c_k Z_{S_k}) via shared CX parity
    ladders; rotation convention Rz(theta) = exp(-i theta Z / 2)."""
    diag_terms = list(diag_terms)
    if n is None:
        n = diag_terms[0].string.n
    sups = []
    for t in diag_terms:
        if t.string.x:
            raise ValueError("term is not diagonal")
        sups.append(t.string.z)
    order, _ = _ladder_order(sups)
    c = Circuit(n)
    t_cur, fold = -1, 0
    for i in order:
        s = sups[i]
        tq = _high(s)
        rest = s & ~(1 << tq)
        if tq == t_cur:
            delta = fold ^ rest
        else:
            delta = 0
            for b in _bits(fold):
                c.add("cx", b, t_cur)
            for b in _bits(rest):
                c.add("cx", b, tq)
        for b in _bits(delta):
            c.add("cx", b, tq)
        c.add("rz", tq, param=2.0 * diag_terms[i].coeff * dt)
        t_cur, fold = tq, rest
    for b in _bits(fold):
        c.add("cx", b, t_cur)
    return c


def _bits(v):
    while v:
        b = _low(v)
        v &= v - 1
        yield b


def cluster_evolution(dc: DiagonalizedCluster, dt) -> Circuit:
    """V . D(dt) . V^dag as one circuit (V gates, ladder, reversed V)."""
    n = dc.clifford.width
    c = Circuit(n, list(dc.clifford.gates))
    c.gates.extend(synth_diagonal_evolution(dc.diag_terms, dt, n).gates)
    c.gates.extend(inverse(dc.clifford).gates)
    return c


# ---------------------------------------------------------------------------

@dataclass
class TrotterPlan:
    clusters: list  # DiagonalizedCluster, in partition order
    dt: float


def make_plan(h: Hamiltonian, part: ClusterPartition, dt: float) -> TrotterPlan:
    dcs = []
    for cl in part.clusters:
        dcs.append(diagonalize_cluster([h.sum.terms[v] for v in cl], h.n))
    return TrotterPlan(dcs, dt)


def trotter_step(h: Hamiltonian, part: ClusterPartition = None, dt: float = 1.5) -> Circuit:
    """One first-order step: product over clusters of V D V^dag."""
    if part is None:
        part = dsatur_partition(build_graph(h.sum), h.sum)
    plan = make_plan(h, part, dt)
    c = Circuit(h.n)
    for dc in plan.clusters:
        c.gates.extend(cluster_evolution(dc, dt).gates)
    c.metadata.update(dt=dt, steps=1)
    return c


def trotter_circuit(h: Hamiltonian, t: float, r: int, part: ClusterPartition = None) -> Circuit:
    """r repetitions of the dt = t/r step."""
    if r < 1:
        raise ValueError("need r >= 1")
    if t == 0:
        c = Circuit(h.n)
        c.metadata.update(dt=0.0, steps=0)
        return c
    step = trotter_step(h, part, dt=t / r)
    c = Circuit(h.n, step.gates * r)
    c.metadata.update(dt=t / r, steps=r)
    return c


# ---------------------------------------------------------------------------

def _unit_instance(N: int) -> SykInstance:
    import itertools
    quartets = itertools.combinations(range(1, N + 1), 4)
    return SykInstance(SykParams(N), {q: 1.0 for q in quartets})


def resource_table(n_values) -> list:
    """Rows (N, pauli strings, clusters, two-qubit gates per step).

    Counts come from the synthesis planner; coupling values do not affect
    any of the three columns.
    """
    rows = []
    for N in n_values:
        if N % 2 or N < 4:
            raise ValueError("N must be even and >= 4")
        h = build_hamiltonian(_unit_instance(N))
        part = dsatur_partition(build_graph(h.sum), h.sum)
        gates = 0
        for cl in part.clusters:
            masks = [(h.sum.terms[v].string.x, h.sum.terms[v].string.z) for v in cl]
            frame = _best_frame(masks, h.n)
            gates += _cluster_plan_cost(masks, h.n, frame)
        rows.append((N, len(h.sum), part.count, gates))
    return rows


def format_resource_table(rows) -> str:
    head = f"{'N':>4} {'strings':>8} {'clusters':>9} {'two-qubit':>10}"
    lines = [head, "-" * len(head)]
    for N, s, c, g in rows:
        lines.append(f"{N:>4} {s:>8} {c:>9} {g:>10}")
    return "\n".join(lines) + "\n"

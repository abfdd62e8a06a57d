"""Pauli twirling and self-mitigation.

Twirl tables are regenerated by brute force: a quadruple (P1,P2,P3,P4)
enters the table for gate G when (P1 x P2) G (P3 x P4) = +-G as a 4x4
matrix identity.  Self-mitigation estimates the effective depolarizing
strength from a forward-backward circuit of the same gate structure as
the physics circuit and inverts the channel algebraically.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, KINDS_2Q, concat, repeat, inverse
from .rng import substream
from .sim import (NoiseModel, ShotCounts, _M2, _PAULI1, run_noisy_batch,
                  sample_batch_outcomes)
from .syk import Hamiltonian
from .synth import trotter_step
from .clustering import ClusterPartition

_PAULI_CHARS = "IXYZ"
_CHAR_MAT = dict(zip(_PAULI_CHARS, _PAULI1))


@dataclass
class TwirlTable:
    gate: str      # "cx" or "ecr"
    entries: list  # (P1, P2, P3, P4, sign) with Pauli letters, sign = +-1


def _gate_matrix(kind: str) -> np.ndarray:
    if kind not in _M2 or kind == "swap":
        raise ValueError(f"no twirl table for gate kind {kind!r}")
    return _M2[kind]


def generate_twirl_table(kind: str) -> TwirlTable:
    """All 256 quadruples tested against the matrix identity."""
    g = _gate_matrix(kind)
    entries = []
    for p1, p2, p3, p4 in itertools.product(_PAULI_CHARS, repeat=4):
        m = np.kron(_CHAR_MAT[p1], _CHAR_MAT[p2]) @ g @ np.kron(_CHAR_MAT[p3], _CHAR_MAT[p4])
        for sign in (1, -1):
            if np.max(np.abs(m - sign * g)) < 1e-12:
                entries.append((p1, p2, p3, p4, sign))
                break
    return TwirlTable(kind, entries)


_TABLE_CACHE: dict = {}


def twirl_table(kind: str) -> TwirlTable:
    if kind not in _TABLE_CACHE:
        _TABLE_CACHE[kind] = generate_twirl_table(kind)
    return _TABLE_CACHE[kind]


def verify_twirl_table(t: TwirlTable) -> bool:
    """True iff every entry satisfies the invariance identity at 1e-12."""
    g = _gate_matrix(t.gate)
    for p1, p2, p3, p4, sign in t.entries:
        if sign not in (1, -1):
            return False
        m = np.kron(_CHAR_MAT[p1], _CHAR_MAT[p2]) @ g @ np.kron(_CHAR_MAT[p3], _CHAR_MAT[p4])
        if np.max(np.abs(m - sign * g)) >= 1e-12:
            return False
    return True


def pauli_twirl(c: Circuit, table, rng_stream) -> Circuit:
    """Conjugate each two-qubit gate by an independently drawn table
    entry; the circuit unitary changes by at most a global sign."""
    tables = {table.gate: table} if isinstance(table, TwirlTable) else dict(table)
    out = Circuit(c.width, [], dict(c.metadata))
    for g in c.gates:
        if g.kind not in KINDS_2Q:
            out.gates.append(g)
            continue
        if g.kind not in tables:
            raise KeyError(f"gate kind {g.kind!r} missing from twirl table")
        entries = tables[g.kind].entries
        p1, p2, p3, p4, _ = entries[int(rng_stream.integers(len(entries)))]
        a, b = g.qubits
        for ch, q in ((p3, a), (p4, b)):
            if ch != "I":
                out.add(ch.lower(), q)
        out.gates.append(g)
        for ch, q in ((p1, a), (p2, b)):
            if ch != "I":
                out.add(ch.lower(), q)
    return out


# ----------------------------------------------------------- depolarizing

def invert_depolarizing(raw: float, p_hat: float, n: int) -> float:
    """Invert raw = (1 - p) value + p 2^-n for the value."""
    if p_hat >= 1.0:
        raise ValueError("depolarizing channel is singular at p_hat >= 1")
    return (raw - p_hat * 2.0 ** -n) / (1.0 - p_hat)


def readout_correct(counts: ShotCounts, confusions) -> np.ndarray:
    """Invert the tensor product of per-qubit confusion matrices on the
    empirical distribution; clip negatives and renormalize."""
    n = len(next(iter(counts.counts)))
    return _readout_correct_probs(counts.to_probs(n), confusions)


def _readout_correct_probs(probs: np.ndarray, confusions) -> np.ndarray:
    inv = np.array([[1.0]])
    for m in confusions:
        m = np.asarray(m, dtype=float)
        if abs(np.linalg.det(m)) < 1e-12:
            raise ValueError("singular confusion matrix")
        inv = np.kron(inv, np.linalg.inv(m))
    p = inv @ probs
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if s == 0.0:
        raise ValueError("readout correction produced an empty distribution")
    return p / s


def confusion_from_flips(readout) -> list:
    """Per-qubit confusion matrices C[measured, true] from flip pairs."""
    return [np.array([[1.0 - p01, p10], [p01, 1.0 - p10]]) for p01, p10 in readout]


@dataclass
class MitigationEstimate:
    raw: float
    p_hat: float
    mitigated: float
    stderr: float

    def __post_init__(self):
        if not 0.0 <= self.p_hat < 1.0:
            raise ValueError("p_hat must be in [0, 1)")
        if not np.isfinite(self.mitigated):
            raise ValueError("mitigated value must be finite")


def mitigation_circuits(h: Hamiltonian, t: float, r: int,
                        part: ClusterPartition = None):
    """Physics circuit (r forward steps) and mitigation circuit (r/2
    forward then r/2 backward, the exact gate-level inverse)."""
    if r < 2 or r % 2:
        raise ValueError("self-mitigation needs a positive even step count")
    step = trotter_step(h, part, dt=t / r)
    phys = repeat(step, r)
    mit = concat(repeat(step, r // 2), repeat(inverse(step), r // 2))
    return phys, mit


def _measured_p0(circuit: Circuit, noise: NoiseModel, shots: int, n_twirls: int,
                 table, role: int) -> np.ndarray:
    """Per-variant all-zeros probability: twirl, run shot-count noisy
    trajectories (one measurement each), readout-correct."""
    n = circuit.width
    out = np.empty(n_twirls)
    confusions = confusion_from_flips(noise.readout) if noise.readout else None
    for v in range(n_twirls):
        tc = pauli_twirl(circuit, table, substream(noise.seed, 101, v, role))
        amps = run_noisy_batch(tc, shots, noise.p2, substream(noise.seed, 102, v, role))
        idx = sample_batch_outcomes(amps, n, noise.readout,
                                    substream(noise.seed, 103, v, role))
        probs = np.bincount(idx, minlength=1 << n) / shots
        if confusions is not None:
            probs = _readout_correct_probs(probs, confusions)
        out[v] = probs[0]
    return out


def self_mitigation(h: Hamiltonian, t: float, r: int, noise: NoiseModel,
                    shots: int = 2048, n_twirls: int = 75,
                    part: ClusterPartition = None,
                    n_bootstrap: int = 200) -> MitigationEstimate:
    """Twirled noisy estimate of the return probability with the
    depolarizing strength taken from the forward-backward circuit:
    p_hat = (1 - P0_mit) / (1 - 2^-n), then channel inversion."""
    phys, mit = mitigation_circuits(h, t, r, part)
    table = twirl_table("cx")
    n = h.n
    p0_phys = _measured_p0(phys, noise, shots, n_twirls, table, role=0)
    p0_mit = _measured_p0(mit, noise, shots, n_twirls, table, role=1)
    floor = 2.0 ** -n
    p_hat = max(0.0, (1.0 - p0_mit.mean()) / (1.0 - floor))
    mitigated = invert_depolarizing(p0_phys.mean(), p_hat, n)
    boot = substream(noise.seed, 104)
    vals = np.empty(n_bootstrap)
    for k in range(n_bootstrap):
        sel = boot.integers(0, n_twirls, size=n_twirls)
        ph = (1.0 - p0_mit[sel].mean()) / (1.0 - floor)
        ph = min(max(ph, 0.0), 1.0 - 1e-9)
        vals[k] = invert_depolarizing(p0_phys[sel].mean(), ph, n)
    return MitigationEstimate(p0_phys.mean(), p_hat, mitigated,
                              float(np.std(vals, ddof=1)))


def raw_return_probability(h: Hamiltonian, t: float, r: int, noise: NoiseModel,
                           shots: int = 2048, n_twirls: int = 75,
                           part: ClusterPartition = None) -> MitigationEstimate:
    """Twirled noisy measurement without channel inversion."""
    if r < 1:
        raise ValueError("need at least one step")
    step = trotter_step(h, part, dt=t / r)
    phys = repeat(step, r)
    table = twirl_table("cx")
    p0 = _measured_p0(phys, noise, shots, n_twirls, table, role=0)
    stderr = float(np.std(p0, ddof=1) / np.sqrt(len(p0))) if len(p0) > 1 else 0.0
    return MitigationEstimate(p0.mean(), 0.0, p0.mean(), stderr)

"""Observables: return probability, out-of-time-order correlators, and
disorder averaging.

The randomized OTOC protocol follows the global-unitary scheme: prepare
u|0..0>, optionally apply V, evolve by the compiled Trotter circuit,
measure W.  For Haar-random u and traceless A, B,
E[<A><B>] = (Tr A Tr B + Tr AB) / (d(d+1)), so the ratio
mean(<W>_A <W>_B) / mean(<W>_A^2) estimates the normalized OTOC and is
insensitive to a common depolarizing factor on both expectations.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, repeat
from .mitigation import (MitigationEstimate, self_mitigation,
                         raw_return_probability)
from .pauli import PauliString
from .rng import substream
from .sim import NoiseModel, exact_evolve, _apply_gate_batch
from .syk import Hamiltonian
from .synth import trotter_step
from .clustering import ClusterPartition


@dataclass
class TimeSeries:
    times: list
    values: list
    errors: list

    def __post_init__(self):
        if not (len(self.times) == len(self.values) == len(self.errors)):
            raise ValueError("times, values, errors must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")


def timeseries_csv(ts: TimeSeries) -> str:
    lines = ["t,value,stderr"]
    for t, v, e in zip(ts.times, ts.values, ts.errors):
        lines.append(f"{t!r},{v!r},{e!r}")
    return "\n".join(lines) + "\n"


def timeseries_json(ts: TimeSeries) -> str:
    return json.dumps({"times": list(ts.times), "values": list(ts.values),
                       "errors": list(ts.errors)}, indent=2) + "\n"


def timeseries_from_csv(text: str) -> TimeSeries:
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    cols = list(zip(*[[float(x) for x in row] for row in rows])) or [[], [], []]
    return TimeSeries(list(cols[0]), list(cols[1]), list(cols[2]))


def disorder_average(curves) -> TimeSeries:
    """Pointwise mean and standard error across instances."""
    curves = list(curves)
    if not curves:
        raise ValueError("no curves to average")
    t0 = curves[0].times
    for c in curves[1:]:
        if list(c.times) != list(t0):
            raise ValueError("time grids differ")
    vals = np.array([c.values for c in curves], dtype=float)
    mean = vals.mean(axis=0)
    if len(curves) > 1:
        err = vals.std(axis=0, ddof=1) / math.sqrt(len(curves))
    else:
        err = np.zeros_like(mean)
    return TimeSeries(list(t0), mean.tolist(), err.tolist())


# ------------------------------------------------------ return probability

def return_probability_exact(h: Hamiltonian, t: float) -> float:
    """|<0..0| e^{-iHt} |0..0>|^2 by exact diagonalization."""
    psi = exact_evolve(h, t)
    return float(abs(psi.amps[0]) ** 2)


def return_probability_pipeline(h: Hamiltonian, t: float, r: int,
                                noise: NoiseModel, shots: int = 2048,
                                n_twirls: int = 75, self_mit: bool = True,
                                part: ClusterPartition = None) -> MitigationEstimate:
    """Compiled, twirled, noisy, measured return probability; with
    self-mitigation enabled the depolarizing channel is inverted."""
    if self_mit:
        return self_mitigation(h, t, r, noise, shots, n_twirls, part)
    return raw_return_probability(h, t, r, noise, shots, n_twirls, part)


# ------------------------------------------------------------------- OTOC

_VALID_PAULIS = ("X", "Y", "Z")


@dataclass(frozen=True)
class OtocConfig:
    W: tuple = ("Z", 1)   # (Pauli kind, qubit)
    V: tuple = ("Z", 0)
    n_u: int = 600
    n_m: int = 4000
    beta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for kind, q in (self.W, self.V):
            if kind not in _VALID_PAULIS or q < 0:
                raise ValueError("W and V must be nontrivial Pauli placements")
        if self.n_u < 1 or self.n_m < 1:
            raise ValueError("n_u and n_m must be positive")
        if self.beta != 0.0:
            raise ValueError("only infinite temperature (beta = 0) is supported")


def _site_matrix(placement, n: int) -> np.ndarray:
    kind, q = placement
    if q >= n:
        raise ValueError(f"operator qubit {q} outside the {n}-qubit register")
    label = "".join(kind if j == q else "I" for j in range(n))
    return PauliString.from_label(label).to_matrix()


def otoc_exact(h: Hamiltonian, cfg: OtocConfig, t: float):
    """F(t) = Tr[W(t) V W(t) V]/2^n at infinite temperature, and
    C(t) = 2(1 - F(t))."""
    n = h.n
    exact_evolve(h, 0.0)  # populate the eigendecomposition cache
    w, v = h.eig_cache
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    W = _site_matrix(cfg.W, n)
    V = _site_matrix(cfg.V, n)
    Wt = u.conj().T @ W @ u
    f = np.trace(Wt @ V @ Wt @ V) / (1 << n)
    if abs(f.imag) > 1e-10:
        raise AssertionError("OTOC trace has a nonreal value")
    return float(f.real), float(2.0 * (1.0 - f.real))


def sample_cue(n: int, rng_stream: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R diagonal phases normalized away."""
    if n > 6:
        raise ValueError("dense CUE sampling is limited to n <= 6")
    d = 1 << n
    g = (rng_stream.standard_normal((d, d)) + 1j * rng_stream.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(g)
    ph = np.diagonal(r).copy()
    ph /= np.abs(ph)
    return q * ph[None, :]


def cue_pair_expectation(A: np.ndarray, B: np.ndarray, n_u: int,
                         rng: np.random.Generator) -> float:
    """Monte-Carlo mean of <0|u^dag A u|0> <0|u^dag B u|0> over CUE."""
    n = int(round(math.log2(A.shape[0])))
    acc = 0.0
    for _ in range(n_u):
        u = sample_cue(n, rng)
        col = u[:, 0]
        acc += float((col.conj() @ A @ col).real * (col.conj() @ B @ col).real)
    return acc / n_u


@dataclass
class OtocEstimate:
    value: float
    stderr: float
    n_u: int

    def __float__(self):
        return self.value


def _measure_rotation(placement, width: int) -> Circuit:
    kind, q = placement
    c = Circuit(width)
    if kind == "X":
        c.add("h", q)
    elif kind == "Y":
        c.add("sdg", q)
        c.add("h", q)
    return c


def otoc_randomized(h: Hamiltonian, cfg: OtocConfig, t: float,
                    shot_noise: bool = True, dt: float = 1.5,
                    part: ClusterPartition = None,
                    stream: int = 0) -> OtocEstimate:
    """Randomized-measurement estimate of the normalized OTOC.

    For each CUE unitary, two branches: (A) u then Trotter(t), (B) u then
    V then Trotter(t); both measured in the W eigenbasis.  Expectations
    are per-branch binomial estimates from n_m shots unless shot_noise is
    off, in which case they are exact.
    """
    n = h.n
    if t < 0:
        raise ValueError("negative time")
    r = int(round(t / dt)) if t > 0 else 0
    if t > 0 and r == 0:
        r = 1
    evo = repeat(trotter_step(h, part, dt=t / r), r) if r else Circuit(n)
    wq = cfg.W[1]
    vq = cfg.V[1]
    if wq >= n or vq >= n:
        raise ValueError("operator qubit outside the register")
    rot = _measure_rotation(cfg.W, n)

    # batch: rows 0..n_u-1 are branch A, rows n_u.. are branch B
    amps = np.empty((2 * cfg.n_u, 1 << n), dtype=complex)
    for i in range(cfg.n_u):
        u = sample_cue(n, substream(cfg.seed, 7, stream, i))
        amps[i] = u[:, 0]
        amps[cfg.n_u + i] = u[:, 0]
    vgate_col = amps[cfg.n_u:]
    for g in Circuit(n).add(cfg.V[0].lower(), vq).gates:
        vgate_col[:] = _apply_gate_batch(vgate_col, g, n)
    for g in evo.gates:
        amps = _apply_gate_batch(amps, g, n)
    for g in rot.gates:
        amps = _apply_gate_batch(amps, g, n)

    # P(bit at wq = 0) per row
    probs = np.abs(amps) ** 2
    shaped = probs.reshape(2 * cfg.n_u, 1 << wq, 2, -1)
    p_plus = shaped[:, :, 0, :].sum(axis=(1, 2))
    p_plus = np.clip(p_plus, 0.0, 1.0)
    if shot_noise:
        rng_m = substream(cfg.seed, 8, stream)
        k = rng_m.binomial(cfg.n_m, p_plus)
        expect = 2.0 * k / cfg.n_m - 1.0
    else:
        expect = 2.0 * p_plus - 1.0
    wa, wb = expect[:cfg.n_u], expect[cfg.n_u:]
    num = wa * wb
    den = wa * wa
    dbar = den.mean()
    if dbar < 1e-6:
        raise ValueError("unstable normalization: mean <W>^2 below floor")
    value = num.mean() / dbar
    resid = num - value * den
    stderr = float(np.std(resid, ddof=1) / (math.sqrt(cfg.n_u) * dbar))
    return OtocEstimate(float(value), stderr, cfg.n_u)

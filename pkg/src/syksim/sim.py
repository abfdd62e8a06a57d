"""Dense statevector simulation.

Amplitude ordering matches the Pauli matrix convention: qubit 0 is the
first tensor factor, i.e. the most significant bit of the basis index,
and bitstrings read left to right as qubit 0, 1, ...  The engine works
on batches of states (axis 0 = batch) so that noise trajectories and
twirl variants run vectorized; the public single-state entry points are
thin wrappers over the batch kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, KINDS_2Q
from .pauli import CapacityError, DENSE_LIMIT
from .syk import Hamiltonian, exact_matrix

_SQ2 = 1.0 / math.sqrt(2.0)

_M1 = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "s": np.diag([1.0, 1j]),
    "sdg": np.diag([1.0, -1j]),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1.0, -1.0]).astype(complex),
}

_CX = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
_SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
# ECR(a,b) = (X_a + Y_a X_b)/sqrt(2) with a the first tensor factor
_ECR = _SQ2 * (np.kron(_M1["x"], np.eye(2)) + np.kron(_M1["y"], _M1["x"]))

_M2 = {"cx": _CX, "swap": _SWAP, "ecr": _ECR}

# the 15 non-identity two-qubit Paulis, in (I,X,Y,Z) x (I,X,Y,Z) order
_PAULI1 = [np.eye(2, dtype=complex), _M1["x"], _M1["y"], _M1["z"]]
PAULI_PAIRS = [(i, j) for i in range(4) for j in range(4) if (i, j) != (0, 0)]
_PAULI2 = [np.kron(_PAULI1[i], _PAULI1[j]) for i, j in PAULI_PAIRS]


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.n,):
            raise ValueError("amplitude count must be 2**n")
        if abs(np.linalg.norm(self.amps) - 1.0) > 1e-10:
            raise ValueError("state is not normalized")

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class NoiseModel:
    p2: float = 0.0
    readout: tuple = None  # per-qubit (p(1|0), p(0|1))
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p2 <= 1.0:
            raise ValueError("p2 must be in [0, 1]")
        if self.readout is not None:
            for p01, p10 in self.readout:
                if not (0.0 <= p01 <= 1.0 and 0.0 <= p10 <= 1.0):
                    raise ValueError("readout probabilities must be in [0, 1]")
            object.__setattr__(self, "readout", tuple(map(tuple, self.readout)))


@dataclass
class ShotCounts:
    counts: dict  # bitstring -> count
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def frequency(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots

    def to_probs(self, n: int) -> np.ndarray:
        p = np.zeros(1 << n)
        for b, c in self.counts.items():
            p[int(b, 2)] = c / self.shots
        return p


# ------------------------------------------------------------ gate kernels

def _1q_tensor(kind, param):
    if kind == "rz":
        return np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])
    return _M1[kind]


def _apply_1q_batch(amps: np.ndarray, U: np.ndarray, q: int, n: int) -> np.ndarray:
    B = amps.shape[0]
    pre, post = 1 << q, 1 << (n - 1 - q)
    a = amps.reshape(B * pre, 2, post)
    return np.einsum("ab,xbq->xaq", U, a).reshape(B, 1 << n)


def _apply_2q_batch(amps: np.ndarray, U4: np.ndarray, a: int, b: int, n: int) -> np.ndarray:
    Ut = U4.reshape(2, 2, 2, 2)
    if a > b:
        Ut = Ut.transpose(1, 0, 3, 2)
        a, b = b, a
    B = amps.shape[0]
    pre, mid, post = 1 << a, 1 << (b - a - 1), 1 << (n - 1 - b)
    arr = amps.reshape(B * pre, 2, mid, 2, post)
    out = np.einsum("acbd,xbqdr->xaqcr", Ut, arr)
    return out.reshape(B, 1 << n)


def _apply_gate_batch(amps: np.ndarray, g, n: int) -> np.ndarray:
    if g.kind == "barrier":
        return amps
    if g.kind == "measure":
        raise ValueError("cannot apply a measure gate to a statevector")
    if g.kind in KINDS_2Q:
        return _apply_2q_batch(amps, _M2[g.kind], g.qubits[0], g.qubits[1], n)
    return _apply_1q_batch(amps, _1q_tensor(g.kind, g.param), g.qubits[0], n)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Exact unitary action, gate by gate."""
    if state.n != circuit.width:
        raise ValueError("state and circuit widths differ")
    amps = state.amps[None, :].copy()
    for g in circuit.gates:
        amps = _apply_gate_batch(amps, g, state.n)
    return StateVector(state.n, amps[0])


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit (verification oracle)."""
    n = circuit.width
    if n > DENSE_LIMIT:
        raise CapacityError(f"dense limit is {DENSE_LIMIT} qubits")
    amps = np.eye(1 << n, dtype=complex)  # row k = basis input k
    for g in circuit.gates:
        amps = _apply_gate_batch(amps, g, n)
    return amps.T


def exact_evolve(h: Hamiltonian, t: float, state: StateVector = None) -> StateVector:
    """e^{-iHt}|psi> by eigendecomposition (cached on the Hamiltonian)."""
    if h.n > DENSE_LIMIT:
        raise CapacityError(f"dense limit is {DENSE_LIMIT} qubits")
    if state is None:
        state = StateVector.zero(h.n)
    if state.n != h.n:
        raise ValueError("state and Hamiltonian widths differ")
    if h.eig_cache is None:
        w, v = np.linalg.eigh(exact_matrix(h))
        h.eig_cache = (w, v)
    w, v = h.eig_cache
    amps = v @ (np.exp(-1j * w * t) * (v.conj().T @ state.amps))
    return StateVector(h.n, amps)


# ------------------------------------------------------------------- noise

def _inject_noise_batch(amps, a, b, n, p2, rng):
    """Uniform two-qubit Pauli with probability 15*p2/16 per trajectory,
    which realizes the strength-p2 depolarizing channel on average."""
    B = amps.shape[0]
    hit = rng.random(B) < 15.0 * p2 / 16.0
    if not hit.any():
        return amps
    which = rng.integers(0, 15, size=B)
    for c in np.unique(which[hit]):
        sel = np.flatnonzero(hit & (which == c))
        amps[sel] = _apply_2q_batch(amps[sel], _PAULI2[c], a, b, n)
    return amps


def run_noisy_batch(circuit: Circuit, batch: int, p2: float,
                    rng: np.random.Generator, init: np.ndarray = None) -> np.ndarray:
    """Evolve `batch` independent trajectories of the noisy circuit;
    returns the (batch, 2**n) amplitude array."""
    n = circuit.width
    if init is None:
        amps = np.zeros((batch, 1 << n), dtype=complex)
        amps[:, 0] = 1.0
    else:
        amps = np.tile(np.asarray(init, dtype=complex), (batch, 1))
    for g in circuit.gates:
        amps = _apply_gate_batch(amps, g, n)
        if g.kind in KINDS_2Q and p2 > 0.0:
            amps = _inject_noise_batch(amps, g.qubits[0], g.qubits[1], n, p2, rng)
    return amps


def apply_noisy_circuit(state: StateVector, circuit: Circuit, noise: NoiseModel,
                        rng_stream: np.random.Generator) -> StateVector:
    """One stochastic Pauli-injection trajectory."""
    if state.n != circuit.width:
        raise ValueError("state and circuit widths differ")
    amps = run_noisy_batch(circuit, 1, noise.p2, rng_stream, init=state.amps)
    return StateVector(state.n, amps[0])


# ------------------------------------------------------------- measurement

def _readout_matrix(n: int, readout) -> np.ndarray:
    """2**n x 2**n confusion matrix of independent per-qubit flips."""
    m = np.array([[1.0]])
    for q in range(n):
        p01, p10 = readout[q] if readout is not None else (0.0, 0.0)
        m = np.kron(m, np.array([[1.0 - p01, p10], [p01, 1.0 - p10]]))
    return m


def sample_measurements(state: StateVector, shots: int, readout=None,
                        rng_stream: np.random.Generator = None) -> ShotCounts:
    """Multinomial sampling of |amps|^2 composed with the per-qubit
    readout flip model (applied as an exact convolution of the outcome
    distribution, which is distributionally equivalent)."""
    if shots < 1:
        raise ValueError("need at least one shot")
    if rng_stream is None:
        rng_stream = np.random.default_rng(0)
    p = state.probabilities()
    if readout is not None:
        p = _readout_matrix(state.n, readout) @ p
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    draw = rng_stream.multinomial(shots, p)
    counts = {format(k, f"0{state.n}b"): int(c) for k, c in enumerate(draw) if c}
    return ShotCounts(counts, shots)


def sample_batch_outcomes(amps: np.ndarray, n: int, readout,
                          rng: np.random.Generator) -> np.ndarray:
    """One measurement outcome per trajectory row; returns basis indices
    after applying per-qubit readout flips."""
    B = amps.shape[0]
    p = np.abs(amps) ** 2
    p = p / p.sum(axis=1, keepdims=True)
    cdf = np.cumsum(p, axis=1)
    u = rng.random((B, 1))
    idx = (u > cdf).sum(axis=1)
    if readout is not None:
        for q in range(n):
            p01, p10 = readout[q]
            bit = (idx >> (n - 1 - q)) & 1
            flip_p = np.where(bit == 0, p01, p10)
            flips = rng.random(B) < flip_p
            idx = np.where(flips, idx ^ (1 << (n - 1 - q)), idx)
    return idx

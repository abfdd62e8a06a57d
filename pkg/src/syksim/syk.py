"""SYK Hamiltonian sampling and Jordan-Wigner qubitization.

H = sum_{i<j<k<l} J_ijkl chi_i chi_j chi_k chi_l with couplings drawn
i.i.d. from N(0, 3! J^2 / N^3).  Majorana operators satisfy
{chi_i, chi_j} = delta_ij, i.e. chi^2 = 1/2, so each ordered quartet
contributes a single Pauli string with coefficient of magnitude J_q / 4.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, WeightedPauli, PauliSum, multiply, CapacityError, DENSE_LIMIT
from .rng import SplitMix64


@dataclass(frozen=True)
class SykParams:
    N: int
    q: int = 4
    J: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.N % 2 or not 4 <= self.N <= 24:
            raise ValueError("N must be even with 4 <= N <= 24")
        if self.q != 4:
            raise ValueError("only q = 4 is implemented")
        if self.J <= 0:
            raise ValueError("J must be positive")


@dataclass(frozen=True)
class SykInstance:
    params: SykParams
    couplings: dict  # (i,j,k,l) with i<j<k<l -> float

    def __post_init__(self):
        want = math.comb(self.params.N, 4)
        if len(self.couplings) != want:
            raise ValueError(f"expected {want} couplings, got {len(self.couplings)}")
        for v in self.couplings.values():
            if not np.isfinite(v):
                raise ValueError("non-finite coupling")


@dataclass
class Hamiltonian:
    n: int
    sum: PauliSum
    matrix_cache: np.ndarray | None = field(default=None, repr=False)
    eig_cache: tuple | None = field(default=None, repr=False)


def coupling_sigma(params: SykParams) -> float:
    """Standard deviation sqrt(3! J^2 / N^3) of each J_ijkl."""
    return params.J * math.sqrt(6.0 / params.N ** 3)


def sample_couplings(params: SykParams) -> SykInstance:
    quartets = list(itertools.combinations(range(1, params.N + 1), 4))
    gen = SplitMix64(params.seed)
    vals = gen.gaussians(len(quartets), sigma=coupling_sigma(params))
    return SykInstance(params, dict(zip(quartets, vals)))


def majorana_operator(i: int, N: int):
    """JW image of chi_i as (PauliString, scale); scale is always 1/sqrt(2).

    chi_{2k-1} = (1/sqrt2) Z_1..Z_{k-1} X_k, chi_{2k} = the same with Y_k.
    """
    if not 1 <= i <= N:
        raise ValueError(f"Majorana index {i} out of range 1..{N}")
    n = N // 2
    k = (i + 1) // 2  # 1-based qubit position
    zchain = (1 << (k - 1)) - 1  # qubits 0..k-2
    if i % 2 == 1:
        p = PauliString(n, x=1 << (k - 1), z=zchain)
    else:
        # Y = i X Z on the site, so the global form carries phase i
        p = PauliString(n, x=1 << (k - 1), z=zchain | (1 << (k - 1)), phase=1)
    return p, 1.0 / math.sqrt(2.0)


def quartet_string(quartet, N: int):
    """Pauli string of chi_i chi_j chi_k chi_l with the 1/4 scale folded out.

    Returns (canonical Hermitian string, sign) so that the operator
    product equals sign/4 * string.
    """
    n = N // 2
    prod = PauliString(n)
    for m in quartet:
        p, _ = majorana_operator(m, N)
        prod = multiply(prod, p)
    sign = prod.hermitian_sign()
    return PauliString.hermitian(n, prod.x, prod.z), sign


def build_hamiltonian(inst: SykInstance) -> Hamiltonian:
    """Qubitize: H = -sum_{i<j<k<l} J_ijkl chi_i chi_j chi_k chi_l."""
    N = inst.params.N
    terms = []
    for quartet, J_q in sorted(inst.couplings.items()):
        string, sign = quartet_string(quartet, N)
        terms.append(WeightedPauli(string, -0.25 * sign * J_q))
    return Hamiltonian(N // 2, PauliSum(N // 2, terms))


def exact_matrix(h: Hamiltonian) -> np.ndarray:
    if h.n > DENSE_LIMIT:
        raise CapacityError(f"dense limit is {DENSE_LIMIT} qubits")
    if h.matrix_cache is None:
        h.matrix_cache = h.sum.to_matrix()
    return h.matrix_cache


def instance_to_json(inst: SykInstance) -> str:
    data = {
        "params": {"N": inst.params.N, "q": inst.params.q,
                   "J": inst.params.J, "seed": inst.params.seed},
        "couplings": [{"indices": list(k), "value": v}
                      for k, v in sorted(inst.couplings.items())],
    }
    return json.dumps(data, indent=2)


def instance_from_json(text: str) -> SykInstance:
    data = json.loads(text)
    p = data["params"]
    params = SykParams(N=p["N"], q=p["q"], J=p["J"], seed=p["seed"])
    couplings = {tuple(e["indices"]): float(e["value"]) for e in data["couplings"]}
    return SykInstance(params, couplings)

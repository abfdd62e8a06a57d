"""Symplectic Pauli algebra.

An n-qubit Pauli operator is stored as two n-bit masks plus a phase
exponent: P = i^phase * X^x * Z^z, where bit j of a mask refers to qubit j
and qubit 0 is the leftmost character in the printed string form.  All
group operations are exact bit arithmetic; dense matrices exist only as a
verification oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

_CHAR_TO_XZ = {"I": (0, 0), "1": (0, 0), "\U0001d7d9": (0, 0),
               "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)

DENSE_LIMIT = 12


class DimensionError(ValueError):
    """Operands act on different qubit counts."""


class CapacityError(ValueError):
    """Dense representation requested beyond the supported width."""


def _pc(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli operator i^phase * X^x * Z^z on n qubits."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0  # exponent of i, 0..3

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.n < 1:
            raise ValueError("need at least one qubit")
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("mask exceeds qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        """The labeled Hermitian operator (Y sites are true Y) times
        i^phase; the stored phase absorbs one i per Y."""
        x = z = 0
        for j, c in enumerate(label):
            try:
                cx, cz = _CHAR_TO_XZ[c]
            except KeyError:
                raise ValueError(f"bad Pauli character {c!r}") from None
            x |= cx << j
            z |= cz << j
        return cls(len(label), x, z, phase + _pc(x & z))

    @classmethod
    def hermitian(cls, n: int, x: int, z: int, sign: int = 1) -> "PauliString":
        """Canonical Hermitian representative i^|x&z| X^x Z^z, negated
        when sign is -1."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return cls(n, x, z, _pc(x & z) + (0 if sign == 1 else 2))

    def label(self) -> str:
        return "".join(_XZ_TO_CHAR[((self.x >> j) & 1, (self.z >> j) & 1)]
                       for j in range(self.n))

    def __str__(self):
        # prefix relative to the Hermitian representative, so that the
        # operator named by the label prints bare
        k = (self.phase - _pc(self.x & self.z)) % 4
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[k]
        return pre + self.label()

    def is_hermitian(self) -> bool:
        return (self.phase - _pc(self.x & self.z)) % 4 in (0, 2)

    def hermitian_sign(self) -> int:
        """Sign s with P = s * T(x,z), T the Hermitian representative
        i^{|x&z|} X^x Z^z.  Raises if P is anti-Hermitian."""
        k = (self.phase - _pc(self.x & self.z)) % 4
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise ValueError("string has non-Hermitian phase")

    def weight(self) -> int:
        return _pc(self.x | self.z)

    def to_matrix(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise CapacityError(f"dense limit is {DENSE_LIMIT} qubits")
        m = np.array([[1.0 + 0j]])
        for j in range(self.n):
            site = np.eye(2, dtype=complex)
            if (self.x >> j) & 1:
                site = site @ _X
            if (self.z >> j) & 1:
                site = site @ _Z
            m = np.kron(m, site)
        return (1j ** self.phase) * m


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact group product a*b with phase tracking."""
    if a.n != b.n:
        raise DimensionError("qubit counts differ")
    # moving X^{b.x} left through Z^{a.z} picks up (-1)^{|a.z & b.x|}
    phase = (a.phase + b.phase + 2 * _pc(a.z & b.x)) % 4
    return PauliString(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    if a.n != b.n:
        raise DimensionError("qubit counts differ")
    return (_pc(a.x & b.z) + _pc(a.z & b.x)) % 2 == 0


def weight(a: PauliString) -> int:
    return a.weight()


def to_matrix(a: PauliString) -> np.ndarray:
    return a.to_matrix()


@dataclass(frozen=True)
class WeightedPauli:
    """Real-weighted Hermitian Pauli term; sign folded into coeff."""

    string: PauliString
    coeff: float

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise ValueError("non-finite coefficient")
        if (self.string.phase - _pc(self.string.x & self.string.z)) % 4 != 0:
            raise ValueError("term string must be the Hermitian representative "
                             "(fold the sign into the coefficient)")


@dataclass
class PauliSum:
    """Ordered real combination of distinct Pauli strings on n qubits."""

    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for t in self.terms:
            if t.string.n != self.n:
                raise DimensionError("term width differs from sum width")
            key = (t.string.x, t.string.z)
            if key in seen:
                raise ValueError(f"duplicate string {t.string.label()}")
            seen.add(key)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def to_matrix(self) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise CapacityError(f"dense limit is {DENSE_LIMIT} qubits")
        m = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for t in self.terms:
            m += t.coeff * t.string.to_matrix()
        return m

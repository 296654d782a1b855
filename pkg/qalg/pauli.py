"""
Phase-tracked Pauli strings.

The global phase is stored as an exponent k of i (phase = i**k, k in 0..3)
so products of ring and spoke observables stay exact.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Tuple

import numpy as np

from config.settings import Config
from utils.errors import CapacityError, DomainError, StructuralError

PAULI_LETTERS = 'IXYZ'

# (a, b) -> (phase exponent, letter) for the single-spin product a*b
_SINGLE_PRODUCT: Dict[Tuple[str, str], Tuple[int, str]] = {}
for _p in PAULI_LETTERS:
    _SINGLE_PRODUCT[('I', _p)] = (0, _p)
    _SINGLE_PRODUCT[(_p, 'I')] = (0, _p)
    _SINGLE_PRODUCT[(_p, _p)] = (0, 'I')
for _a, _b, _c in (('X', 'Y', 'Z'), ('Y', 'Z', 'X'), ('Z', 'X', 'Y')):
    _SINGLE_PRODUCT[(_a, _b)] = (1, _c)
    _SINGLE_PRODUCT[(_b, _a)] = (3, _c)

PAULI_MATRICES = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASE_PREFIX = {0: '+', 1: '+i', 2: '-', 3: '-i'}
_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}


@dataclass(frozen=True)
class PauliString:
    """phase * ops[0] (x) ops[1] (x) ... with phase = i**phase."""
    phase: int
    ops: str

    def __post_init__(self):
        ops = str(self.ops).upper()
        if not ops:
            raise DomainError("A Pauli string needs at least one factor")
        bad = set(ops) - set(PAULI_LETTERS)
        if bad:
            raise DomainError(f"Unknown Pauli letters {sorted(bad)} in {self.ops!r}")
        object.__setattr__(self, 'ops', ops)
        object.__setattr__(self, 'phase', int(self.phase) % 4)

    @classmethod
    def from_label(cls, label: str) -> 'PauliString':
        """Parse '+ZZI', '-iXY', 'iZ', 'XX' (no prefix means +1)."""
        text = label.strip()
        for prefix, exponent in (('+i', 1), ('-i', 3), ('i', 1), ('+', 0), ('-', 2)):
            if text.startswith(prefix):
                return cls(exponent, text[len(prefix):])
        return cls(0, text)

    @classmethod
    def identity(cls, n: int) -> 'PauliString':
        return cls(0, 'I' * n)

    @classmethod
    def single(cls, letter: str, site: int, n: int, phase: int = 0) -> 'PauliString':
        ops = ['I'] * n
        ops[site] = letter
        return cls(phase, ''.join(ops))

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def coefficient(self) -> complex:
        return _PHASE_VALUE[self.phase]

    @property
    def label(self) -> str:
        return f"{_PHASE_PREFIX[self.phase]}{self.ops}"

    @property
    def is_identity(self) -> bool:
        return set(self.ops) == {'I'}

    def __mul__(self, other: 'PauliString') -> 'PauliString':
        return pauli_mul(self, other)

    def __str__(self) -> str:
        return self.label


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product a*b with accumulated phase."""
    if a.n != b.n:
        raise StructuralError(f"Pauli string lengths differ: {a.n} vs {b.n}")
    phase = a.phase + b.phase
    letters = []
    for pa, pb in zip(a.ops, b.ops):
        k, letter = _SINGLE_PRODUCT[(pa, pb)]
        phase += k
        letters.append(letter)
    return PauliString(phase % 4, ''.join(letters))


def pauli_product(strings: Iterable[PauliString]) -> PauliString:
    """Left-to-right product of a non-empty sequence."""
    strings = list(strings)
    if not strings:
        raise StructuralError("Empty product")
    return reduce(pauli_mul, strings)


def commutes(a: PauliString, b: PauliString) -> bool:
    """Two Pauli strings commute iff they anticommute on an even number of slots."""
    if a.n != b.n:
        raise StructuralError(f"Pauli string lengths differ: {a.n} vs {b.n}")
    clashes = sum(1 for pa, pb in zip(a.ops, b.ops) if pa != 'I' and pb != 'I' and pa != pb)
    return clashes % 2 == 0


def to_dense(s: PauliString, n: int = None) -> np.ndarray:
    """Kronecker product of the 2x2 factors times the phase."""
    n = s.n if n is None else n
    if n > Config.DENSE_MAX_SPINS:
        raise CapacityError(f"Dense operators are capped at {Config.DENSE_MAX_SPINS} spins (got {n})")
    if s.n != n:
        raise StructuralError(f"Pauli string has length {s.n}, expected {n}")
    matrix = reduce(np.kron, (PAULI_MATRICES[letter] for letter in s.ops))
    return s.coefficient * matrix

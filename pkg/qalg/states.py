"""
Single-spin and separable N-spin states in the Z basis.

Convention: |+X> = (|0> + |1>)/sqrt(2), |+Y> = (|0> + i|1>)/sqrt(2), which
makes <+Y|Z|+X> / <+Y|+X> = i.
"""
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Tuple

import numpy as np

from config.settings import Config
from utils.errors import CapacityError, DomainError, StructuralError

Amplitude = complex

_SQRT_HALF = 1 / math.sqrt(2)


@dataclass(frozen=True)
class SpinState:
    """Normalized two-component spin state (up, down) in the Z basis."""
    up: complex
    down: complex

    def __post_init__(self):
        up, down = complex(self.up), complex(self.down)
        if not (math.isfinite(up.real) and math.isfinite(up.imag)
                and math.isfinite(down.real) and math.isfinite(down.imag)):
            raise DomainError("Spin state components must be finite")
        norm = abs(up) ** 2 + abs(down) ** 2
        if abs(norm - 1.0) > Config.NORM_TOL:
            raise DomainError(f"Spin state is not normalized (norm^2={norm!r})")
        object.__setattr__(self, 'up', up)
        object.__setattr__(self, 'down', down)

    @classmethod
    def from_unnormalized(cls, up: complex, down: complex) -> 'SpinState':
        norm = math.sqrt(abs(up) ** 2 + abs(down) ** 2)
        if norm == 0:
            raise DomainError("Cannot normalize the zero vector")
        return cls(up / norm, down / norm)

    @classmethod
    def plus_z(cls) -> 'SpinState':
        return cls(1, 0)

    @classmethod
    def minus_z(cls) -> 'SpinState':
        return cls(0, 1)

    @classmethod
    def plus_x(cls) -> 'SpinState':
        return cls(_SQRT_HALF, _SQRT_HALF)

    @classmethod
    def minus_x(cls) -> 'SpinState':
        return cls(_SQRT_HALF, -_SQRT_HALF)

    @classmethod
    def plus_y(cls) -> 'SpinState':
        return cls(_SQRT_HALF, 1j * _SQRT_HALF)

    @classmethod
    def minus_y(cls) -> 'SpinState':
        return cls(_SQRT_HALF, -1j * _SQRT_HALF)

    @classmethod
    def from_label(cls, label: str) -> 'SpinState':
        """Parse '+X', '-Y', '+Z', ... into the corresponding eigenstate."""
        table = {
            '+X': cls.plus_x, '-X': cls.minus_x,
            '+Y': cls.plus_y, '-Y': cls.minus_y,
            '+Z': cls.plus_z, '-Z': cls.minus_z,
        }
        key = label.strip().upper()
        if len(key) == 1:
            key = '+' + key
        if key not in table:
            raise DomainError(f"Unknown spin state label {label!r}")
        return table[key]()

    def orthogonal(self) -> 'SpinState':
        """The state orthogonal to this one (unique up to phase)."""
        return SpinState(-self.down.conjugate(), self.up.conjugate())

    def vector(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)

    def inner(self, other: 'SpinState') -> complex:
        """<self|other>."""
        return self.up.conjugate() * other.up + self.down.conjugate() * other.down


@dataclass(frozen=True)
class ProductState:
    """Separable N-spin state, one SpinState per spin."""
    spins: Tuple[SpinState, ...]

    def __post_init__(self):
        spins = tuple(self.spins)
        if len(spins) < 1:
            raise DomainError("A product state needs at least one spin")
        for spin in spins:
            if not isinstance(spin, SpinState):
                raise StructuralError(f"Expected SpinState, got {type(spin).__name__}")
        object.__setattr__(self, 'spins', spins)

    @classmethod
    def uniform(cls, spin: SpinState, n: int) -> 'ProductState':
        return cls(tuple([spin] * n))

    @classmethod
    def of(cls, spins: Iterable[SpinState]) -> 'ProductState':
        return cls(tuple(spins))

    def __len__(self) -> int:
        return len(self.spins)

    def __getitem__(self, index: int) -> SpinState:
        return self.spins[index]

    @property
    def n(self) -> int:
        return len(self.spins)

    def to_vector(self) -> np.ndarray:
        """Kronecker expansion to a 2^N vector (first spin is the most significant factor)."""
        if self.n > Config.DENSE_MAX_SPINS:
            raise CapacityError(
                f"Dense expansion capped at {Config.DENSE_MAX_SPINS} spins (got {self.n})"
            )
        return reduce(np.kron, (spin.vector() for spin in self.spins))


def product_inner(phi: ProductState, psi: ProductState) -> Amplitude:
    """<phi|psi> as the product of single-spin overlaps."""
    if len(phi) != len(psi):
        raise StructuralError(f"State lengths differ: {len(phi)} vs {len(psi)}")
    result = complex(1.0)
    for a, b in zip(phi.spins, psi.spins):
        result *= a.inner(b)
    return result


def dense_inner(phi: ProductState, psi: ProductState) -> Amplitude:
    """Oracle inner product through the expanded vectors."""
    if len(phi) != len(psi):
        raise StructuralError(f"State lengths differ: {len(phi)} vs {len(psi)}")
    return complex(np.vdot(phi.to_vector(), psi.to_vector()))


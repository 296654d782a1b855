"""
Forbidden-projector weak values of the ZZ-ring context and the unbiased
contextuality witness C^(N), built from single-spin Z weak values.

Projector j pairs the N-digit binary sequence x_j (leading digit 0, most
significant digit first) with its complement:

    (Pi_j)_w = prod_n (1 + (-1)^x_{j,n} Z_n)/2 + prod_n (1 - (-1)^x_{j,n} Z_n)/2
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from utils.errors import DomainError, StructuralError
from weakval.values import WeakValue


def _check_odd(n: int):
    if n < 1 or n % 2 == 0:
        raise DomainError(f"Number of spins must be a positive odd integer (got {n})")


@dataclass(frozen=True)
class BasisIndex:
    """Index j of a forbidden projector of the N-spin ZZ ring."""
    n: int
    j: int

    def __post_init__(self):
        _check_odd(self.n)
        if not 0 <= self.j < 2 ** (self.n - 1):
            raise DomainError(f"Index j={self.j} outside [0, {2 ** (self.n - 1) - 1}] for N={self.n}")

    @property
    def bits(self) -> Tuple[int, ...]:
        return tuple((self.j >> (self.n - 1 - k)) & 1 for k in range(self.n))

    @property
    def popcount(self) -> int:
        return bin(self.j).count('1')

    def label(self) -> str:
        return f"Pi^({self.n})_{self.j}"


def ideal_zw(n: int) -> np.ndarray:
    """Z_w = i on every spin (|+X> preselection, <+Y| postselection)."""
    return np.full(n, 1j, dtype=complex)


def _as_zw(zw: Sequence[WeakValue], n: int) -> np.ndarray:
    values = np.asarray(zw, dtype=complex)
    if values.shape[-1:] != (n,):
        raise StructuralError(f"Expected {n} single-spin weak values, got shape {values.shape}")
    return values


def _bit_matrix(n: int) -> np.ndarray:
    """Rows are the 2^(N-1) representative sequences x_j, most significant digit first."""
    j = np.arange(2 ** (n - 1), dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)[None, :]
    return ((j >> shifts) & 1).astype(np.int8)


def _sign_from_popcount(n: int, popcount) -> np.ndarray:
    m = np.mod(n - 2 * np.asarray(popcount), 8)
    return np.where((m == 1) | (m == 7), 1, -1)


def forbidden_projector_wv(idx: BasisIndex, zw: Sequence[WeakValue]) -> WeakValue:
    """Weak value of the forbidden projector Pi_j^(N)."""
    values = _as_zw(zw, idx.n)
    if values.ndim != 1:
        raise StructuralError("forbidden_projector_wv takes one weak value per spin")
    signs = 1 - 2 * np.asarray(idx.bits)
    first = np.prod((1 + signs * values) / 2)
    second = np.prod((1 - signs * values) / 2)
    return complex(first + second)


def projector_weak_values(n: int, zw: Sequence[WeakValue]) -> np.ndarray:
    """All 2^(N-1) forbidden-projector weak values, indexed by j."""
    _check_odd(n)
    values = _as_zw(zw, n)
    signs = 1 - 2 * _bit_matrix(n)
    first = np.prod((1 + signs * values[None, :]) / 2, axis=1)
    second = np.prod((1 - signs * values[None, :]) / 2, axis=1)
    return first + second


def sign_pattern(n: int, j: int) -> int:
    """
    s_j = sign Re (Pi_j)_w at Z_w = i.

    At the ideal point (Pi_j)_w = 2^(1-N/2) cos(pi m / 4) with m = N - 2 popcount(x_j),
    so the sign is read off m mod 8.
    """
    idx = BasisIndex(n, j)
    return int(_sign_from_popcount(n, idx.popcount))


def sign_pattern_direct(n: int, j: int) -> int:
    """Sign of Re (Pi_j)_w evaluated through the product formula at the ideal point."""
    value = forbidden_projector_wv(BasisIndex(n, j), ideal_zw(n))
    return 1 if value.real > 0 else -1


def witness_from_projectors(n: int, projectors: Sequence[WeakValue]) -> WeakValue:
    """C^(N)_w = 1 - sum_j s_j (Pi_j)_w from the 2^(N-1) basis weak values in index order."""
    _check_odd(n)
    values = np.asarray(projectors, dtype=complex)
    if values.shape != (2 ** (n - 1),):
        raise StructuralError(f"Expected {2 ** (n - 1)} projector weak values, got shape {values.shape}")
    signs = _sign_from_popcount(n, _bit_matrix(n).sum(axis=1))
    return complex(1 - np.sum(signs * values))


def witness_C(n: int, zw: Sequence[WeakValue]) -> WeakValue:
    return witness_from_projectors(n, projector_weak_values(n, zw))


def witness_c_batch(zw: np.ndarray) -> np.ndarray:
    """
    C^(N)_w for stacked inputs of shape (..., N).

    s_j depends only on the popcount and is symmetric under complement, so the
    signed sum over representatives equals sum_p s(p) e_p with e_p the t^p
    coefficient of prod_n ((1 + Z_n)/2 + t (1 - Z_n)/2).
    """
    values = np.asarray(zw, dtype=complex)
    n = values.shape[-1]
    _check_odd(n)
    plus = (1 + values) / 2
    minus = (1 - values) / 2
    coeffs = np.zeros(values.shape[:-1] + (n + 1,), dtype=complex)
    coeffs[..., 0] = 1
    for k in range(n):
        shifted = np.zeros_like(coeffs)
        shifted[..., 1:] = coeffs[..., :-1] * minus[..., k, None]
        coeffs = coeffs * plus[..., k, None] + shifted
    weights = _sign_from_popcount(n, np.arange(n + 1))
    return 1 - np.sum(coeffs * weights, axis=-1)


def projector_wv_batch(idx: BasisIndex, zw: np.ndarray) -> np.ndarray:
    """(Pi_j)_w for stacked inputs of shape (..., N)."""
    values = _as_zw(zw, idx.n)
    signs = 1 - 2 * np.asarray(idx.bits)
    first = np.prod((1 + signs * values) / 2, axis=-1)
    second = np.prod((1 - signs * values) / 2, axis=-1)
    return first + second


def ideal_witness_value(n: int) -> float:
    """Re C^(N)_w at the ideal point: 1 - 2^((N-1)/2)."""
    _check_odd(n)
    return 1 - 2 ** ((n - 1) / 2)


def violation_sigmas(re: float, sigma_re: float) -> float:
    """How many sigma Re lies below the noncontextual bound 0 (zero when Re >= 0)."""
    if re >= 0:
        return 0.0
    if sigma_re == 0:
        return math.inf
    return -re / sigma_re


@dataclass
class WitnessResult:
    value: complex
    sigma_re: float
    sigma_im: float
    violation_sigmas: float

    @classmethod
    def from_value(cls, value: complex, sigma_re: float, sigma_im: float) -> 'WitnessResult':
        if sigma_re < 0 or sigma_im < 0:
            raise DomainError("Standard deviations must be non-negative")
        value = complex(value)
        return cls(value, float(sigma_re), float(sigma_im), violation_sigmas(value.real, sigma_re))

    def to_dict(self) -> dict:
        return {
            're': self.value.real,
            'im': self.value.imag,
            'sigma_re': self.sigma_re,
            'sigma_im': self.sigma_im,
            'violation_sigmas': self.violation_sigmas,
        }

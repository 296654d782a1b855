"""Shared helpers for building states and dense oracles in tests."""
from functools import reduce

import numpy as np

from qalg.pauli import PauliString, to_dense
from qalg.states import ProductState, SpinState


def random_spin(rng: np.random.Generator) -> SpinState:
    up, down = rng.normal(size=2) + 1j * rng.normal(size=2)
    return SpinState.from_unnormalized(up, down)


def random_product_state(rng: np.random.Generator, n: int) -> ProductState:
    return ProductState.of(random_spin(rng) for _ in range(n))


def ideal_boundary(n: int):
    """|+X>^N preselection and <+Y|^N postselection."""
    return ProductState.uniform(SpinState.plus_x(), n), ProductState.uniform(SpinState.plus_y(), n)


def dense_weak_value(pre: ProductState, post: ProductState, operator: np.ndarray) -> complex:
    psi = pre.to_vector()
    phi = post.to_vector()
    return complex(np.vdot(phi, operator @ psi) / np.vdot(phi, psi))


def dense_forbidden_projector(bits, n: int) -> np.ndarray:
    """|x><x| + |not x><not x| in the Z basis."""
    index = reduce(lambda acc, b: acc * 2 + b, bits, 0)
    complement = (2 ** n - 1) ^ index
    projector = np.zeros((2 ** n, 2 ** n), dtype=complex)
    projector[index, index] = 1
    projector[complement, complement] = 1
    return projector


def dense_z_weak_values(pre: ProductState, post: ProductState) -> np.ndarray:
    """Single-spin Z_w evaluated through the dense embedding."""
    n = len(pre)
    return np.array([
        dense_weak_value(pre, post, to_dense(PauliString.single('Z', k, n))) for k in range(n)
    ])

from qalg.pauli import PauliString, commutes, pauli_mul, pauli_product, to_dense
from qalg.states import Amplitude, ProductState, SpinState, dense_inner, product_inner

__all__ = [
    'Amplitude', 'PauliString', 'ProductState', 'SpinState',
    'commutes', 'dense_inner', 'pauli_mul', 'pauli_product', 'product_inner', 'to_dense',
]

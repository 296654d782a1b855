import numpy as np
import pytest

from qalg.pauli import PAULI_MATRICES, PauliString, commutes, pauli_mul, pauli_product, to_dense
from qalg.states import ProductState, SpinState, dense_inner, product_inner
from tests.fixtures import random_product_state
from utils.errors import CapacityError, DomainError, StructuralError


class TestSpinState:

    def test_axis_states_are_normalized(self):
        for label in ('+X', '-X', '+Y', '-Y', '+Z', '-Z'):
            spin = SpinState.from_label(label)
            assert np.isclose(np.linalg.norm(spin.vector()), 1.0)

    def test_axis_states_are_eigenstates(self):
        for letter in 'XYZ':
            plus = SpinState.from_label('+' + letter).vector()
            minus = SpinState.from_label('-' + letter).vector()
            np.testing.assert_allclose(PAULI_MATRICES[letter] @ plus, plus, atol=1e-15)
            np.testing.assert_allclose(PAULI_MATRICES[letter] @ minus, -minus, atol=1e-15)

    def test_unnormalized_input_rejected(self):
        with pytest.raises(DomainError):
            SpinState(1.0, 1.0)

    def test_from_unnormalized(self):
        spin = SpinState.from_unnormalized(3, 4j)
        assert np.isclose(abs(spin.up), 0.6)
        assert np.isclose(abs(spin.down), 0.8)

    def test_orthogonal(self, rng):
        for _ in range(20):
            up, down = rng.normal(size=2) + 1j * rng.normal(size=2)
            spin = SpinState.from_unnormalized(up, down)
            assert abs(spin.inner(spin.orthogonal())) < 1e-14

    def test_unknown_label(self):
        with pytest.raises(DomainError):
            SpinState.from_label('+W')


class TestProductState:

    def test_factorized_inner_matches_dense(self, rng):
        for n in range(1, 11):
            phi = random_product_state(rng, n)
            psi = random_product_state(rng, n)
            assert abs(product_inner(phi, psi) - dense_inner(phi, psi)) < 1e-12

    def test_ideal_overlap(self):
        n = 5
        psi = ProductState.uniform(SpinState.plus_x(), n)
        phi = ProductState.uniform(SpinState.plus_y(), n)
        expected = ((1 - 1j) / 2) ** n
        assert abs(product_inner(phi, psi) - expected) < 1e-14

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            product_inner(ProductState.uniform(SpinState.plus_x(), 3),
                          ProductState.uniform(SpinState.plus_x(), 4))

    def test_dense_cap(self):
        with pytest.raises(CapacityError):
            ProductState.uniform(SpinState.plus_x(), 13).to_vector()


class TestPauliString:

    def test_single_spin_products(self):
        xy = pauli_mul(PauliString.from_label('X'), PauliString.from_label('Y'))
        assert (xy.phase, xy.ops) == (1, 'Z')
        yx = pauli_mul(PauliString.from_label('Y'), PauliString.from_label('X'))
        assert (yx.phase, yx.ops) == (3, 'Z')
        zz = PauliString.from_label('Z') * PauliString.from_label('Z')
        assert zz.is_identity and zz.phase == 0

    def test_label_round_trip(self):
        for label in ('+ZZI', '-XIY', '+iZZ', '-iYYX'):
            assert PauliString.from_label(label).label == label
        assert PauliString.from_label('XX').label == '+XX'

    def test_bad_letters(self):
        with pytest.raises(DomainError):
            PauliString.from_label('XQ')

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            pauli_mul(PauliString.from_label('XX'), PauliString.from_label('XXX'))

    def test_ring_member_product(self):
        product = PauliString.from_label('ZZI') * PauliString.from_label('XXI')
        assert product.label == '-YYI'

    def test_identity_is_neutral(self, rng):
        letters = np.array(list('IXYZ'))
        for n in (1, 3, 6):
            s = PauliString(int(rng.integers(4)), ''.join(rng.choice(letters, n)))
            assert PauliString.identity(n) * s == s
            assert s * PauliString.identity(n) == s

    def test_associative(self, rng):
        letters = np.array(list('IXYZ'))
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a, b, c = (
                PauliString(int(rng.integers(4)), ''.join(rng.choice(letters, n))) for _ in range(3)
            )
            left = pauli_mul(pauli_mul(a, b), c)
            assert left == pauli_mul(a, pauli_mul(b, c))
            assert left.phase in (0, 1, 2, 3)

    def test_spoke_product_is_minus_identity(self):
        product = pauli_product(PauliString.from_label(s) for s in ('ZZ', 'XX', 'YY'))
        assert product.is_identity
        assert product.phase == 2

    def test_products_match_dense(self, rng):
        letters = np.array(list('IXYZ'))
        for _ in range(50):
            n = int(rng.integers(1, 7))
            a = PauliString(int(rng.integers(4)), ''.join(rng.choice(letters, n)))
            b = PauliString(int(rng.integers(4)), ''.join(rng.choice(letters, n)))
            np.testing.assert_allclose(to_dense(a * b), to_dense(a) @ to_dense(b), atol=1e-12)

    def test_commutation_matches_dense(self, rng):
        letters = np.array(list('IXYZ'))
        for _ in range(50):
            n = int(rng.integers(1, 5))
            a = PauliString(0, ''.join(rng.choice(letters, n)))
            b = PauliString(0, ''.join(rng.choice(letters, n)))
            da, db = to_dense(a), to_dense(b)
            assert commutes(a, b) == np.allclose(da @ db, db @ da)

    def test_dense_cap(self):
        with pytest.raises(CapacityError):
            to_dense(PauliString.identity(13))

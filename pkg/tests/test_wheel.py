import numpy as np
import pytest

from qalg.pauli import PauliString
from utils.errors import CapacityError, DataError, DomainError, StructuralError
from wheel import (
    WheelSet, apply_boundary_conditions, build_wheel, prove_no_nchv_exhaustive, prove_no_nchv_gf2,
    verify_context_products,
)
from wheel.nchv import Gf2System

ODD_N = list(range(3, 18, 2))


class TestBuildWheel:

    def test_square_rings(self):
        w = build_wheel(3)
        zz = w.context('ring:ZZ')
        labels = {w.observables[i].ops for i in zz.members}
        assert labels == {'ZZI', 'IZZ', 'ZIZ'}

    def test_five_spin_counts(self):
        w = build_wheel(5)
        assert len(w.observables) == 15
        assert len(w.rings) == 3
        assert len(w.spokes) == 5
        assert len(w.contexts) == 8

    @pytest.mark.parametrize('n', [1, 2, 4, 0, -3])
    def test_rejects_bad_n(self, n):
        with pytest.raises(DomainError):
            build_wheel(n)

    @pytest.mark.parametrize('n', ODD_N)
    def test_structure_is_clean(self, n):
        w = build_wheel(n)
        assert w.check_structure() == []
        incidence = w.incidence_matrix()
        assert incidence.shape == (n + 3, 3 * n)
        np.testing.assert_array_equal(incidence.sum(axis=0), 2)

    def test_json_round_trip_with_flipped_sign(self):
        w = build_wheel(5).with_flipped_sign('spoke:2')
        data = w.to_json()
        assert data['signs'] == {'spoke:2': 1}
        restored = WheelSet.from_json(data)
        assert restored == w

    def test_json_labels(self):
        data = build_wheel(3).to_json()
        assert data['rings'][0] == ['+ZZI', '+IZZ', '+ZIZ']
        assert data['spokes'][0] == ['+ZZI', '+XXI', '+YYI']

    def test_from_json_rejects_wrong_length(self):
        data = build_wheel(3).to_json()
        data['n'] = 5
        with pytest.raises(DataError):
            WheelSet.from_json(data)

    def test_from_json_rejects_empty_ring(self):
        data = build_wheel(3).to_json()
        data['rings'][1] = []
        with pytest.raises(StructuralError):
            WheelSet.from_json(data)

    def test_unknown_context(self):
        with pytest.raises(DomainError):
            build_wheel(3).with_flipped_sign('spoke:9')


class TestContextProducts:

    @pytest.mark.parametrize('n', ODD_N)
    def test_ring_plus_spoke_minus(self, n):
        report = verify_context_products(build_wheel(n))
        assert report.all_ok
        for check in report.checks:
            expected = 1 if check.kind == 'ring' else -1
            assert check.computed_sign == expected
            assert check.identity_by_parity

    def test_five_spin_zz_ring(self):
        report = verify_context_products(build_wheel(5))
        zz = next(c for c in report.checks if c.name == 'ring:ZZ')
        assert zz.product == '+IIIII'

    def test_flipped_sign_is_reported_not_raised(self):
        report = verify_context_products(build_wheel(3).with_flipped_sign('ring:XX'))
        assert not report.all_ok
        failed = [c.name for c in report.checks if not c.ok]
        assert failed == ['ring:XX']


class TestNchvProvers:

    def test_exhaustive_three_spins(self):
        result = prove_no_nchv_exhaustive(build_wheel(3))
        assert result.candidates == 512
        assert result.satisfying == 0
        assert result.no_nchv
        assert result.max_satisfied_contexts == 5

    def test_exhaustive_five_spins_threaded(self):
        result = prove_no_nchv_exhaustive(build_wheel(5), threads=4)
        assert result.candidates == 32768
        assert result.satisfying == 0
        assert result.max_satisfied_contexts == 7

    def test_exhaustive_cap(self):
        with pytest.raises(CapacityError):
            prove_no_nchv_exhaustive(build_wheel(7))

    def test_exhaustive_finds_assignments_after_flip(self):
        result = prove_no_nchv_exhaustive(build_wheel(3).with_flipped_sign('spoke:0'))
        assert result.satisfying > 0

    @pytest.mark.parametrize('n', ODD_N)
    def test_gf2_inconsistent(self, n):
        result = prove_no_nchv_gf2(build_wheel(n))
        assert result.no_nchv
        assert result.shape == (n + 3, 3 * n)
        assert result.rank == n + 2
        # every context appears once in the only dependency among the rows
        assert len(result.certificate) == n + 3

    def test_square_certificate_is_every_context(self):
        w = build_wheel(3)
        result = prove_no_nchv_gf2(w)
        assert set(result.certificate) == {c.name for c in w.contexts}

    @pytest.mark.parametrize('n', ODD_N)
    def test_gf2_satisfiable_after_any_single_flip(self, n):
        w = build_wheel(n)
        for ctx in w.contexts:
            flipped = w.with_flipped_sign(ctx.name)
            result = prove_no_nchv_gf2(flipped)
            assert result.consistent
            assert result.solution.complete
            for other in flipped.contexts:
                assert result.solution.satisfies(flipped, other.name)

    def test_gf2_system_shape(self):
        system = Gf2System.from_wheel(build_wheel(17))
        assert system.shape == (20, 51)
        assert int(system.rhs.sum()) == 17


class TestBoundaryConditions:

    @pytest.mark.parametrize('n', [3, 5, 7])
    def test_only_zz_ring_contradicted(self, n):
        w = build_wheel(n)
        result = apply_boundary_conditions(w)
        assert result.assignment.complete
        for index, observable in enumerate(w.observables):
            letter = observable.ops.replace('I', '')[0]
            expected = -1 if letter == 'Z' else 1
            assert result.assignment.values[index] == expected
        assert result.contradicted == ['ring:ZZ']

    def test_square_zz_product(self):
        w = build_wheel(3)
        result = apply_boundary_conditions(w)
        zz = w.context('ring:ZZ')
        assert np.prod([result.assignment.values[i] for i in zz.members]) == -1

    def test_labels(self):
        w = build_wheel(3)
        labels = apply_boundary_conditions(w).assignment.to_labels(w)
        assert labels[PauliString.from_label('XXI').label] == 1
        assert labels['+ZIZ'] == -1

    def test_certain_probabilities(self):
        w = build_wheel(5)
        result = apply_boundary_conditions(w)
        assert sorted(result.certain) == list(range(len(w.observables)))
        for p in result.certain.values():
            assert p == pytest.approx(1.0, abs=1e-9)
        summary = result.to_dict(w)
        assert len(summary['certain']) == 15
        assert summary['contradicted'] == ['ring:ZZ']

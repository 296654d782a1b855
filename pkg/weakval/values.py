"""
Weak values of Pauli observables between separable pre- and postselections,
the ABL rule, and pairwise (ZZ)_w anticorrelation tables.
"""
import logging
import numbers
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import Config
from qalg.pauli import PAULI_MATRICES, PauliString
from qalg.states import ProductState, product_inner
from utils.errors import CompletenessError, DomainError, SingularOverlapError, StructuralError

logger = logging.getLogger(__name__)

WeakValue = complex
ProjectorTerms = Sequence[Tuple[complex, PauliString]]
BasisEntry = Union[complex, ProjectorTerms]


def _checked_overlap(pre: ProductState, post: ProductState) -> complex:
    overlap = product_inner(post, pre)
    if abs(overlap) <= Config.SINGULAR_OVERLAP_TOL:
        raise SingularOverlapError(
            f"Postselection overlap |<phi|psi>| = {abs(overlap):.3e} is below "
            f"{Config.SINGULAR_OVERLAP_TOL:g}"
        )
    return overlap


def weak_value_pauli(pre: ProductState, post: ProductState, s: PauliString) -> WeakValue:
    """
    <phi|s|psi> / <phi|psi> for product states, evaluated spin by spin.

    Args:
        pre: preselected state |psi>
        post: postselected state |phi>
        s: Pauli string of the same length

    Returns:
        Complex weak value
    """
    if not (len(pre) == len(post) == s.n):
        raise StructuralError(
            f"Lengths differ: pre={len(pre)}, post={len(post)}, observable={s.n}"
        )
    overlap = _checked_overlap(pre, post)
    numerator = complex(s.coefficient)
    for letter, psi_n, phi_n in zip(s.ops, pre.spins, post.spins):
        numerator *= complex(np.vdot(phi_n.vector(), PAULI_MATRICES[letter] @ psi_n.vector()))
    return numerator / overlap


def projector_weak_value(pre: ProductState, post: ProductState, terms: ProjectorTerms) -> WeakValue:
    """Weak value of a projector expanded as sum_k c_k P_k over Pauli strings."""
    return sum((complex(c) * weak_value_pauli(pre, post, p) for c, p in terms), complex(0))


def eigenprojector_terms(s: PauliString, eigenvalue: int) -> List[Tuple[complex, PauliString]]:
    """(1 + eigenvalue * s)/2 for a Hermitian Pauli string s (phase +1 or -1)."""
    if eigenvalue not in (1, -1):
        raise DomainError("Eigenvalue must be +1 or -1")
    if s.phase % 2:
        raise DomainError(f"{s.label} is not Hermitian")
    return [(0.5, PauliString.identity(s.n)), (0.5 * eigenvalue, s)]


def abl_probability(pre: Optional[ProductState], post: Optional[ProductState],
                    basis: Sequence[BasisEntry]) -> List[float]:
    """
    ABL probabilities |(Pi_j)_w|^2 / sum_k |(Pi_k)_w|^2 over a complete basis.

    Each basis entry is either a projector weak value or a projector expanded as
    (coefficient, PauliString) terms, evaluated against pre/post.
    """
    weak_values = []
    for entry in basis:
        if isinstance(entry, numbers.Number):
            weak_values.append(complex(entry))
        else:
            if pre is None or post is None:
                raise StructuralError("Projector expansions need pre- and postselected states")
            weak_values.append(projector_weak_value(pre, post, entry))
    if not weak_values:
        raise StructuralError("Empty basis")

    total = sum(weak_values, complex(0))
    if abs(total - 1) > Config.COMPLETENESS_TOL:
        raise CompletenessError(f"Projector weak values sum to {total:.6g}, not 1")

    # Two-outcome basis with a weak value of one: outcome is certain
    if len(weak_values) == 2:
        for index, value in enumerate(weak_values):
            if abs(value - 1) <= Config.COMPLETENESS_TOL:
                return [1.0 if k == index else 0.0 for k in range(2)]

    weights = np.abs(np.asarray(weak_values)) ** 2
    norm = weights.sum()
    if norm == 0:
        raise CompletenessError("All projector weak values vanish")
    return [float(w) for w in weights / norm]


def pairwise_zz_wv(a: WeakValue, b: WeakValue) -> WeakValue:
    """(ZZ)_w = (Z)_w (Z)_w for separable pre/postselection."""
    return complex(a) * complex(b)


def anomaly_flags(value: WeakValue) -> Tuple[bool, bool]:
    """(Re < 0, Re > 1): the two ways a projector weak value leaves [0, 1]."""
    re = complex(value).real
    return re < 0, re > 1


@dataclass
class PairRow:
    first: int
    second: int
    value: complex
    anticorrelated: bool

    def to_dict(self) -> dict:
        return {
            'first': self.first,
            'second': self.second,
            're': self.value.real,
            'im': self.value.imag,
            'anticorrelated': self.anticorrelated,
        }


@dataclass
class PigeonholeReport:
    rows: List[PairRow] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def anticorrelated_count(self) -> int:
        return sum(1 for row in self.rows if row.anticorrelated)

    @property
    def all_anticorrelated(self) -> bool:
        return self.total > 0 and self.anticorrelated_count == self.total

    def to_dict(self) -> dict:
        return {
            'pairs': [row.to_dict() for row in self.rows],
            'summary': {
                'total': self.total,
                'anticorrelated': self.anticorrelated_count,
                'all_anticorrelated': self.all_anticorrelated,
            },
        }


def pigeonhole_report(zw: Sequence[WeakValue], pairing: Sequence[Tuple[int, int]]) -> PigeonholeReport:
    """Re (ZZ)_w per pair of spins (0-based indices into zw) and anticorrelation flags."""
    report = PigeonholeReport()
    for first, second in pairing:
        if not (0 <= first < len(zw) and 0 <= second < len(zw)):
            raise DomainError(f"Pair ({first}, {second}) is out of range for {len(zw)} spins")
        value = pairwise_zz_wv(zw[first], zw[second])
        report.rows.append(PairRow(first, second, value, value.real < 0))
    logger.debug(f"Pigeonhole table: {report.anticorrelated_count}/{report.total} anticorrelated")
    return report

"""
N-spin Wheel BKS sets: three rings (ZZ, XX, YY on neighbouring pairs) and N
spokes {ZZ, XX, YY} for one pair each.

Spins are labelled 0..N-1 and pair k couples spins k and (k+1) mod N.
Observable index = ring_position * N + k with ring order ZZ, XX, YY.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from qalg.pauli import PauliString, commutes, pauli_product
from utils.errors import DataError, DomainError, StructuralError

logger = logging.getLogger(__name__)

RING_LETTERS = ('Z', 'X', 'Y')
SOFT_MAX_SPINS = 17


@dataclass(frozen=True)
class Context:
    """A mutually commuting subset of observables with its required product sign."""
    name: str
    kind: str
    members: Tuple[int, ...]
    sign: int

    def flipped(self) -> 'Context':
        return replace(self, sign=-self.sign)


@dataclass(frozen=True)
class WheelSet:
    n: int
    observables: Tuple[PauliString, ...]
    rings: Tuple[Context, ...]
    spokes: Tuple[Context, ...]

    @property
    def contexts(self) -> Tuple[Context, ...]:
        return self.rings + self.spokes

    def context(self, name: str) -> Context:
        for ctx in self.contexts:
            if ctx.name == name:
                return ctx
        raise DomainError(f"No context named {name!r}; have {[c.name for c in self.contexts]}")

    def members(self, ctx: Context) -> List[PauliString]:
        return [self.observables[i] for i in ctx.members]

    def incidence_matrix(self) -> np.ndarray:
        """Rows are contexts (rings first), columns are observables."""
        matrix = np.zeros((len(self.contexts), len(self.observables)), dtype=np.uint8)
        for row, ctx in enumerate(self.contexts):
            matrix[row, list(ctx.members)] = 1
        return matrix

    def check_structure(self) -> List[str]:
        """Problems found by a structural scan; empty when the set is well formed."""
        problems = []
        ring_counts = np.zeros(len(self.observables), dtype=int)
        spoke_counts = np.zeros(len(self.observables), dtype=int)
        for ctx in self.rings:
            ring_counts[list(ctx.members)] += 1
        for ctx in self.spokes:
            spoke_counts[list(ctx.members)] += 1
        for index, (rc, sc) in enumerate(zip(ring_counts, spoke_counts)):
            if rc != 1 or sc != 1:
                problems.append(
                    f"{self.observables[index].label} appears in {rc} rings and {sc} spokes"
                )
        for ctx in self.contexts:
            members = self.members(ctx)
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    if not commutes(members[a], members[b]):
                        problems.append(
                            f"{ctx.name}: {members[a].label} and {members[b].label} anticommute"
                        )
        return problems

    def with_flipped_sign(self, name: str) -> 'WheelSet':
        """Copy with one context's required product sign negated."""
        self.context(name)
        rings = tuple(c.flipped() if c.name == name else c for c in self.rings)
        spokes = tuple(c.flipped() if c.name == name else c for c in self.spokes)
        return replace(self, rings=rings, spokes=spokes)

    def to_json(self) -> dict:
        data = {
            'n': self.n,
            'rings': [[self.observables[i].label for i in c.members] for c in self.rings],
            'spokes': [[self.observables[i].label for i in c.members] for c in self.spokes],
        }
        default = {c.name: (1 if c.kind == 'ring' else -1) for c in self.contexts}
        signs = {c.name: c.sign for c in self.contexts if c.sign != default[c.name]}
        if signs:
            data['signs'] = signs
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: dict) -> 'WheelSet':
        try:
            n = int(data['n'])
            ring_labels = data['rings']
            spoke_labels = data['spokes']
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Malformed Wheel JSON: {e}") from e

        observables: List[PauliString] = []
        index_of: Dict[str, int] = {}

        def index(label: str) -> int:
            s = PauliString.from_label(label)
            if s.n != n:
                raise DataError(f"Observable {label!r} does not act on {n} spins")
            if s.label not in index_of:
                index_of[s.label] = len(observables)
                observables.append(s)
            return index_of[s.label]

        signs = data.get('signs', {})
        rings = []
        for position, labels in enumerate(ring_labels):
            members = tuple(index(label) for label in labels)
            if not members:
                raise StructuralError(f"Ring {position} has no observables")
            name = _ring_name(observables[members[0]], position)
            rings.append(Context(name, 'ring', members, int(signs.get(name, 1))))
        spokes = []
        for position, labels in enumerate(spoke_labels):
            members = tuple(index(label) for label in labels)
            if not members:
                raise StructuralError(f"Spoke {position} has no observables")
            name = f"spoke:{position}"
            spokes.append(Context(name, 'spoke', members, int(signs.get(name, -1))))
        return cls(n, tuple(observables), tuple(rings), tuple(spokes))


def _ring_name(first: PauliString, position: int) -> str:
    letters = {letter for letter in first.ops if letter != 'I'}
    if len(letters) == 1:
        letter = letters.pop()
        return f"ring:{letter}{letter}"
    return f"ring:{position}"


def _pair_observable(letter: str, k: int, n: int) -> PauliString:
    ops = ['I'] * n
    ops[k] = letter
    ops[(k + 1) % n] = letter
    return PauliString(0, ''.join(ops))


def build_wheel(n: int) -> WheelSet:
    """
    Construct the N-spin Wheel (N odd, N >= 3). N = 3 is the 3-spin Square.

    Returns:
        WheelSet with 3N observables, 3 rings (+1) and N spokes (-1)
    """
    if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        raise DomainError(f"Wheel sets exist for odd N >= 3 (got {n!r})")
    n = int(n)
    if n > SOFT_MAX_SPINS:
        logger.warning(f"Building a {n}-spin Wheel beyond the usual range of {SOFT_MAX_SPINS}")

    observables = tuple(
        _pair_observable(letter, k, n) for letter in RING_LETTERS for k in range(n)
    )
    rings = tuple(
        Context(f"ring:{letter}{letter}", 'ring', tuple(t * n + k for k in range(n)), 1)
        for t, letter in enumerate(RING_LETTERS)
    )
    spokes = tuple(
        Context(f"spoke:{k}", 'spoke', (k, n + k, 2 * n + k), -1) for k in range(n)
    )
    logger.debug(f"Built {n}-spin Wheel: {len(observables)} observables, {len(rings) + len(spokes)} contexts")
    return WheelSet(n, observables, rings, spokes)


@dataclass
class ContextCheck:
    name: str
    kind: str
    product: str
    computed_sign: Optional[int]
    expected_sign: int
    commuting: bool
    identity_by_parity: bool

    @property
    def ok(self) -> bool:
        return self.commuting and self.identity_by_parity and self.computed_sign == self.expected_sign

    def to_dict(self) -> dict:
        return {
            'context': self.name,
            'kind': self.kind,
            'product': self.product,
            'computed_sign': self.computed_sign,
            'expected_sign': self.expected_sign,
            'commuting': self.commuting,
            'ok': self.ok,
        }


@dataclass
class ContextProductReport:
    n: int
    checks: List[ContextCheck] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_dict(self) -> dict:
        return {'n': self.n, 'all_ok': self.all_ok, 'contexts': [c.to_dict() for c in self.checks]}


def _identity_by_parity(members: Sequence[PauliString]) -> bool:
    """Per tensor slot, the counts of X, Y and Z must share one parity."""
    for slot in range(members[0].n):
        letters = [m.ops[slot] for m in members]
        parities = {letters.count(letter) % 2 for letter in 'XYZ'}
        if len(parities) != 1:
            return False
    return True


def verify_context_products(w: WheelSet) -> ContextProductReport:
    """Multiply each context symbolically and compare with its required sign."""
    report = ContextProductReport(w.n)
    for ctx in w.contexts:
        members = w.members(ctx)
        product = pauli_product(members)
        if product.is_identity and product.phase in (0, 2):
            computed = 1 if product.phase == 0 else -1
        else:
            computed = None
        commuting = all(
            commutes(members[a], members[b])
            for a in range(len(members)) for b in range(a + 1, len(members))
        )
        report.checks.append(ContextCheck(
            name=ctx.name,
            kind=ctx.kind,
            product=product.label,
            computed_sign=computed,
            expected_sign=ctx.sign,
            commuting=commuting,
            identity_by_parity=_identity_by_parity(members),
        ))
    failed = [c.name for c in report.checks if not c.ok]
    if failed:
        logger.warning(f"Context product check failed for {failed}")
    else:
        logger.info(f"All {len(report.checks)} context products verified for N={w.n}")
    return report

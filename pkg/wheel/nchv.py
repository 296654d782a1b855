"""
Noncontextual hidden-variable (NCHV) assignments for Wheel sets.

An assignment gives every observable a value in {+1, -1}. Writing v = (-1)^b,
a context with required sign (-1)^r is satisfied when sum_{o in ctx} b_o = r
(mod 2), so the existence question is a linear system over GF(2).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import Config
from qalg.states import ProductState, SpinState
from utils.errors import CapacityError, StructuralError
from weakval.values import abl_probability, eigenprojector_terms
from wheel.wheel_set import WheelSet

logger = logging.getLogger(__name__)


@dataclass
class NchvAssignment:
    """Observable index -> +1/-1; unassigned observables are absent."""
    n_observables: int
    values: Dict[int, int] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return len(self.values) == self.n_observables

    def satisfies(self, w: WheelSet, context_name: str) -> Optional[bool]:
        """None while any member of the context is unassigned."""
        ctx = w.context(context_name)
        if any(i not in self.values for i in ctx.members):
            return None
        return int(np.prod([self.values[i] for i in ctx.members])) == ctx.sign

    def to_labels(self, w: WheelSet) -> Dict[str, int]:
        return {w.observables[i].label: v for i, v in sorted(self.values.items())}


@dataclass
class Gf2System:
    """Rows are contexts, columns are observables; rhs holds 1 for sign -1."""
    rows: np.ndarray
    rhs: np.ndarray
    context_names: Tuple[str, ...]

    @classmethod
    def from_wheel(cls, w: WheelSet) -> 'Gf2System':
        rows = w.incidence_matrix()
        rhs = np.array([1 if ctx.sign == -1 else 0 for ctx in w.contexts], dtype=np.uint8)
        column_sums = rows.sum(axis=0)
        if np.any(column_sums != 2):
            raise StructuralError(
                f"Every observable must sit in exactly two contexts; column sums {sorted(set(column_sums.tolist()))}"
            )
        return cls(rows, rhs, tuple(ctx.name for ctx in w.contexts))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows.shape


@dataclass
class ExhaustiveResult:
    n: int
    candidates: int
    satisfying: int
    max_satisfied_contexts: int
    n_contexts: int

    @property
    def no_nchv(self) -> bool:
        return self.satisfying == 0

    def to_dict(self) -> dict:
        return {
            'method': 'exhaustive',
            'n': self.n,
            'candidates': self.candidates,
            'satisfying': self.satisfying,
            'max_satisfied_contexts': self.max_satisfied_contexts,
            'contexts': self.n_contexts,
            'no_nchv': self.no_nchv,
        }


@dataclass
class Gf2Result:
    n: int
    consistent: bool
    rank: int
    shape: Tuple[int, int]
    certificate: Tuple[str, ...] = ()
    solution: Optional[NchvAssignment] = None

    @property
    def no_nchv(self) -> bool:
        return not self.consistent

    def to_dict(self) -> dict:
        data = {
            'method': 'gf2',
            'n': self.n,
            'rows': self.shape[0],
            'columns': self.shape[1],
            'rank': self.rank,
            'no_nchv': self.no_nchv,
        }
        if self.certificate:
            data['certificate'] = list(self.certificate)
        if self.solution is not None:
            data['solution'] = {str(k): v for k, v in sorted(self.solution.values.items())}
        return data


def _count_chunk(w: WheelSet, start: int, stop: int) -> Tuple[int, int]:
    n_obs = len(w.observables)
    codes = np.arange(start, stop, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n_obs, dtype=np.int64)[None, :]) & 1).astype(np.uint8)
    satisfied = np.zeros(len(codes), dtype=np.int32)
    for ctx in w.contexts:
        parity = bits[:, list(ctx.members)].sum(axis=1) & 1
        required = 1 if ctx.sign == -1 else 0
        satisfied += (parity == required)
    all_ok = int(np.count_nonzero(satisfied == len(w.contexts)))
    return all_ok, int(satisfied.max()) if len(satisfied) else 0


def prove_no_nchv_exhaustive(w: WheelSet, threads: int = 1) -> ExhaustiveResult:
    """
    Enumerate all 2^(3N) assignments and count those satisfying every context.

    Args:
        w: Wheel set (N <= 5)
        threads: worker threads for the enumeration chunks

    Returns:
        ExhaustiveResult; no_nchv is True when nothing satisfies all contexts
    """
    if w.n > Config.EXHAUSTIVE_MAX_SPINS:
        raise CapacityError(
            f"Exhaustive search is capped at N={Config.EXHAUSTIVE_MAX_SPINS} (got N={w.n}); use the GF(2) prover"
        )
    total = 2 ** len(w.observables)
    threads = max(1, int(threads))
    n_chunks = max(1, min(threads * 4, total))
    edges = np.linspace(0, total, n_chunks + 1, dtype=np.int64)
    spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    logger.info(f"Exhaustive NCHV search for N={w.n}: {total} candidates in {len(spans)} chunks")
    if threads == 1:
        results = [_count_chunk(w, a, b) for a, b in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda span: _count_chunk(w, *span), spans))

    satisfying = sum(r[0] for r in results)
    best = max(r[1] for r in results)
    return ExhaustiveResult(w.n, total, satisfying, best, len(w.contexts))


def prove_no_nchv_gf2(w: WheelSet) -> Gf2Result:
    """
    Gauss-Jordan elimination over GF(2), tracking which original context rows
    combine into each reduced row. An all-zero row with rhs 1 is a proof that
    no assignment exists, and its provenance is the certificate.
    """
    system = Gf2System.from_wheel(w)
    a = system.rows.copy()
    b = system.rhs.copy()
    m, c = a.shape
    provenance = np.eye(m, dtype=np.uint8)

    pivots: List[Tuple[int, int]] = []
    row = 0
    for col in range(c):
        if row == m:
            break
        candidates = np.nonzero(a[row:, col])[0]
        if len(candidates) == 0:
            continue
        pick = row + int(candidates[0])
        if pick != row:
            a[[row, pick]] = a[[pick, row]]
            b[[row, pick]] = b[[pick, row]]
            provenance[[row, pick]] = provenance[[pick, row]]
        for other in np.nonzero(a[:, col])[0]:
            if other != row:
                a[other] ^= a[row]
                b[other] ^= b[row]
                provenance[other] ^= provenance[row]
        pivots.append((row, col))
        row += 1

    rank = len(pivots)
    for r in range(rank, m):
        if b[r]:
            certificate = tuple(
                name for name, used in zip(system.context_names, provenance[r]) if used
            )
            logger.info(f"N={w.n}: GF(2) system {m}x{c} inconsistent, certificate of {len(certificate)} contexts")
            return Gf2Result(w.n, False, rank, (m, c), certificate=certificate)

    x = np.zeros(c, dtype=np.uint8)
    for r, col in pivots:
        x[col] = b[r]
    solution = NchvAssignment(c, {i: (-1 if bit else 1) for i, bit in enumerate(x)})
    logger.info(f"N={w.n}: GF(2) system {m}x{c} consistent (rank {rank})")
    return Gf2Result(w.n, True, rank, (m, c), solution=solution)


@dataclass
class BoundaryResult:
    assignment: NchvAssignment
    contradicted: List[str]
    certain: Dict[int, float]

    def to_dict(self, w: WheelSet) -> dict:
        return {
            'assignment': self.assignment.to_labels(w),
            'contradicted': list(self.contradicted),
            'certain': {w.observables[i].label: p for i, p in sorted(self.certain.items())},
        }


def apply_boundary_conditions(w: WheelSet, pre: Optional[ProductState] = None,
                              post: Optional[ProductState] = None) -> BoundaryResult:
    """
    Fix every observable whose value is certain (ABL probability 1) under the
    pre/postselection, then list the contexts those values violate.

    Defaults to |+X>^N preselection and <+Y|^N postselection, which fixes XX
    and YY to +1 and ZZ to -1 so that only the ZZ ring is contradicted.
    """
    pre = pre or ProductState.uniform(SpinState.plus_x(), w.n)
    post = post or ProductState.uniform(SpinState.plus_y(), w.n)

    assignment = NchvAssignment(len(w.observables))
    certain: Dict[int, float] = {}
    for index, observable in enumerate(w.observables):
        basis = [eigenprojector_terms(observable, 1), eigenprojector_terms(observable, -1)]
        p_plus, p_minus = abl_probability(pre, post, basis)
        if abs(p_plus - 1) <= Config.COMPLETENESS_TOL:
            assignment.values[index] = 1
            certain[index] = p_plus
        elif abs(p_minus - 1) <= Config.COMPLETENESS_TOL:
            assignment.values[index] = -1
            certain[index] = p_minus

    contradicted = [
        ctx.name for ctx in w.contexts if assignment.satisfies(w, ctx.name) is False
    ]
    logger.debug(
        f"Boundary conditions fixed {len(assignment.values)}/{len(w.observables)} observables; "
        f"contradicted: {contradicted}"
    )
    return BoundaryResult(assignment, contradicted, certain)

"""
Witness and pigeonhole results for every odd N from 3 to 17, computed from the
bundled measurement table, and the report files written from them.
"""
import csv
import json
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from analysis.data import DataSetTable, PublishedPair, load_published_pairs
from analysis.figures import Chart, Series
from analysis.propagation import (
    Method, PropagationConfig, pair_expression, projector_expression, propagate,
    real_gradient, witness_expression,
)
from config.settings import Config
from utils.errors import DataError
from weakval.values import PigeonholeReport, pigeonhole_report
from weakval.witness import (
    BasisIndex, WitnessResult, ideal_witness_value, ideal_zw, sign_pattern,
)

logger = logging.getLogger(__name__)

# Projector index j reported for each N; bits of x_j are read most significant first
REPORTED_PROJECTOR_INDICES = {3: 0, 5: 0, 7: 1, 9: 3, 11: 7, 13: 0, 15: 1, 17: 3}

SQUARE_PAIRS = ((1, 3), (2, 3), (1, 2))
PAIR_TOLERANCE = Decimal('0.002')


def published_pair_ids() -> List[Tuple[int, int]]:
    """Neighbouring sets (n, n+1) for n = 1..16, then (1, k) for odd k = 3..17."""
    return [(n, n + 1) for n in range(1, 17)] + [(1, k) for k in range(3, 18, 2)]


def round3(value: float) -> Decimal:
    return Decimal(repr(float(value))).quantize(Decimal('0.001'), rounding=ROUND_HALF_UP)


def stationarity_check(n: int, j: int) -> float:
    """Norm of the gradient of Re (Pi_j)_w over the 2N real inputs at Z_w = i."""
    f = projector_expression(n, j)
    grad_re, _ = real_gradient(f, ideal_zw(n))
    return float(np.linalg.norm(grad_re))


@dataclass
class WitnessRow:
    n: int
    witness: WitnessResult
    projector_j: int
    projector: WitnessResult
    projector_gradient_norm: float
    stationary: bool = False
    projector_mc_sigma: Optional[float] = None

    @property
    def projector_mc_violation(self) -> Optional[float]:
        if self.projector_mc_sigma is None:
            return None
        re = self.projector.value.real
        return -re / self.projector_mc_sigma if re < 0 and self.projector_mc_sigma > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'witness': self.witness.to_dict(),
            'witness_ideal': ideal_witness_value(self.n),
            'projector_index': self.projector_j,
            'projector_label': BasisIndex(self.n, self.projector_j).label(),
            'projector': self.projector.to_dict(),
            'projector_ideal_sign': sign_pattern(self.n, self.projector_j),
            'projector_gradient_norm': self.projector_gradient_norm,
            'stationary': self.stationary,
            'projector_mc_sigma': self.projector_mc_sigma,
            'projector_mc_violation': self.projector_mc_violation,
        }


@dataclass
class PairComparison:
    first: int
    second: int
    value: complex
    sigma_re: float
    sigma_im: float
    published: Optional[PublishedPair] = None

    @property
    def delta_re(self) -> Optional[Decimal]:
        if self.published is None:
            return None
        return abs(round3(self.value.real) - round3(self.published.value.re))

    @property
    def delta_im(self) -> Optional[Decimal]:
        if self.published is None:
            return None
        return abs(round3(self.value.imag) - round3(self.published.value.im))

    @property
    def matches_published(self) -> Optional[bool]:
        if self.published is None:
            return None
        return self.delta_re <= PAIR_TOLERANCE and self.delta_im <= PAIR_TOLERANCE

    def to_dict(self) -> dict:
        data = {
            'sets': [self.first, self.second],
            're': self.value.real,
            're_sigma': self.sigma_re,
            'im': self.value.imag,
            'im_sigma': self.sigma_im,
            're_rounded': str(round3(self.value.real)),
            'im_rounded': str(round3(self.value.imag)),
        }
        if self.published is not None:
            data['published'] = self.published.value.to_dict()
            data['delta_re'] = str(self.delta_re)
            data['delta_im'] = str(self.delta_im)
            data['matches_published'] = self.matches_published
        return data


@dataclass
class ReproductionReport:
    rows: Dict[int, WitnessRow] = field(default_factory=dict)
    pairs: List[PairComparison] = field(default_factory=list)
    square_pairs: List[PairComparison] = field(default_factory=list)
    pigeonhole: Dict[int, PigeonholeReport] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def summary_line(self, n: int) -> str:
        row = self.rows[n]
        w = row.witness
        return f"N={n}: C={w.value.real:.2f}±{w.sigma_re:.2f} ({w.violation_sigmas:.1f}σ)"

    def mismatched_pairs(self) -> List[Tuple[int, int]]:
        return [(p.first, p.second) for p in self.pairs if p.matches_published is False]

    def to_dict(self) -> dict:
        return {
            'provenance': self.provenance,
            'witnesses': [self.rows[n].to_dict() for n in sorted(self.rows)],
            'pairs': [p.to_dict() for p in self.pairs],
            'fig1_pairs': [p.to_dict() for p in self.square_pairs],
            'pigeonhole': {str(n): r.to_dict()['summary'] for n, r in sorted(self.pigeonhole.items())},
        }


class WitnessReproducer:
    """
    Computes every witness, projector and pairwise entry from one table.
    """

    def __init__(self, table: DataSetTable, cfg: PropagationConfig = None,
                 published_pairs: Optional[List[PublishedPair]] = None):
        self.logger = logging.getLogger(__name__)
        self.table = table
        self.cfg = cfg or PropagationConfig()
        self.published = {(p.first, p.second): p for p in (published_pairs or [])}

        # Monte Carlo cross-check for rows whose first-order sigma vanishes
        self.mc_cfg = PropagationConfig(
            method=Method.MONTE_CARLO,
            mc_samples=max(self.cfg.mc_samples, Config.MC_MIN_SAMPLES),
            seed=self.cfg.seed,
            threads=self.cfg.threads,
        )

    def witness_row(self, n: int) -> WitnessRow:
        ids = list(range(1, n + 1))
        witness = propagate(witness_expression(n), self.table, ids, self.cfg)
        j = REPORTED_PROJECTOR_INDICES[n]
        projector_f = projector_expression(n, j)
        projector = propagate(projector_f, self.table, ids, self.cfg)

        gradient_norm = stationarity_check(n, j)
        stationary = gradient_norm < Config.STATIONARY_GRADIENT_TOL
        mc_sigma = None
        if stationary:
            if self.cfg.method == Method.MONTE_CARLO:
                mc_sigma = projector.sigma_re
            else:
                mc_sigma = propagate(projector_f, self.table, ids, self.mc_cfg).sigma_re
            self.logger.info(
                f"N={n}: {BasisIndex(n, j).label()} is stationary at the ideal point; "
                f"Monte Carlo sigma {mc_sigma:.4g}"
            )

        return WitnessRow(
            n=n,
            witness=WitnessResult.from_value(witness.value, witness.sigma_re, witness.sigma_im),
            projector_j=j,
            projector=WitnessResult.from_value(projector.value, projector.sigma_re, projector.sigma_im),
            projector_gradient_norm=gradient_norm,
            stationary=stationary,
            projector_mc_sigma=mc_sigma,
        )

    def pair(self, first: int, second: int) -> PairComparison:
        result = propagate(pair_expression(), self.table, [first, second], self.cfg)
        return PairComparison(
            first, second, result.value, result.sigma_re, result.sigma_im,
            self.published.get((first, second)),
        )

    def run(self) -> ReproductionReport:
        report = ReproductionReport()
        report.provenance = {
            'source': self.table.source,
            'sha256': self.table.checksum,
            'method': self.cfg.method.value,
            'mc_samples': self.cfg.mc_samples,
            'seed': self.cfg.seed,
            'projector_bit_order': 'most significant digit first, leading digit 0',
            'mean_sigma_by_reactor_mw': {
                str(power): {'re': re, 'im': im} for power, (re, im) in self.table.sigma_by_power().items()
            },
        }

        for n in Config.SPIN_COUNTS:
            report.rows[n] = self.witness_row(n)
            centrals = [self.table[k].value for k in range(1, n + 1)]
            ring = [(k, (k + 1) % n) for k in range(n)]
            report.pigeonhole[n] = pigeonhole_report(centrals, ring)

        report.pairs = [self.pair(a, b) for a, b in published_pair_ids()]
        report.square_pairs = [self.pair(a, b) for a, b in SQUARE_PAIRS]

        mismatched = report.mismatched_pairs()
        if mismatched:
            self.logger.warning(f"Pairs differing from the published table beyond rounding: {mismatched}")
        self.logger.info(f"Reproduced {len(report.rows)} witness rows and {len(report.pairs)} pairs")
        return report


def reproduce_paper(table: DataSetTable, cfg: PropagationConfig = None,
                    published_pairs: Optional[List[PublishedPair]] = None) -> ReproductionReport:
    """
    Every witness C^(N), the chosen projector per N, the pigeonhole tables and
    the 24 pairwise products, using sets 1..N for each N.
    """
    if len(table) != 17:
        raise DataError(f"Reproduction needs the full 17-set table (got {len(table)})")
    if published_pairs is None:
        try:
            published_pairs = load_published_pairs()
        except DataError as e:
            logger.warning(f"Published pair table unavailable, skipping comparison: {e}")
            published_pairs = []
    return WitnessReproducer(table, cfg, published_pairs).run()


def _figures(report: ReproductionReport) -> Dict[str, Chart]:
    ns = sorted(report.rows)
    rows = [report.rows[n] for n in ns]
    fine = np.arange(ns[0], ns[-1] + 1, 2)
    projector_ideal = [
        sign_pattern(n, report.rows[n].projector_j) * 2 ** (-(n - 1) / 2) for n in ns
    ]
    return {
        'fig3a.svg': Chart(
            'Unbiased witness Re C_w vs N', 'N', 'Re C_w',
            Series(ns, [r.witness.value.real for r in rows], [r.witness.sigma_re for r in rows]),
            quantum=Series(fine.tolist(), [ideal_witness_value(int(n)) for n in fine]),
        ),
        'fig3b.svg': Chart(
            'Witness violation of the classical bound', 'N', 'violation (sigma)',
            Series(ns, [r.witness.violation_sigmas for r in rows]),
            bound=None,
        ),
        'fig3c.svg': Chart(
            'Projector witnesses Re (Pi_j)_w vs N', 'N', 'Re (Pi_j)_w',
            Series(ns, [r.projector.value.real for r in rows], [r.projector.sigma_re for r in rows]),
            quantum=Series(ns, projector_ideal),
        ),
        'fig3d.svg': Chart(
            'Projector violation of the classical bound', 'N', 'violation (sigma)',
            Series(ns, [r.projector.violation_sigmas for r in rows]),
            bound=None,
        ),
    }


def _write_pairs(path: Path, pairs: List[PairComparison]):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['first', 'second', 're', 're_sigma', 'im', 'im_sigma',
                         'published_re', 'published_im', 'matches_published'])
        for p in pairs:
            published = p.published.value if p.published else None
            writer.writerow([
                p.first, p.second,
                f"{p.value.real:.6g}", f"{p.sigma_re:.6g}", f"{p.value.imag:.6g}", f"{p.sigma_im:.6g}",
                '' if published is None else f"{published.re:.3f}",
                '' if published is None else f"{published.im:.3f}",
                '' if p.matches_published is None else str(p.matches_published).lower(),
            ])


def write_report(report: ReproductionReport, out_dir: Union[str, Path]) -> List[Path]:
    """Write report.csv, report.json, pairs.csv, fig1_pairs.csv and fig3a..d.svg."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / 'report.csv'
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['n', 'witness_re', 'witness_sigma', 'proj_index', 'proj_re', 'proj_sigma',
                         'violation_sigmas', 'proj_violation_sigmas', 'stationary', 'proj_mc_sigma'])
        for n in sorted(report.rows):
            row = report.rows[n]
            writer.writerow([
                n,
                f"{row.witness.value.real:.6g}", f"{row.witness.sigma_re:.6g}",
                row.projector_j,
                f"{row.projector.value.real:.6g}", f"{row.projector.sigma_re:.6g}",
                f"{row.witness.violation_sigmas:.6g}", f"{row.projector.violation_sigmas:.6g}",
                str(row.stationary).lower(),
                '' if row.projector_mc_sigma is None else f"{row.projector_mc_sigma:.6g}",
            ])
    written.append(path)

    path = out_dir / 'report.json'
    path.write_text(json.dumps(report.to_dict(), indent=2, default=str), encoding='utf-8')
    written.append(path)

    for name, pairs in (('pairs.csv', report.pairs), ('fig1_pairs.csv', report.square_pairs)):
        path = out_dir / name
        _write_pairs(path, pairs)
        written.append(path)

    for name, chart in _figures(report).items():
        path = out_dir / name
        path.write_text(chart.render(), encoding='utf-8')
        written.append(path)

    logger.info(f"Wrote {len(written)} report files to {out_dir}")
    return written

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

# Load environment variables first
load_dotenv()

# Add project root to Python path
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from analysis import (  # noqa: E402
    DataSetTable, Method, PropagationConfig, projector_expression, propagate, reproduce_paper,
    witness_expression, write_report,
)
from config.settings import Config  # noqa: E402
from interfsim import (  # noqa: E402
    CouplingConfig, Interferogram, Mode, ProtocolSettings, extract_weak_value, fit_sine,
    run_protocol, simulate, subtract_background,
)
from qalg.states import ProductState, SpinState  # noqa: E402
from utils.errors import DomainError, UsageError, WheelError  # noqa: E402
from utils.logger import setup_logging  # noqa: E402
from weakval import (  # noqa: E402
    BasisIndex, WitnessResult, forbidden_projector_wv, ideal_zw, weak_value_pauli, witness_C,
)
from wheel import (  # noqa: E402
    apply_boundary_conditions, build_wheel, prove_no_nchv_exhaustive, prove_no_nchv_gf2,
    verify_context_products,
)

logger = logging.getLogger('cli')

Records = List[Dict[str, object]]


class WheelArgumentParser(argparse.ArgumentParser):
    """Argument errors become UsageError so run() maps them to an exit code."""

    def error(self, message):
        raise UsageError(f"{message}\n\n{self.format_help()}")


@dataclass
class CommandConfig:
    """Parsed and validated command line, ready for dispatch."""
    subcommand: str
    n: Optional[int]
    j: Optional[int]
    alpha: float
    seed: int
    samples: int
    method: Method
    fmt: str
    data: Optional[str]
    out: Optional[str]
    ideal: bool
    threads: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CommandConfig':
        n = getattr(args, 'n', None)
        if n is not None and (n < 3 or n % 2 == 0):
            raise DomainError(f"--n must be an odd integer >= 3 (got {n})")
        alpha = getattr(args, 'alpha_deg', None)
        if alpha is None:
            alpha = Config.ALPHA_DEG
        if not 0 < alpha <= 90:
            raise DomainError(f"--alpha-deg must lie in (0, 90] (got {alpha})")
        j = getattr(args, 'j', None)
        if j is not None and n is not None:
            BasisIndex(n, j)
        return cls(
            subcommand=args.command,
            n=n,
            j=j,
            alpha=alpha,
            seed=getattr(args, 'seed', Config.SEED),
            samples=getattr(args, 'samples', Config.MC_SAMPLES),
            method=Method(getattr(args, 'method', Method.FIRST_ORDER.value)),
            fmt=args.format or _infer_format(getattr(args, 'out', None)),
            data=getattr(args, 'data', None),
            out=getattr(args, 'out', None),
            ideal=getattr(args, 'ideal', False),
            threads=getattr(args, 'threads', Config.THREADS),
        )

    def propagation(self) -> PropagationConfig:
        return PropagationConfig(method=self.method, mc_samples=self.samples, seed=self.seed,
                                 threads=self.threads)


def _infer_format(out: Optional[str]) -> str:
    if out and Path(out).suffix.lower() == '.json':
        return 'json'
    return 'csv'


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{Config.REPORT_SIGNIFICANT_DIGITS}g}"
    if value is None:
        return ''
    return str(value)


def render(records: Records, payload: dict, fmt: str) -> str:
    """CSV with 6 significant digits, or JSON at full precision."""
    if fmt == 'json':
        return json.dumps(payload, indent=2, default=str) + '\n'
    buffer = io.StringIO()
    if records:
        writer = csv.writer(buffer, lineterminator='\n')
        header = list(records[0].keys())
        writer.writerow(header)
        for record in records:
            writer.writerow([_format_value(record.get(key)) for key in header])
    return buffer.getvalue()


def _emit(cfg: CommandConfig, records: Records, payload: dict):
    text = render(records, payload, cfg.fmt)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding='utf-8')
        logger.info(f"Wrote {cfg.fmt} output to {cfg.out}")
    else:
        sys.stdout.write(text)


# ---- subcommand handlers -------------------------------------------------

def cmd_wheel_build(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    w = build_wheel(cfg.n)
    records = [
        {'context': ctx.name, 'kind': ctx.kind, 'sign': ctx.sign,
         'observables': ' '.join(w.observables[i].label for i in ctx.members)}
        for ctx in w.contexts
    ]
    return records, w.to_json()


def cmd_wheel_verify(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    w = build_wheel(cfg.n)
    report = verify_context_products(w)
    problems = w.check_structure()
    records = [check.to_dict() for check in report.checks]
    payload = report.to_dict()
    payload['structure_problems'] = problems
    return records, payload


def cmd_nchv_prove(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    w = build_wheel(cfg.n)
    if args.flip:
        w = w.with_flipped_sign(args.flip)
    gf2 = prove_no_nchv_gf2(w)
    status = 'INCONSISTENT' if gf2.no_nchv else 'SATISFIABLE'
    payload = {'n': cfg.n, 'status': status, 'flipped': args.flip, 'gf2': gf2.to_dict()}
    records = [{
        'method': 'gf2', 'n': cfg.n, 'status': status,
        'detail': ';'.join(gf2.certificate) if gf2.certificate else f"rank {gf2.rank}",
    }]
    if cfg.n <= Config.EXHAUSTIVE_MAX_SPINS:
        exhaustive = prove_no_nchv_exhaustive(w, threads=cfg.threads)
        payload['exhaustive'] = exhaustive.to_dict()
        records.append({
            'method': 'exhaustive', 'n': cfg.n,
            'status': 'INCONSISTENT' if exhaustive.no_nchv else 'SATISFIABLE',
            'detail': f"{exhaustive.satisfying}/{exhaustive.candidates} satisfying",
        })
    return records, payload


def cmd_weak_value(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    w = build_wheel(cfg.n)
    pre = ProductState.uniform(SpinState.from_label(args.pre), cfg.n)
    post = ProductState.uniform(SpinState.from_label(args.post), cfg.n)
    boundary = apply_boundary_conditions(w, pre, post)
    records = []
    for index, observable in enumerate(w.observables):
        value = weak_value_pauli(pre, post, observable)
        records.append({
            'observable': observable.label, 're': value.real, 'im': value.imag,
            'assigned': boundary.assignment.values.get(index),
            'abl_probability': boundary.certain.get(index),
        })
    payload = {
        'n': cfg.n, 'pre': args.pre, 'post': args.post,
        'weak_values': records,
        'contradicted': boundary.contradicted,
    }
    return records, payload


def cmd_witness(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    n = cfg.n
    results: List[Tuple[str, WitnessResult]] = []
    if cfg.ideal:
        zw = ideal_zw(n)
        results.append((f"C^({n})", WitnessResult.from_value(witness_C(n, zw), 0.0, 0.0)))
        if cfg.j is not None:
            idx = BasisIndex(n, cfg.j)
            results.append((idx.label(), WitnessResult.from_value(forbidden_projector_wv(idx, zw), 0.0, 0.0)))
    else:
        table = DataSetTable.load(cfg.data)
        ids = list(range(1, n + 1))
        prop = cfg.propagation()
        witness = propagate(witness_expression(n), table, ids, prop)
        results.append((f"C^({n})", WitnessResult.from_value(*witness.as_tuple())))
        if cfg.j is not None:
            projector = propagate(projector_expression(n, cfg.j), table, ids, prop)
            results.append((BasisIndex(n, cfg.j).label(), WitnessResult.from_value(*projector.as_tuple())))

    records = [dict(quantity=name, n=n, **result.to_dict()) for name, result in results]
    payload = {'n': n, 'ideal': cfg.ideal, 'method': None if cfg.ideal else cfg.method.value, 'results': records}
    return records, payload


def _measured_records(z) -> Records:
    return [z.to_dict()]


def cmd_simulate(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    pre, post = SpinState.from_label(args.pre), SpinState.from_label(args.post)
    if args.protocol:
        settings = ProtocolSettings(alpha=cfg.alpha, noiseless=args.noiseless)
        run = run_protocol(pre, post, settings, seed=cfg.seed, linearized=args.linearized)
        payload = run.measured.to_dict()
        payload['exposures'] = {mode.value: g.to_json() for mode, g in run.exposures.items()}
        return _measured_records(run.measured), payload

    config = CouplingConfig(alpha=cfg.alpha, seed=cfg.seed, mode=Mode(args.mode), noiseless=args.noiseless)
    g = simulate(config, pre, post)
    records = [{'chi': float(c), 'counts': float(k)} for c, k in zip(g.chi, g.counts)]
    return records, g.to_json()


def cmd_extract(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    fringe_in = Interferogram.load(args.fringe_in)
    fringe_out = Interferogram.load(args.fringe_out)
    block_p1 = Interferogram.load(args.block_p1)
    block_p2 = Interferogram.load(args.block_p2)
    if args.background:
        background = Interferogram.load(args.background)
        fringe_in = subtract_background(fringe_in, background)
        fringe_out = subtract_background(fringe_out, background)
        block_p1 = subtract_background(block_p1, background)
        block_p2 = subtract_background(block_p2, background)

    alpha = cfg.alpha
    if args.alpha_deg is None and fringe_in.alpha_deg:
        alpha = float(fringe_in.alpha_deg)
    z = extract_weak_value(
        fit_sine(fringe_in), fit_sine(fringe_out),
        float(block_p1.counts.sum()), float(block_p2.counts.sum()),
        alpha_deg=alpha,
        linearized=args.linearized,
        block_variances=(float(block_p1.weights_variance().sum()), float(block_p2.weights_variance().sum())),
    )
    return _measured_records(z), z.to_dict()


def cmd_reproduce(cfg: CommandConfig, args) -> Tuple[Records, dict]:
    table = DataSetTable.load(cfg.data)
    report = reproduce_paper(table, cfg.propagation())
    records = [
        {
            'n': n, 'witness_re': row.witness.value.real, 'witness_sigma': row.witness.sigma_re,
            'proj_index': row.projector_j, 'proj_re': row.projector.value.real,
            'proj_sigma': row.projector.sigma_re, 'violation_sigmas': row.witness.violation_sigmas,
        }
        for n, row in sorted(report.rows.items())
    ]
    return records, {'report': report}


HANDLERS: Dict[str, Callable] = {
    'wheel-build': cmd_wheel_build,
    'wheel-verify': cmd_wheel_verify,
    'nchv-prove': cmd_nchv_prove,
    'weak-value': cmd_weak_value,
    'witness': cmd_witness,
    'simulate': cmd_simulate,
    'extract': cmd_extract,
    'reproduce': cmd_reproduce,
}


def build_parser() -> WheelArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['csv', 'json'], default=None,
                        help='defaults to the --out extension, else csv')
    common.add_argument('--out', help='output file (or directory for reproduce)')
    common.add_argument('--log-level', default=None, help='overrides WHEEL_LOG_LEVEL')

    spins = argparse.ArgumentParser(add_help=False)
    spins.add_argument('--n', type=int, required=True, help='odd number of spins >= 3')

    stats = argparse.ArgumentParser(add_help=False)
    stats.add_argument('--data', help='measured weak-value CSV (default: bundled table)')
    stats.add_argument('--method', choices=[m.value for m in Method], default=Method.FIRST_ORDER.value)
    stats.add_argument('--samples', type=int, default=Config.MC_SAMPLES)
    stats.add_argument('--seed', type=int, default=Config.SEED)
    stats.add_argument('--threads', type=int, default=Config.THREADS)

    parser = WheelArgumentParser(
        prog='wheel',
        description='Wheel BKS sets, weak-value contextuality witnesses and interferometer simulation',
    )
    sub = parser.add_subparsers(dest='command', parser_class=WheelArgumentParser)
    sub.required = True

    sub.add_parser('wheel-build', parents=[common, spins], help='construct an N-spin Wheel')
    sub.add_parser('wheel-verify', parents=[common, spins], help='check ring and spoke products')

    p = sub.add_parser('nchv-prove', parents=[common, spins], help='prove no NCHV assignment exists')
    p.add_argument('--flip', help='negate the required sign of one context, e.g. spoke:0')
    p.add_argument('--threads', type=int, default=Config.THREADS)

    p = sub.add_parser('weak-value', parents=[common, spins], help='weak values and certain assignments')
    p.add_argument('--pre', default='+X')
    p.add_argument('--post', default='+Y')

    p = sub.add_parser('witness', parents=[common, spins, stats], help='C^(N) and projector witnesses')
    p.add_argument('--j', type=int, help='forbidden projector index')
    p.add_argument('--ideal', action='store_true', help='use Z_w = i on every spin')

    p = sub.add_parser('simulate', parents=[common], help='simulate an exposure or the full protocol')
    p.add_argument('--alpha-deg', type=float, default=Config.ALPHA_DEG)
    p.add_argument('--seed', type=int, default=Config.SEED)
    p.add_argument('--mode', choices=[m.value for m in Mode], default=Mode.IN.value)
    p.add_argument('--pre', default='+X')
    p.add_argument('--post', default='+Y')
    p.add_argument('--noiseless', action='store_true')
    p.add_argument('--protocol', action='store_true', help='run all exposures and extract Z_w')
    p.add_argument('--linearized', action='store_true')

    p = sub.add_parser('extract', parents=[common], help='extract Z_w from interferogram files')
    p.add_argument('--fringe-in', required=True)
    p.add_argument('--fringe-out', required=True)
    p.add_argument('--block-p1', required=True, help='exposure with path P1 blocked')
    p.add_argument('--block-p2', required=True, help='exposure with path P2 blocked')
    p.add_argument('--background', help='orthogonal-postselection background exposure')
    p.add_argument('--alpha-deg', type=float, default=None)
    p.add_argument('--linearized', action='store_true')

    sub.add_parser('reproduce', parents=[common, stats], help='reproduce every witness and pair table')
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        project_logger = setup_logging(args.log_level)
        cfg = CommandConfig.from_args(args)
        project_logger.log_command(cfg.subcommand, {k: v for k, v in vars(args).items() if v is not None})

        records, payload = HANDLERS[cfg.subcommand](cfg, args)

        if cfg.subcommand == 'reproduce':
            report = payload['report']
            for n, row in sorted(report.rows.items()):
                project_logger.log_witness_summary(
                    n, row.witness.value.real, row.witness.sigma_re, row.witness.violation_sigmas
                )
            if cfg.out:
                write_report(report, cfg.out)
                for n in sorted(report.rows):
                    print(report.summary_line(n))
            else:
                sys.stdout.write(render(records, report.to_dict(), cfg.fmt))
        else:
            _emit(cfg, records, payload)
        return 0

    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    except WheelError as e:
        logging.getLogger('cli').error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


def main():
    """Main application entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()

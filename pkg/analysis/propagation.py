"""
Uncertainty propagation of independent Gaussian weak-value errors through
witness and projector expressions, first-order or by Monte Carlo resampling.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Tuple

import numpy as np

from analysis.data import DataSetTable
from config.settings import Config
from utils.errors import DomainError, StructuralError
from weakval.witness import BasisIndex, projector_wv_batch, witness_c_batch

logger = logging.getLogger(__name__)


class Method(str, Enum):
    FIRST_ORDER = 'first-order'
    MONTE_CARLO = 'monte-carlo'


@dataclass
class PropagationConfig:
    method: Method = Method.FIRST_ORDER
    mc_samples: int = Config.MC_SAMPLES
    seed: int = Config.SEED
    threads: int = 1

    def __post_init__(self):
        self.method = Method(self.method)
        if self.method == Method.MONTE_CARLO and self.mc_samples < Config.MC_MIN_SAMPLES:
            raise DomainError(
                f"Monte Carlo needs at least {Config.MC_MIN_SAMPLES} samples (got {self.mc_samples})"
            )
        self.threads = max(1, int(self.threads))


@dataclass(frozen=True)
class Expression:
    """A complex function of n weak values, vectorized over leading axes."""
    name: str
    n_inputs: int
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, zw: np.ndarray) -> np.ndarray:
        return self.func(np.asarray(zw, dtype=complex))


def pair_expression() -> Expression:
    return Expression('ZZ', 2, lambda z: z[..., 0] * z[..., 1])


def witness_expression(n: int) -> Expression:
    return Expression(f'C^({n})', n, witness_c_batch)


def projector_expression(n: int, j: int) -> Expression:
    idx = BasisIndex(n, j)
    return Expression(idx.label(), n, lambda z: projector_wv_batch(idx, z))


@dataclass
class PropagationResult:
    value: complex
    sigma_re: float
    sigma_im: float
    gradient_norm: float
    method: Method

    def as_tuple(self) -> Tuple[complex, float, float]:
        return self.value, self.sigma_re, self.sigma_im


def real_gradient(f: Expression, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Central-difference gradients of Re f and Im f with respect to the 2n real
    inputs ordered (Re z_1..Re z_n, Im z_1..Im z_n).
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    x = np.concatenate([values.real, values.imag])
    steps = Config.FD_RELATIVE_STEP * np.maximum(np.abs(x), 1.0)
    shifts = np.diag(steps)
    plus = x[None, :] + shifts
    minus = x[None, :] - shifts
    to_complex = lambda v: v[:, :n] + 1j * v[:, n:]
    diff = (f(to_complex(plus)) - f(to_complex(minus))) / (2 * steps)
    return diff.real, diff.imag


def _monte_carlo_chunk(f: Expression, values: np.ndarray, re_sigma: np.ndarray,
                       im_sigma: np.ndarray, size: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    re = rng.normal(values.real, re_sigma, size=(size, len(values)))
    im = rng.normal(values.imag, im_sigma, size=(size, len(values)))
    return f(re + 1j * im)


def propagate_values(f: Expression, values: np.ndarray, re_sigma: np.ndarray, im_sigma: np.ndarray,
                     cfg: PropagationConfig = None) -> PropagationResult:
    """Propagate through f from explicit centrals and sigmas."""
    cfg = cfg or PropagationConfig()
    values = np.asarray(values, dtype=complex)
    re_sigma = np.asarray(re_sigma, dtype=float)
    im_sigma = np.asarray(im_sigma, dtype=float)
    if not (values.shape == re_sigma.shape == im_sigma.shape == (f.n_inputs,)):
        raise StructuralError(f"{f.name} takes {f.n_inputs} weak values, got shape {values.shape}")

    central = complex(f(values[None, :])[0])
    grad_re, grad_im = real_gradient(f, values)
    sigmas = np.concatenate([re_sigma, im_sigma])
    gradient_norm = float(np.linalg.norm(grad_re))

    if cfg.method == Method.FIRST_ORDER:
        sigma_re = float(np.sqrt(np.sum((grad_re * sigmas) ** 2)))
        sigma_im = float(np.sqrt(np.sum((grad_im * sigmas) ** 2)))
        return PropagationResult(central, sigma_re, sigma_im, gradient_norm, cfg.method)

    chunk = Config.MC_CHUNK_SIZE
    n_chunks = math.ceil(cfg.mc_samples / chunk)
    sizes = [min(chunk, cfg.mc_samples - k * chunk) for k in range(n_chunks)]
    children = np.random.SeedSequence(cfg.seed).spawn(n_chunks)
    jobs = list(zip(sizes, children))
    run = lambda job: _monte_carlo_chunk(f, values, re_sigma, im_sigma, *job)
    if cfg.threads == 1:
        parts = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as executor:
            parts = list(executor.map(run, jobs))
    samples = np.concatenate(parts)
    sigma_re = float(np.std(samples.real, ddof=1))
    sigma_im = float(np.std(samples.imag, ddof=1))
    logger.debug(f"{f.name}: {cfg.mc_samples} Monte Carlo samples in {n_chunks} chunks")
    return PropagationResult(central, sigma_re, sigma_im, gradient_norm, cfg.method)


def propagate(f: Expression, table: DataSetTable, subset: Iterable[int],
              cfg: PropagationConfig = None) -> PropagationResult:
    """
    Value and standard deviations of f over the selected data sets, treating
    every Re and Im component as an independent Gaussian.

    Args:
        f: expression of len(subset) weak values
        table: measured weak values
        subset: data set ids (1-based), in the order f consumes them
        cfg: propagation method and Monte Carlo settings

    Returns:
        PropagationResult (value, sigma_re, sigma_im, gradient_norm, method)
    """
    values, re_sigma, im_sigma = table.arrays(subset)
    return propagate_values(f, values, re_sigma, im_sigma, cfg)

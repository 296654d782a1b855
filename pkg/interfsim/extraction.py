"""
Turning IN/OUT fringes and blocked-path exposures into a single-spin weak value.

With R the IN-fringe asymmetry (I3 - I1)/(I3 + I1) taken at chi0 + pi/2 and
chi0 + 3pi/2 (chi0 the OUT maximum) and T the blocked-path asymmetry
(P1 - P2)/(P1 + P2), the coupling model gives

    R + i T = sin(alpha) Z_w / K,   K = cos^2(alpha/2) + sin^2(alpha/2) |Z_w|^2

Solving the quadratic for K on the branch containing the weak limit:

    rho^2 = R^2 + T^2,   K = 2 cos^2(alpha/2) / (1 + sqrt(1 - rho^2))
    Z_w = (R + i T) K / sin(alpha)

valid for |Z_w| < cot(alpha/2). The linearized form is Z_w = (R + i T) / alpha.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import Config
from interfsim.coupling import Mode, ProtocolSettings
from interfsim.fitting import SineFit, fit_sine
from interfsim.simulator import Interferogram, simulate, subtract_background
from qalg.states import SpinState
from utils.errors import DomainError, ExtractionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasuredZ:
    """
    A single-spin weak value with independent Gaussian errors on Re and Im.

    Sigmas are positive. Only values flagged exact (noiseless extraction) may
    carry a zero sigma.
    """
    re: float
    re_sigma: float
    im: float
    im_sigma: float
    exact: bool = False

    def __post_init__(self):
        if self.re_sigma < 0 or self.im_sigma < 0:
            raise DomainError("Weak-value sigmas must be non-negative")
        if not self.exact and (self.re_sigma == 0 or self.im_sigma == 0):
            raise DomainError("Weak-value sigmas must be positive unless the value is exact")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def to_dict(self) -> dict:
        return {
            're': self.re, 're_sigma': self.re_sigma, 'im': self.im, 'im_sigma': self.im_sigma,
            'exact': self.exact,
        }


def invert_asymmetries(r: float, t: float, alpha_deg: float, linearized: bool = False) -> complex:
    """Z_w from the fringe asymmetry r and the blocked-path asymmetry t."""
    alpha = np.deg2rad(alpha_deg)
    if linearized:
        return complex(r, t) / alpha
    rho2 = min(r * r + t * t, 1.0)
    k = 2 * np.cos(alpha / 2) ** 2 / (1 + np.sqrt(1 - rho2))
    return complex(r, t) * k / np.sin(alpha)


def _fringe_intensities(in_params: np.ndarray, out_phase: float) -> Tuple[float, float]:
    """IN fit at chi0 + pi/2 and chi0 + 3 pi/2 with chi0 = pi/2 - out_phase."""
    offset, amplitude, phase = in_params
    chi0 = np.pi / 2 - out_phase
    i1 = offset + amplitude * np.sin(chi0 + np.pi / 2 + phase)
    i3 = offset + amplitude * np.sin(chi0 + 3 * np.pi / 2 + phase)
    return float(i1), float(i3)


def _z_from_parameters(p: np.ndarray, alpha_deg: float, linearized: bool) -> np.ndarray:
    """p = (in offset, in amplitude, in phase, out phase, path-P1 intensity, path-P2 intensity)."""
    i1, i3 = _fringe_intensities(p[:3], p[3])
    fringe_total = i3 + i1
    path_total = p[4] + p[5]
    if fringe_total <= 0 or path_total <= 0:
        raise ExtractionError(
            f"Zero total intensity in the inversion (fringe={fringe_total:.6g}, paths={path_total:.6g})"
        )
    r = (i3 - i1) / fringe_total
    t = (p[4] - p[5]) / path_total
    z = invert_asymmetries(r, t, alpha_deg, linearized)
    return np.array([z.real, z.imag])


def _pair(value: Union[float, Sequence[float]]) -> Tuple[float, float]:
    if np.ndim(value) == 0:
        return float(value), float(value)
    first, second = value
    return float(first), float(second)


def extract_weak_value(in_fit: SineFit, out_fit: SineFit, i_block_p1: float, i_block_p2: float,
                       backgrounds: Union[float, Sequence[float]] = 0.0,
                       alpha_deg: float = Config.ALPHA_DEG, linearized: bool = False,
                       block_variances: Optional[Sequence[float]] = None) -> MeasuredZ:
    """
    Invert fitted fringes and blocked-path intensities into Z_w.

    Args:
        in_fit: fit of the IN (coupling on) fringe
        out_fit: fit of the OUT (coupling off) fringe, fixing the phase reference
        i_block_p1: counts with path P1 blocked (only P2 open)
        i_block_p2: counts with path P2 blocked (only P1 open)
        backgrounds: background counts subtracted from the blocked exposures,
            one value or one per exposure
        alpha_deg: rotation angle
        linearized: use the small-angle inversion
        block_variances: variances of the blocked intensities; Poisson by default

    Returns:
        MeasuredZ with first-order sigmas from the fit covariances and the
        blocked-path variances
    """
    if not 0 < alpha_deg <= 90:
        raise DomainError(f"Rotation angle alpha must lie in (0, 90] degrees (got {alpha_deg})")
    bg1, bg2 = _pair(backgrounds)
    only_p2 = max(float(i_block_p1) - bg1, 0.0)
    only_p1 = max(float(i_block_p2) - bg2, 0.0)
    if block_variances is None:
        var_p2 = max(float(i_block_p1), 1.0)
        var_p1 = max(float(i_block_p2), 1.0)
    else:
        var_p2, var_p1 = (float(v) for v in block_variances)

    params = np.array([in_fit.offset, in_fit.amplitude, in_fit.phase, out_fit.phase, only_p1, only_p2])
    covariance = np.zeros((6, 6))
    covariance[:3, :3] = in_fit.covariance
    covariance[3, 3] = out_fit.covariance[2, 2]
    covariance[4, 4] = var_p1
    covariance[5, 5] = var_p2

    z = _z_from_parameters(params, alpha_deg, linearized)

    jacobian = np.zeros((2, 6))
    for k in range(6):
        h = Config.FD_RELATIVE_STEP * max(abs(params[k]), 1.0)
        up, down = params.copy(), params.copy()
        up[k] += h
        down[k] -= h
        jacobian[:, k] = (
            _z_from_parameters(up, alpha_deg, linearized) - _z_from_parameters(down, alpha_deg, linearized)
        ) / (2 * h)
    z_cov = jacobian @ covariance @ jacobian.T
    re_sigma, im_sigma = np.sqrt(np.clip(np.diag(z_cov), 0, None))

    if abs(complex(*z)) >= 1 / np.tan(np.deg2rad(alpha_deg) / 2) and not linearized:
        logger.warning(f"|Z_w| = {abs(complex(*z)):.4g} lies outside the invertible branch")
    exact = not (re_sigma > 0 and im_sigma > 0)
    return MeasuredZ(float(z[0]), float(re_sigma), float(z[1]), float(im_sigma), exact=exact)


@dataclass
class ProtocolRun:
    """Everything recorded by one run of the weak-measurement protocol."""
    measured: MeasuredZ
    in_fit: SineFit
    out_fit: SineFit
    exposures: dict


PROTOCOL_MODES = (Mode.IN, Mode.OUT, Mode.BLOCK_P1, Mode.BLOCK_P2, Mode.ORTHOGONAL_BG)


def run_protocol(pre: SpinState, post: SpinState, settings: ProtocolSettings = None,
                 seed: int = None, linearized: bool = False) -> ProtocolRun:
    """
    Simulate the IN, OUT, both blocked and the orthogonal-background exposures
    (each from its own child seed), subtract the background, fit and extract.
    """
    settings = settings or ProtocolSettings()
    seed = Config.SEED if seed is None else seed
    children = np.random.SeedSequence(seed).spawn(len(PROTOCOL_MODES))
    exposures = {}
    for mode, child in zip(PROTOCOL_MODES, children):
        child_seed = int(child.generate_state(1, dtype=np.uint32)[0])
        exposures[mode] = simulate(settings.config_for(mode, child_seed), pre, post)

    background = exposures[Mode.ORTHOGONAL_BG]
    corrected = {mode: subtract_background(exposures[mode], background)
                 for mode in (Mode.IN, Mode.OUT, Mode.BLOCK_P1, Mode.BLOCK_P2)}
    in_fit = fit_sine(corrected[Mode.IN])
    out_fit = fit_sine(corrected[Mode.OUT])

    block_p1 = corrected[Mode.BLOCK_P1]
    block_p2 = corrected[Mode.BLOCK_P2]
    measured = extract_weak_value(
        in_fit, out_fit,
        float(block_p1.counts.sum()), float(block_p2.counts.sum()),
        backgrounds=0.0,
        alpha_deg=settings.alpha,
        linearized=linearized,
        block_variances=(float(block_p1.variance.sum()), float(block_p2.variance.sum())),
    )
    logger.debug(f"Protocol run (seed={seed}): Z_w = {measured.value:.6g}")
    return ProtocolRun(measured, in_fit, out_fit, exposures)


def measure_weak_value(pre: SpinState, post: SpinState, alpha_deg: float = Config.ALPHA_DEG,
                       seed: int = None, linearized: bool = False, noiseless: bool = False,
                       **statistics) -> MeasuredZ:
    """
    Full protocol for one spin: returns the extracted MeasuredZ.

    Keyword statistics (chi_grid, mean_counts, block_mean_counts,
    background_rate, chi_offset) override the defaults.
    """
    settings = ProtocolSettings(alpha=alpha_deg, noiseless=noiseless, **statistics)
    return run_protocol(pre, post, settings, seed=seed, linearized=linearized).measured

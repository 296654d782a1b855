"""
Weighted least-squares fit of offset + amplitude * sin(chi + phase).
"""
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from config.settings import Config
from interfsim.simulator import Interferogram
from utils.errors import DomainError, FitFailureError

logger = logging.getLogger(__name__)

MIN_POINTS = 6
TWO_PI = 2 * np.pi


@dataclass
class SineFit:
    offset: float
    amplitude: float
    phase: float
    covariance: np.ndarray
    rss: float
    n_points: int
    iterations: int = 0
    phase_identified: bool = True
    residual_trace: List[float] = field(default_factory=list)

    @property
    def params(self) -> np.ndarray:
        return np.array([self.offset, self.amplitude, self.phase])

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    def evaluate(self, chi) -> np.ndarray:
        return self.offset + self.amplitude * np.sin(np.asarray(chi, dtype=float) + self.phase)

    def to_dict(self) -> dict:
        return {
            'offset': self.offset,
            'amplitude': self.amplitude,
            'phase': self.phase,
            'covariance': self.covariance.tolist(),
            'rss': self.rss,
            'n_points': self.n_points,
            'iterations': self.iterations,
            'phase_identified': self.phase_identified,
        }


def _model(p: np.ndarray, chi: np.ndarray) -> np.ndarray:
    return p[0] + p[1] * np.sin(chi + p[2])


def _jacobian(p: np.ndarray, chi: np.ndarray) -> np.ndarray:
    return np.column_stack([
        np.ones_like(chi),
        np.sin(chi + p[2]),
        p[1] * np.cos(chi + p[2]),
    ])


def _chi2(p: np.ndarray, chi: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    r = y - _model(p, chi)
    return float(np.sum(w * r * r))


def _check_grid(chi: np.ndarray):
    if len(chi) < MIN_POINTS:
        raise DomainError(f"Sine fit needs at least {MIN_POINTS} phase settings (got {len(chi)})")
    span = np.ptp(chi)
    # a grid of n points covers a period when its span plus one mean step reaches 2 pi
    if span * len(chi) / (len(chi) - 1) < TWO_PI * (1 - 1e-9):
        raise DomainError(f"Phase settings span {span:.4f} rad, less than one period")


def fit_sine(g: Interferogram, max_iter: int = None, tol: float = None) -> SineFit:
    """
    Damped Gauss-Newton fit with Poisson weights 1/max(count, 1), or 1/variance
    when the interferogram carries explicit variances.

    The best of several starting phases seeds the iteration; each step is halved
    until chi^2 decreases. A step that cannot decrease chi^2 ends the iteration.

    Raises:
        FitFailureError: the iteration cap was reached, with the chi^2 trace
    """
    max_iter = max_iter or Config.FIT_MAX_ITER
    tol = tol or Config.FIT_TOL
    chi = g.chi.astype(float)
    y = g.counts.astype(float)
    _check_grid(chi)
    w = 1.0 / g.weights_variance()
    sqrt_w = np.sqrt(w)

    offset0 = float(np.sum(w * y) / np.sum(w))
    amp0 = float((y.max() - y.min()) / 2)
    starts = [np.array([offset0, amp0, TWO_PI * k / Config.FIT_PHASE_STARTS])
              for k in range(Config.FIT_PHASE_STARTS)]
    p = min(starts, key=lambda s: _chi2(s, chi, y, w))
    current = _chi2(p, chi, y, w)
    trace = [current]

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        J = _jacobian(p, chi) * sqrt_w[:, None]
        r = (y - _model(p, chi)) * sqrt_w
        step, *_ = np.linalg.lstsq(J, r, rcond=None)

        t = 1.0
        accepted = False
        for _ in range(Config.FIT_MAX_HALVINGS):
            trial = p + t * step
            value = _chi2(trial, chi, y, w)
            if value < current:
                accepted = True
                break
            t /= 2
        if not accepted:
            converged = True
            break

        change = np.linalg.norm(t * step) / (np.linalg.norm(p) + tol)
        p, current = trial, value
        trace.append(current)
        if change <= tol:
            converged = True
            break

    if not converged:
        raise FitFailureError(
            f"Sine fit did not converge in {max_iter} iterations (chi2={current:.6g})", trace
        )

    offset, amplitude, phase = p
    if amplitude < 0:
        amplitude = -amplitude
        phase += np.pi
    phase = float(np.mod(phase, TWO_PI))
    p = np.array([offset, amplitude, phase])

    J = _jacobian(p, chi)
    covariance = np.linalg.pinv(J.T @ (w[:, None] * J))
    covariance = (covariance + covariance.T) / 2

    phase_identified = amplitude > 1e-9 * max(abs(offset), 1.0)
    if not phase_identified:
        logger.warning("Fitted amplitude vanishes: phase is unidentifiable")

    logger.debug(
        f"Sine fit ({g.mode.value}): offset={offset:.6g} amp={amplitude:.6g} "
        f"phase={phase:.6g} after {iterations} iterations"
    )
    return SineFit(
        offset=float(offset),
        amplitude=float(amplitude),
        phase=phase,
        covariance=covariance,
        rss=float(current),
        n_points=len(chi),
        iterations=iterations,
        phase_identified=bool(phase_identified),
        residual_trace=trace,
    )

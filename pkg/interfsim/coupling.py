"""
Coupling model of the IN/OUT weak measurement in a two-path interferometer.

The spin is rotated by +alpha about z in path P1 and by -alpha in path P2, and
P2 carries the phase-shifter phase e^{i chi}. With a_z = <phi|z><z|psi> for the
spin components z = +1, -1, the amplitude at the O port is

    A_O = 1/2 sum_z a_z (e^{-i z alpha/2} + e^{i chi} e^{+i z alpha/2})

and the H port takes the minus sign. Writing S = <phi|psi>, Z = Z_w = x + i y,
c = cos(alpha/2), s = sin(alpha/2), the O-port fringe is

    I(chi) = |S|^2 / 2 [ (c^2 + s^2 |Z|^2) + (c^2 - s^2 |Z|^2) cos chi - sin(alpha) x sin chi ]

so the IN fringe shifts against the OUT fringe by an amount set by Re Z_w, and
the two blocked-path intensities |S|^2/4 (c^2 + s^2 |Z|^2 +- sin(alpha) y)
differ by an amount set by Im Z_w.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from config.settings import Config
from qalg.states import SpinState
from utils.errors import DomainError

ArrayLike = Union[float, Sequence[float], np.ndarray]


class Mode(str, Enum):
    IN = 'IN'
    OUT = 'OUT'
    BLOCK_P1 = 'BLOCK_P1'
    BLOCK_P2 = 'BLOCK_P2'
    ORTHOGONAL_BG = 'ORTHOGONAL_BG'

    @property
    def is_fringe(self) -> bool:
        return self in (Mode.IN, Mode.OUT, Mode.ORTHOGONAL_BG)

    @property
    def is_blocked(self) -> bool:
        return self in (Mode.BLOCK_P1, Mode.BLOCK_P2)


def default_chi_grid(points: int = None) -> np.ndarray:
    points = points or Config.CHI_POINTS
    return np.linspace(0.0, 2 * np.pi, points, endpoint=False)


def _check_alpha(alpha: float, allow_zero: bool = False):
    low_ok = alpha >= 0 if allow_zero else alpha > 0
    if not (np.isfinite(alpha) and low_ok and alpha <= 90):
        bound = '[0, 90]' if allow_zero else '(0, 90]'
        raise DomainError(f"Rotation angle alpha must lie in {bound} degrees (got {alpha})")


@dataclass
class CouplingConfig:
    """One exposure of the interferometer: angle in degrees, phase grid in radians."""
    alpha: float = Config.ALPHA_DEG
    chi_grid: Optional[np.ndarray] = None
    mean_counts: float = Config.MEAN_COUNTS
    background_rate: float = Config.BACKGROUND_RATE
    seed: int = Config.SEED
    mode: Mode = Mode.IN
    chi_offset: float = 0.0
    noiseless: bool = False

    def __post_init__(self):
        self.mode = Mode(self.mode)
        _check_alpha(float(self.alpha))
        if not self.mean_counts > 0:
            raise DomainError(f"mean_counts must be positive (got {self.mean_counts})")
        if self.background_rate < 0:
            raise DomainError(f"background_rate must be non-negative (got {self.background_rate})")
        if self.chi_grid is None:
            self.chi_grid = default_chi_grid() if self.mode.is_fringe else np.zeros(1)
        self.chi_grid = np.atleast_1d(np.asarray(self.chi_grid, dtype=float))
        if self.chi_grid.size == 0:
            raise DomainError("chi_grid must not be empty")

    def metadata(self) -> dict:
        return {
            'alpha_deg': float(self.alpha),
            'seed': int(self.seed),
            'mean_counts': float(self.mean_counts),
            'background_rate': float(self.background_rate),
            'chi_offset': float(self.chi_offset),
        }


def _component_weights(pre: SpinState, post: SpinState) -> np.ndarray:
    """a_z = <phi|z><z|psi> for z = +1 (|0>) and z = -1 (|1>)."""
    return np.array([np.conj(post.up) * pre.up, np.conj(post.down) * pre.down], dtype=complex)


def ideal_intensity(alpha: float, chi: ArrayLike, mode: Union[Mode, str],
                    pre: SpinState, post: SpinState, port: str = 'O') -> Union[float, np.ndarray]:
    """
    Detection probability per incident neutron at the O (or H) port.

    Args:
        alpha: rotation angle in degrees, 0 switches the coupling off
        chi: phase-shifter setting(s) in radians
        mode: measurement mode; OUT and ORTHOGONAL_BG run with the rotators off
        pre: preselected spin state
        post: postselected spin state (ignored by ORTHOGONAL_BG, which
            postselects the state orthogonal to pre)
        port: 'O' or 'H'

    Returns:
        Intensity with the shape of chi; blocked modes are not renormalized
    """
    mode = Mode(mode)
    _check_alpha(float(alpha), allow_zero=True)
    if port not in ('O', 'H'):
        raise DomainError(f"Port must be 'O' or 'H' (got {port!r})")

    if mode in (Mode.OUT, Mode.ORTHOGONAL_BG):
        half = 0.0
    else:
        half = np.deg2rad(alpha) / 2
    if mode == Mode.ORTHOGONAL_BG:
        post = pre.orthogonal()

    chi_arr = np.asarray(chi, dtype=float)
    weights = _component_weights(pre, post)
    z = np.array([1.0, -1.0])
    p1 = np.sum(weights * np.exp(-1j * z * half))
    p2 = np.sum(weights * np.exp(1j * z * half))
    sign = 1.0 if port == 'O' else -1.0

    if mode == Mode.BLOCK_P1:
        amplitude = 0.5 * sign * np.exp(1j * chi_arr) * p2
    elif mode == Mode.BLOCK_P2:
        amplitude = 0.5 * p1 * np.ones_like(chi_arr)
    else:
        amplitude = 0.5 * (p1 + sign * np.exp(1j * chi_arr) * p2)

    intensity = np.abs(amplitude) ** 2
    return float(intensity) if intensity.ndim == 0 else intensity


def pointer_states(alpha: float) -> np.ndarray:
    """Normalized path states (P1, P2 amplitudes) conditioned on z = +1 and z = -1."""
    _check_alpha(float(alpha), allow_zero=True)
    half = np.deg2rad(alpha) / 2
    return np.array([
        [np.exp(-1j * half), np.exp(1j * half)],
        [np.exp(1j * half), np.exp(-1j * half)],
    ]) / np.sqrt(2)


def pointer_infidelity(alpha: float) -> float:
    """1 - |<p_+|p_->|^2, which equals sin^2(alpha)."""
    plus, minus = pointer_states(alpha)
    return float(1 - abs(np.vdot(plus, minus)) ** 2)


@dataclass
class ProtocolSettings:
    """Statistics of the full three-fringe plus two blocked-exposure protocol."""
    alpha: float = Config.ALPHA_DEG
    chi_grid: np.ndarray = field(default_factory=default_chi_grid)
    mean_counts: float = Config.MEAN_COUNTS
    block_mean_counts: float = Config.BLOCK_MEAN_COUNTS
    background_rate: float = Config.BACKGROUND_RATE
    chi_offset: float = 0.0
    noiseless: bool = False

    def config_for(self, mode: Mode, seed: int) -> CouplingConfig:
        mode = Mode(mode)
        if mode.is_blocked:
            return CouplingConfig(
                alpha=self.alpha, chi_grid=np.zeros(1), mean_counts=self.block_mean_counts,
                background_rate=self.background_rate, seed=seed, mode=mode,
                chi_offset=self.chi_offset, noiseless=self.noiseless,
            )
        return CouplingConfig(
            alpha=self.alpha, chi_grid=self.chi_grid, mean_counts=self.mean_counts,
            background_rate=self.background_rate, seed=seed, mode=mode,
            chi_offset=self.chi_offset, noiseless=self.noiseless,
        )

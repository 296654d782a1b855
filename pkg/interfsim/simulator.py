"""
Seeded Poisson simulation of interferometer exposures and the interferogram
file format.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from interfsim.coupling import CouplingConfig, Mode, ideal_intensity
from qalg.states import SpinState
from utils.errors import DataError, StructuralError

logger = logging.getLogger(__name__)


@dataclass
class Interferogram:
    chi: np.ndarray
    counts: np.ndarray
    mode: Mode
    metadata: dict = field(default_factory=dict)
    variance: Optional[np.ndarray] = None

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.chi = np.atleast_1d(np.asarray(self.chi, dtype=float))
        self.counts = np.atleast_1d(np.asarray(self.counts))
        if self.chi.shape != self.counts.shape:
            raise StructuralError(
                f"Need one count per phase setting: {self.chi.shape} vs {self.counts.shape}"
            )
        if not np.all(np.isfinite(self.counts)) or np.any(self.counts < 0):
            raise DataError("Counts must be finite and non-negative")
        if self.variance is not None:
            self.variance = np.atleast_1d(np.asarray(self.variance, dtype=float))
            if self.variance.shape != self.counts.shape:
                raise StructuralError("Variance must have one entry per count")

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def alpha_deg(self) -> Optional[float]:
        return self.metadata.get('alpha_deg')

    @property
    def seed(self) -> Optional[int]:
        return self.metadata.get('seed')

    def weights_variance(self) -> np.ndarray:
        """Per-point variance used by the fit: explicit, else Poisson max(count, 1)."""
        if self.variance is not None:
            return np.maximum(self.variance, 1e-300)
        return np.maximum(self.counts.astype(float), 1.0)

    def to_json(self) -> dict:
        counts = self.counts
        if np.issubdtype(counts.dtype, np.integer):
            counts_out = [int(c) for c in counts]
        else:
            counts_out = [float(c) for c in counts]
        data = {
            'mode': self.mode.value,
            'alpha_deg': self.alpha_deg,
            'seed': self.seed,
            'chi': [float(c) for c in self.chi],
            'counts': counts_out,
        }
        if self.variance is not None:
            data['variance'] = [float(v) for v in self.variance]
        extra = {k: v for k, v in self.metadata.items() if k not in ('alpha_deg', 'seed')}
        if extra:
            data['metadata'] = extra
        return data

    @classmethod
    def from_json(cls, data: dict) -> 'Interferogram':
        try:
            metadata = dict(data.get('metadata', {}))
            metadata['alpha_deg'] = data.get('alpha_deg')
            metadata['seed'] = data.get('seed')
            counts = data['counts']
            if all(float(c).is_integer() for c in counts):
                counts = np.asarray(counts, dtype=np.int64)
            return cls(
                chi=data['chi'],
                counts=counts,
                mode=data['mode'],
                metadata=metadata,
                variance=data.get('variance'),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Malformed interferogram: {e}") from e

    def save(self, path: Union[str, Path]):
        Path(path).write_text(json.dumps(self.to_json(), indent=2), encoding='utf-8')

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Interferogram':
        path = Path(path)
        if not path.exists():
            raise DataError(f"Interferogram file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise DataError(f"{path} is not valid JSON: {e}") from e
        return cls.from_json(data)


def expected_counts(config: CouplingConfig, pre: SpinState, post: SpinState) -> np.ndarray:
    intensity = ideal_intensity(
        config.alpha, config.chi_grid + config.chi_offset, config.mode, pre, post
    )
    return config.mean_counts * np.asarray(intensity) + config.background_rate


def simulate(config: CouplingConfig, pre: SpinState, post: SpinState) -> Interferogram:
    """
    Draw one exposure: Poisson counts with mean mean_counts * intensity + background
    per phase setting, from an RNG owned by this call.
    """
    mean = expected_counts(config, pre, post)
    if config.noiseless:
        counts = mean.astype(float)
    else:
        rng = np.random.default_rng(config.seed)
        counts = rng.poisson(mean).astype(np.int64)

    metadata = config.metadata()
    metadata['noiseless'] = bool(config.noiseless)
    logger.debug(
        f"Simulated {config.mode.value}: {len(counts)} settings, {float(np.sum(counts)):.0f} counts"
    )
    return Interferogram(config.chi_grid.copy(), counts, config.mode, metadata)


def subtract_background(signal: Interferogram, background: Interferogram) -> Interferogram:
    """
    Subtract the mean of a background exposure pointwise, clamping at zero.

    The variance of each corrected point is the Poisson variance of the raw
    count plus the variance of the background mean.
    """
    if len(background) == 0:
        raise DataError("Background exposure has no points")
    bg = background.counts.astype(float)
    bg_mean = float(bg.mean())
    bg_mean_var = max(bg_mean, 0.0) / len(bg)

    raw_var = signal.weights_variance()
    corrected = np.maximum(signal.counts.astype(float) - bg_mean, 0.0)
    metadata = dict(signal.metadata)
    metadata['background_mean'] = bg_mean
    return Interferogram(signal.chi.copy(), corrected, signal.mode, metadata, raw_var + bg_mean_var)

"""
Bundled measurement tables: the 17 single-spin weak values and the published
pairwise (ZZ)_w products, loaded from CSV with an optional sha256 sidecar.
"""
import csv
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import Config, get_data_dir
from interfsim.extraction import MeasuredZ
from utils.errors import DataError, DomainError

logger = logging.getLogger(__name__)

EXPECTED_SETS = 17
MEASURED_FIELDS = ('set_id', 're', 're_sigma', 'im', 'im_sigma')
PAIRS_FILE = 'paper_pairs.csv'

# Reactor power during each recording: sets 1-6 at ~58 MW, sets 7-17 at ~43 MW
REACTOR_POWER_MW = {**{k: 58 for k in range(1, 7)}, **{k: 43 for k in range(7, 18)}}

PathLike = Union[str, Path]


def _resolve(path: Optional[PathLike], default_name: str) -> Path:
    if path is None:
        return get_data_dir() / default_name
    path = Path(path)
    if not path.exists() and not path.is_absolute():
        candidate = get_data_dir() / path
        if candidate.exists():
            return candidate
    return path


def verify_checksum(path: Path) -> Optional[str]:
    """Compare against <file>.sha256 when it exists; returns the digest checked."""
    sidecar = path.with_name(path.name + '.sha256')
    if not sidecar.exists():
        return None
    expected = sidecar.read_text(encoding='utf-8').split()[0].strip().lower()
    actual = hashlib.sha256(path.read_bytes()).hexdigest()
    if actual != expected:
        raise DataError(f"Checksum mismatch for {path.name}: expected {expected}, got {actual}")
    return actual


def _read_rows(path: Path, fields: Sequence[str]) -> List[dict]:
    if not path.exists():
        raise DataError(f"Data file not found: {path}")
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        missing = set(fields) - set(reader.fieldnames or [])
        if missing:
            raise DataError(f"{path.name} is missing columns {sorted(missing)}")
        return list(reader)


def read_measured_csv(path: PathLike) -> Dict[int, MeasuredZ]:
    """set_id -> MeasuredZ for any CSV with the measured-weak-value schema."""
    path = Path(path)
    rows = {}
    for line, record in enumerate(_read_rows(path, MEASURED_FIELDS), start=2):
        try:
            set_id = int(record['set_id'])
            value = MeasuredZ(
                float(record['re']), float(record['re_sigma']),
                float(record['im']), float(record['im_sigma']),
            )
        except (TypeError, ValueError, DomainError) as e:
            raise DataError(f"{path.name}:{line}: {e}") from e
        if set_id in rows:
            raise DataError(f"{path.name}:{line}: duplicate set_id {set_id}")
        rows[set_id] = value
    return rows


def write_measured_csv(path: PathLike, rows: Dict[int, MeasuredZ]):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(MEASURED_FIELDS)
        for set_id in sorted(rows):
            z = rows[set_id]
            writer.writerow([set_id, repr(z.re), repr(z.re_sigma), repr(z.im), repr(z.im_sigma)])


@dataclass(frozen=True)
class DataSetTable:
    """The 17 measured single-spin weak values, keyed 1..17."""
    rows: Dict[int, MeasuredZ]
    source: Optional[str] = None
    checksum: Optional[str] = None

    def __post_init__(self):
        expected = set(range(1, EXPECTED_SETS + 1))
        present = set(self.rows)
        if present != expected:
            missing = sorted(expected - present)
            extra = sorted(present - expected)
            raise DataError(f"Table must hold sets 1..{EXPECTED_SETS}; missing {missing}, unexpected {extra}")
        bad = [k for k, z in self.rows.items() if z.re_sigma <= 0 or z.im_sigma <= 0]
        if bad:
            raise DataError(f"Non-positive sigmas for sets {sorted(bad)}")

    @classmethod
    def load(cls, path: Optional[PathLike] = None) -> 'DataSetTable':
        path = _resolve(path, Config.DATA_FILE)
        checksum = verify_checksum(path) if path.exists() else None
        table = cls(read_measured_csv(path), source=str(path), checksum=checksum)
        logger.info(f"Loaded {len(table)} data sets from {path}")
        return table

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, set_id: int) -> MeasuredZ:
        return self.rows[set_id]

    def subset(self, ids: Iterable[int]) -> List[MeasuredZ]:
        ids = list(ids)
        bad = [i for i in ids if i not in self.rows]
        if bad:
            raise DataError(f"Unknown data set ids {bad}")
        return [self.rows[i] for i in ids]

    def arrays(self, ids: Iterable[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Complex centrals plus Re and Im sigmas for the selected sets."""
        rows = self.subset(ids)
        values = np.array([z.value for z in rows], dtype=complex)
        re_sigma = np.array([z.re_sigma for z in rows])
        im_sigma = np.array([z.im_sigma for z in rows])
        return values, re_sigma, im_sigma

    def reactor_power(self, set_id: int) -> int:
        if set_id not in self.rows:
            raise DataError(f"Unknown data set id {set_id}")
        return REACTOR_POWER_MW[set_id]

    def sigma_by_power(self) -> Dict[int, Tuple[float, float]]:
        """Mean (Re, Im) sigma per reactor power in MW."""
        groups: Dict[int, List[MeasuredZ]] = {}
        for set_id, z in self.rows.items():
            groups.setdefault(REACTOR_POWER_MW[set_id], []).append(z)
        return {
            power: (float(np.mean([z.re_sigma for z in zs])), float(np.mean([z.im_sigma for z in zs])))
            for power, zs in sorted(groups.items(), reverse=True)
        }


@dataclass(frozen=True)
class PublishedPair:
    first: int
    second: int
    value: MeasuredZ


def load_published_pairs(path: Optional[PathLike] = None) -> List[PublishedPair]:
    """The published (ZZ)_w table used as the comparison reference."""
    path = _resolve(path, PAIRS_FILE)
    if path.exists():
        verify_checksum(path)
    fields = ('first', 'second', 're', 're_sigma', 'im', 'im_sigma')
    pairs = []
    for line, record in enumerate(_read_rows(path, fields), start=2):
        try:
            pairs.append(PublishedPair(
                int(record['first']), int(record['second']),
                MeasuredZ(float(record['re']), float(record['re_sigma']),
                          float(record['im']), float(record['im_sigma'])),
            ))
        except (TypeError, ValueError, DomainError) as e:
            raise DataError(f"{path.name}:{line}: {e}") from e
    return pairs

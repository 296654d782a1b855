import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env if it exists
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent.parent


def get_data_dir() -> Path:
    """
    Resolve the directory holding the bundled measurement data.
    WHEEL_DATA_DIR wins over the in-repo data/ directory.
    """
    override = os.getenv('WHEEL_DATA_DIR')
    if override:
        return Path(override).expanduser()
    return PROJECT_ROOT / 'data'


class Config:
    """Base configuration class."""

    # Paths
    DATA_FILE = os.getenv('WHEEL_DATA_FILE', 'paper_data.csv')

    # Logging
    LOG_LEVEL = os.getenv('WHEEL_LOG_LEVEL', 'INFO')
    LOG_DIR = os.getenv('WHEEL_LOG_DIR', '')

    # Execution
    THREADS = int(os.getenv('WHEEL_THREADS', 1))
    SEED = int(os.getenv('WHEEL_SEED', 20170406))
    MC_SAMPLES = int(os.getenv('WHEEL_MC_SAMPLES', 100000))
    MC_CHUNK_SIZE = 25000
    MC_MIN_SAMPLES = 1000

    # Linear algebra limits
    DENSE_MAX_SPINS = 12
    EXHAUSTIVE_MAX_SPINS = 5
    SINGULAR_OVERLAP_TOL = 1e-12
    NORM_TOL = 1e-12
    COMPLETENESS_TOL = 1e-9

    # Sine fitting
    FIT_MAX_ITER = int(os.getenv('WHEEL_FIT_MAX_ITER', 200))
    FIT_TOL = float(os.getenv('WHEEL_FIT_TOL', 1e-12))
    FIT_PHASE_STARTS = 8
    FIT_MAX_HALVINGS = 40

    # Error propagation
    FD_RELATIVE_STEP = 1e-6
    STATIONARY_GRADIENT_TOL = 1e-6

    # Interferometer defaults
    ALPHA_DEG = float(os.getenv('WHEEL_ALPHA_DEG', 15.0))
    CHI_POINTS = int(os.getenv('WHEEL_CHI_POINTS', 16))
    MEAN_COUNTS = float(os.getenv('WHEEL_MEAN_COUNTS', 4000))
    BLOCK_MEAN_COUNTS = float(os.getenv('WHEEL_BLOCK_MEAN_COUNTS', 6000))
    BACKGROUND_RATE = float(os.getenv('WHEEL_BACKGROUND_RATE', 20))

    # Reproduction
    SPIN_COUNTS = tuple(range(3, 18, 2))
    REPORT_SIGNIFICANT_DIGITS = 6


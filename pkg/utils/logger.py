import logging
import sys
from pathlib import Path
from typing import Optional

from config.settings import Config


class ProjectLogger:
    """
    Logging setup for the confined-contextuality toolkit.
    Console output goes to stderr so that stdout stays machine-readable.
    """

    def __init__(self, log_level: str = 'INFO', log_dir: Optional[str] = None):
        self.log_level = getattr(logging, log_level.upper(), logging.INFO)
        self.log_dir = Path(log_dir) if log_dir else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)

        self._setup_logging()

    def _setup_logging(self):
        """Configure console and optional file handlers on the package loggers."""

        detailed_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        simple_formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%H:%M:%S'
        )

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.log_level)
        console_handler.setFormatter(simple_formatter)
        handlers = [console_handler]

        if self.log_dir is not None:
            all_logs_file = self.log_dir / 'contextuality.log'
            file_handler = logging.FileHandler(all_logs_file, encoding='utf-8')
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(detailed_formatter)

            error_logs_file = self.log_dir / 'errors.log'
            error_handler = logging.FileHandler(error_logs_file, encoding='utf-8')
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(detailed_formatter)
            handlers.extend([file_handler, error_handler])

        root_logger = logging.getLogger()
        root_logger.setLevel(logging.DEBUG)

        # Replace only our own handlers; pytest's capture handlers stay.
        for handler in list(root_logger.handlers):
            if getattr(handler, '_wheel_handler', False):
                root_logger.removeHandler(handler)
        for handler in handlers:
            handler._wheel_handler = True
            root_logger.addHandler(handler)

        logging.debug("Logging initialized")
        logging.debug(f"Log level: {logging.getLevelName(self.log_level)}")
        if self.log_dir is not None:
            logging.debug(f"Log directory: {self.log_dir.absolute()}")

    def get_logger(self, name: str) -> logging.Logger:
        """Get a logger with the specified name."""
        return logging.getLogger(name)

    def log_command(self, command: str, details: Optional[dict] = None):
        """Log a CLI command invocation."""
        logger = self.get_logger("cli")
        msg = f"Command {command}"
        if details:
            msg += f" | Details={details}"
        logger.info(msg)

    def log_witness_summary(self, n: int, witness_re: float, sigma: float,
                            violation: float):
        """Log one witness row of a reproduction run."""
        analysis_logger = self.get_logger('analysis')
        analysis_logger.info(
            f"N={n}: Re C={witness_re:.4f} +/- {sigma:.4f} ({violation:.1f} sigma)"
        )


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None) -> ProjectLogger:
    """Create the process-wide logger from Config unless overridden."""
    return ProjectLogger(level or Config.LOG_LEVEL, log_dir if log_dir is not None else Config.LOG_DIR)

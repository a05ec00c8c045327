import logging
import os
import sys
from dataclasses import dataclass, field

from dotenv import load_dotenv

# Fix encoding on Windows
if sys.platform == "win32":
    sys.stdout.reconfigure(encoding="utf-8")

load_dotenv()


@dataclass
class Config:
    # Parallelism
    threads: int = field(default_factory=lambda: int(os.getenv("PHANTOMLAB_THREADS", "1")))

    # Exact iteration
    max_denominator_bits: int = field(
        default_factory=lambda: int(os.getenv("PHANTOMLAB_MAX_DENOMINATOR_BITS", "4000000"))
    )

    # Spectral series
    series_tol: float = field(default_factory=lambda: float(os.getenv("PHANTOMLAB_SERIES_TOL", "1e-16")))
    series_max_terms: int = field(
        default_factory=lambda: int(os.getenv("PHANTOMLAB_SERIES_MAX_TERMS", "1000000"))
    )

    # Pseudospectrum
    precision_bits: int = field(default_factory=lambda: int(os.getenv("PHANTOMLAB_PRECISION_BITS", "256")))
    real_threshold: float = field(
        default_factory=lambda: float(os.getenv("PHANTOMLAB_REAL_THRESHOLD", "1e-6"))
    )

    # Haar oracle
    state_limit: int = field(default_factory=lambda: int(os.getenv("PHANTOMLAB_STATE_LIMIT", str(2**24))))
    min_realizations: int = field(
        default_factory=lambda: int(os.getenv("PHANTOMLAB_MIN_REALIZATIONS", "100"))
    )

    # Output
    output_dir: str = field(default_factory=lambda: os.getenv("PHANTOMLAB_OUTPUT_DIR", "results"))
    log_level: str = field(default_factory=lambda: os.getenv("PHANTOMLAB_LOG_LEVEL", "INFO"))

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level.upper(), logging.INFO)

    def validate(self) -> list[str]:
        errors = []
        if self.threads < 1:
            errors.append("PHANTOMLAB_THREADS must be at least 1")
        if self.max_denominator_bits < 64:
            errors.append("PHANTOMLAB_MAX_DENOMINATOR_BITS must be at least 64")
        if not 0 < self.series_tol < 1:
            errors.append("PHANTOMLAB_SERIES_TOL must lie in (0, 1)")
        if self.series_max_terms < 8:
            errors.append("PHANTOMLAB_SERIES_MAX_TERMS must be at least 8")
        if self.precision_bits < 53:
            errors.append("PHANTOMLAB_PRECISION_BITS must be at least 53")
        if self.real_threshold <= 0:
            errors.append("PHANTOMLAB_REAL_THRESHOLD must be positive")
        if self.state_limit < 4:
            errors.append("PHANTOMLAB_STATE_LIMIT must be at least 4")
        if self.min_realizations < 1:
            errors.append("PHANTOMLAB_MIN_REALIZATIONS must be at least 1")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"PHANTOMLAB_LOG_LEVEL '{self.log_level}' is not a logging level")
        return errors

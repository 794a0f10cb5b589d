"""
Configuration management for quadstat.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import DimensionGuardError

GUARD_ENV_VAR = "QUADSTAT_GUARD_DIM"
DEFAULT_GUARD_DIM = 20000

logger = logging.getLogger(__name__)


@dataclass
class Config:
    """Configuration class for quadstat runs."""

    guard_dim: int = DEFAULT_GUARD_DIM
    # None means the model's own n_max
    degree: Optional[int] = None
    mode: Optional[str] = None
    log_level: str = "INFO"
    output_path: Optional[Path] = None
    replay_path: Optional[Path] = None
    max_fit_degree: int = 3
    pade: bool = False
    # termination certificates are re-derived by the direct method up to this size
    spot_check_dim: int = 729
    # where guard_dim came from: "flag", "file", "env" or "default"
    guard_source: str = "default"

    # Report modes accepted by the hilbert and koszul commands
    MODES = ("single", "full", "both")

    @classmethod
    def from_env(cls, **overrides) -> "Config":
        """Build a configuration, taking the guard from the environment if set."""
        config = cls(**overrides)
        if "guard_dim" in overrides:
            config.guard_source = "flag"
        else:
            raw = os.environ.get(GUARD_ENV_VAR)
            if raw:
                try:
                    config.guard_dim = int(raw)
                    config.guard_source = "env"
                except ValueError:
                    logger.warning(f"Ignoring non-integer {GUARD_ENV_VAR}={raw!r}")
        return config

    def adopt_file_guard(self, limit: Optional[int]) -> None:
        """A model file guard overrides the environment but never an explicit flag."""
        if limit is None or self.guard_source == "flag":
            return
        self.guard_dim = limit
        self.guard_source = "file"
        logger.debug(f"Using guard {limit} from the model file")

    def check_dimension(self, dim: int, what: str = "ambient space") -> None:
        """Abort before allocating a space larger than the guard."""
        if dim > self.guard_dim:
            raise DimensionGuardError(dim, self.guard_dim, what)

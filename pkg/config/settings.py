"""
Configuration settings for the knot census.
"""

import os
from typing import List
from pydantic_settings import BaseSettings
from dotenv import load_dotenv
load_dotenv()

class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Worker parallelism (0 = one worker per CPU)
    knot_threads: int = int(os.getenv("KNOT_THREADS", "0"))

    # Equivalence search budgets
    extra_crossings: int = int(os.getenv("KNOT_EXTRA_CROSSINGS", "2"))
    budget_nodes: int = int(os.getenv("KNOT_BUDGET_NODES", "100000"))

    # Coloring invariants
    fingerprint_moduli: List[int] = [3, 5, 7, 11, 13]
    bruteforce_limit: int = 10**7

    # Crossing numbers above this need the experimental flag
    max_default_crossings: int = 8
    allow_experimental: bool = os.getenv("KNOT_ALLOW_EXPERIMENTAL", "").lower() in ("1", "true", "yes")

    # Application Configuration
    log_level: str = os.getenv("KNOT_LOG_LEVEL", "INFO")

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"

    def worker_count(self) -> int:
        """Resolved number of worker processes."""
        return self.knot_threads if self.knot_threads > 0 else (os.cpu_count() or 1)


# Global settings instance
settings = Settings()

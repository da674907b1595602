"""Configuration management with environment variable precedence."""

import os
from enum import Enum
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field


class LogLevel(str, Enum):
    """Logging levels."""
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: LogLevel = LogLevel.INFO
    structured: bool = True
    run_id: bool = True


class SwarmConfig(BaseModel):
    """Defaults for generated swarms.

    Node budgets model a Raspberry Pi 3B+ class device. The compute rate is the
    measured multiplication rate of that board; the two budgets are tunable
    defaults, not measurements.
    """
    mult_per_sec: float = Field(default=560e6, gt=0)
    mem_budget: int = Field(default=250_000_000, gt=0)
    compute_budget: int = Field(default=1_000_000_000, gt=0)
    area_size: float = Field(default=1000.0, gt=0)
    # Clamped inverse-distance link model, bytes/second and meters
    rate_ref: float = Field(default=1.25e6, gt=0)
    distance_ref: float = Field(default=100.0, gt=0)
    rate_min: float = Field(default=1.25e5, gt=0)
    rate_max: float = Field(default=1.25e7, gt=0)


class SolverConfig(BaseModel):
    """Solver and heuristic defaults."""
    time_limit: float = Field(default=60.0, gt=0)
    alpha: float = Field(default=0.7, ge=0, le=1)
    beta: float = Field(default=0.3, ge=0, le=1)
    depth_cap: int = Field(default=512, ge=1)
    oracle_limit: int = Field(default=10_000_000, ge=1)


class RunDefaults(BaseModel):
    """Run-level defaults."""
    seed: int = 0
    seed_from_env: bool = False


class Config(BaseModel):
    """Main configuration class."""
    swarm: SwarmConfig = Field(default_factory=SwarmConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    run: RunDefaults = Field(default_factory=RunDefaults)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def load(cls, env_file: Optional[str] = None) -> "Config":
        """Load configuration with precedence: env vars > .env file > defaults."""
        env_path = Path(env_file) if env_file else Path(".env")
        if env_path.exists():
            load_dotenv(env_path)

        swarm_config = SwarmConfig(
            mult_per_sec=float(os.getenv("SWARM_INFER_MULT_PER_SEC", "560e6")),
            mem_budget=int(float(os.getenv("SWARM_INFER_MEM_BUDGET", "2.5e8"))),
            compute_budget=int(float(os.getenv("SWARM_INFER_COMPUTE_BUDGET", "1e9"))),
            area_size=float(os.getenv("SWARM_INFER_AREA_SIZE", "1000")),
        )

        solver_config = SolverConfig(
            time_limit=float(os.getenv("SWARM_INFER_TIME_LIMIT", "60")),
            alpha=float(os.getenv("SWARM_INFER_ALPHA", "0.7")),
            beta=float(os.getenv("SWARM_INFER_BETA", "0.3")),
            depth_cap=int(os.getenv("SWARM_INFER_DEPTH_CAP", "512")),
        )

        env_seed = os.getenv("SWARM_INFER_SEED")
        run_defaults = RunDefaults(
            seed=int(env_seed) if env_seed else 0,
            seed_from_env=bool(env_seed),
        )

        logging_config = LoggingConfig(
            level=LogLevel(os.getenv("LOG_LEVEL", "info")),
            structured=os.getenv("LOG_STRUCTURED", "true").lower() == "true",
            run_id=os.getenv("LOG_RUN_ID", "true").lower() == "true",
        )

        return cls(
            swarm=swarm_config,
            solver=solver_config,
            run=run_defaults,
            logging=logging_config,
        )


# Global configuration instance
config = Config.load()

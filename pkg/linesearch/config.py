"""Configuration settings for linesearch."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    # Application
    app_name: str = "linesearch"
    app_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "INFO"
    log_json: bool = True

    # Parallelism (LINESEARCH_JOBS is the fallback for --jobs)
    jobs: int = 1

    # Oracle
    expectation_tol: float = 1e-10
    max_rounds: int = 5000
    sup_epsilon: float = 1e-9
    samples_per_round: int = 8

    # Tuner budget
    coarse_grid: int = 128
    refine_iterations: int = 200
    refine_ftol: float = 1e-10
    a_max: float = 6.0
    a_min_offset: float = 1e-6
    tie_tolerance: float = 1e-9

    # Monte Carlo
    mc_block_size: int = 4096

    model_config = SettingsConfigDict(env_prefix="LINESEARCH_", env_file=".env", case_sensitive=False, extra="ignore")


settings = Settings()

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


load_dotenv()


class Settings(BaseSettings):
    """
    Class for storing application settings obtained from envvars (prefix TAILFIT_)

    Args:
        BaseSettings (BaseSettings): Parent class
    """
    # adaptive procedure defaults
    rho: float = 0.25
    delta: float = 0.05
    k0_frac: float = 0.05
    grid_length: int = 200
    critical_value: float = 10.0

    # Monte Carlo
    calibration_level: float = 0.99
    n_rep: int = 2000
    seed: int = 20240318
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1)

    # numerics
    quad_epsabs: float = 1e-9
    quad_epsrel: float = 1e-8
    quad_limit: int = 200
    inversion_rtol: float = 1e-12
    inversion_maxiter: int = 200
    chi2_max_doublings: int = 60

    output_dir: Path = Path("results")
    goldens_dir: Path = Path("goldens")
    log_level: str = "INFO"

    # Pydantic 2.X format
    model_config = SettingsConfigDict(env_file=".env", env_prefix="TAILFIT_", extra='ignore')


settings = Settings()

# backend/config.py
from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv
import os

load_dotenv()


class Settings(BaseSettings):
    # Database (experiment reports)
    DATABASE_URL: str = os.getenv("DATABASE_URL", "sqlite:///./experiments.db")
    DB_ECHO: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"

    # Guards for the exhaustive solvers exposed over the CLI and the API
    BRUTE_FORCE_MAX_VERTICES: int = 64
    CANONICAL_MAX_VERTICES: int = 30
    WITNESS_SEARCH_MAX_VERTICES: int = 400

    # Entropy comparisons in the greedy heuristic
    ICH_EPSILON: float = 1e-12

    # Rate limits
    SOLVE_RATE_LIMIT: str = "5/minute"

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


@lru_cache
def get_settings() -> Settings:
    return Settings()

"""
Configuration settings for pelflow.
"""
import os

from dotenv import load_dotenv

load_dotenv()


class Settings:
    """Application settings."""

    # Logging
    LOG_LEVEL: str = os.getenv("PELFLOW_LOG_LEVEL", "INFO").upper()

    # Execution
    WORKERS: int = int(os.getenv("PELFLOW_WORKERS", "1"))
    SEED: int = int(os.getenv("PELFLOW_SEED", "1234"))

    # Estimator defaults
    DFD_THRESHOLD: float = float(os.getenv("PELFLOW_DFD_THRESHOLD", "3.0"))
    MOVE_THRESHOLD: float = float(os.getenv("PELFLOW_MOVE_THRESHOLD", "0.0"))
    EPSILON: float = float(os.getenv("PELFLOW_EPSILON", "0.01"))
    MAX_ITERATIONS: int = int(os.getenv("PELFLOW_MAX_ITERATIONS", "10"))
    WIENER_MU: float = float(os.getenv("PELFLOW_WIENER_MU", "50.0"))
    MAX_DISPLACEMENT: float = float(os.getenv("PELFLOW_MAX_DISPLACEMENT", "15.0"))

    # Reporting
    ERROR_MAP_GAIN: float = float(os.getenv("PELFLOW_ERROR_MAP_GAIN", "4.0"))
    SIDECAR_NAME: str = os.getenv("PELFLOW_SIDECAR_NAME", "run.cfg")
    RUN_LOG_NAME: str = os.getenv("PELFLOW_RUN_LOG_NAME", "run.log")


settings = Settings()

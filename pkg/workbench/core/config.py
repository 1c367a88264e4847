from pathlib import Path
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Application settings
    APP_NAME: str = "Schematic Finite Spaces Workbench"
    VERSION: str = "0.3.0"
    DEBUG: bool = False
    HOST: str = "127.0.0.1"
    PORT: int = 8000

    # Computation settings
    THREADS: int = 1
    VERIFY_CERTIFICATES: bool = True
    CROSS_CHECK_CHAINS: bool = False
    CENTRE_STEP_FACTOR: int = 1

    # Bundled example documents
    DATA_DIR: Optional[Path] = None

    # Logging settings
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "console"

    @field_validator("THREADS", "CENTRE_STEP_FACTOR")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v):
        v = v.lower()
        if v not in ("console", "json"):
            raise ValueError("LOG_FORMAT must be 'console' or 'json'")
        return v

    @property
    def data_dir(self) -> Path:
        if self.DATA_DIR is not None:
            return self.DATA_DIR
        return Path(__file__).resolve().parent.parent / "data"

    class Config:
        env_file = ".env"
        env_prefix = "WORKBENCH_"
        case_sensitive = True
        extra = "ignore"


settings = Settings()

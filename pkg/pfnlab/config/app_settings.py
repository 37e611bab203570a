"""
Process-level settings for pfnlab.
Values come from PFNLAB_* environment variables or .env files.
"""
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    """
    Settings that control logging, output locations and run-wide overrides.
    Experiment hyperparameters live in the experiment config file instead.
    """

    # Environment
    environment: str = "development"

    # Logging
    log_level: str = "INFO"
    log_format: str = "development"
    service_name: str = "pfnlab"

    # Runs
    seed: Optional[int] = None
    runs_root: str = "runs"
    torch_num_threads: Optional[int] = None

    model_config = SettingsConfigDict(
        env_prefix="PFNLAB_",
        env_file=[".env.local", ".env"],
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    @property
    def is_development(self) -> bool:
        return self.environment.lower() in ("development", "dev", "local")

    @property
    def is_production(self) -> bool:
        return self.environment.lower() in ("production", "prod")

    @property
    def use_json_logs(self) -> bool:
        return self.is_production or self.log_format.lower() == "json"


# Global app settings instance
app_settings = AppSettings()

"""
Defines a settings class to manage environment variables.

Environment variables are read with the CODIMFLOW_ prefix, either from the
process environment or from a .env file located in the root of the project.
Every field has a default, so the lab runs without a .env file.

"""

from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict



class EnvSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="CODIMFLOW_", extra="ignore")

    app_name: str = "codimflow"
    app_version: str = "1.0.0"

    out: Path = Path("runs")
    threads: int = 1

    log_level: str = "INFO"



def load_env() -> EnvSettings:
    """Read the settings again, picking up changes of the environment."""

    return EnvSettings(_env_file=".env")


env = load_env()

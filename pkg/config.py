from pydantic_settings import BaseSettings
from functools import lru_cache

class Settings(BaseSettings):
    # Aritmética
    FACTOR_TRIAL_BOUND: int = 1_000_000

    # Búsqueda de semillas
    SEED_SEARCH_BUDGET: int = 5000
    SEED_COEFF_BOUND: int = 30

    # Pipeline
    PIPELINE_MAX_LEVELS: int = 8

    # Configuración de la aplicación
    DEFAULT_OUTPUT_FORMAT: str = "text"
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True

@lru_cache()
def get_settings() -> Settings:
    """Obtiene la configuración de la aplicación."""
    return Settings()

settings = get_settings()

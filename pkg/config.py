from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Configuración numérica de la librería
    """

    model_config = SettingsConfigDict(
        env_prefix="SPR_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Tolerancias de álgebra lineal (relativas al mayor valor singular)
    LINALG_TOL: float = 1e-9
    ORTHONORMAL_TOL: float = 1e-10

    # Cotas de enumeración exhaustiva
    COMPLEMENT_PROPERTY_MAX_VECTORS: int = 24
    FULL_SPARK_MAX_SUBSETS: int = 2_000_000
    SPARK_SPOT_CHECKS: int = 2000
    SPARK_CHUNK_SIZE: int = 4096

    # Presupuestos de construcción
    CONSTRUCTION_RETRIES: int = 16
    HYPERPLANE_RESAMPLES: int = 64
    NON_ORTHOGONALITY_TOL: float = 1e-6
    HYPERPLANE_WEIGHT_MARGIN: float = 1e-6

    # Reconstrucción
    RECOVERY_TOL: float = 1e-9
    AMBIGUITY_SEPARATION: float = 1e-6
    ZERO_MODULUS_TOL: float = 1e-12
    MAX_SIGN_BITS: int = 24

    # Búsqueda de testigos
    WITNESS_RESIDUAL_TOL: float = 1e-10
    WITNESS_RANK_GAP: float = 1e6
    WITNESS_RESTARTS: int = 8
    PAIR_SEARCH_RESTARTS: int = 20
    PAIR_SEARCH_OBJECTIVE_TOL: float = 1e-16
    MIN_PAIR_NORM: float = 1e-6
    STABILITY_ZERO_TOL: float = 1e-8
    BISECTION_TOL: float = 1e-14

    # Suites empíricas
    STABILITY_SAMPLES: int = 32
    RANDOM_BASIS_TRIALS: int = 20
    EMPIRICAL_PAIRS: int = 1000
    EMPIRICAL_SEPARATION: float = 1e-6

    # Semillas
    DEFAULT_SEED: int = 0
    R3_EXAMPLE_SEED: int = 20130401

    LOG_LEVEL: str = "INFO"
    DEBUG: bool = False

    @field_validator(
        "LINALG_TOL", "ORTHONORMAL_TOL", "RECOVERY_TOL", "AMBIGUITY_SEPARATION",
        "ZERO_MODULUS_TOL", "WITNESS_RESIDUAL_TOL", "PAIR_SEARCH_OBJECTIVE_TOL",
        "MIN_PAIR_NORM", "STABILITY_ZERO_TOL", "BISECTION_TOL", "NON_ORTHOGONALITY_TOL",
        "HYPERPLANE_WEIGHT_MARGIN", "EMPIRICAL_SEPARATION",
    )
    @classmethod
    def validate_positive_tolerance(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("Las tolerancias deben ser positivas")
        return v

    @field_validator(
        "COMPLEMENT_PROPERTY_MAX_VECTORS", "FULL_SPARK_MAX_SUBSETS", "SPARK_SPOT_CHECKS",
        "SPARK_CHUNK_SIZE", "CONSTRUCTION_RETRIES", "HYPERPLANE_RESAMPLES",
        "WITNESS_RESTARTS", "PAIR_SEARCH_RESTARTS", "STABILITY_SAMPLES",
        "RANDOM_BASIS_TRIALS", "EMPIRICAL_PAIRS", "MAX_SIGN_BITS",
    )
    @classmethod
    def validate_positive_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Los presupuestos y cotas deben ser al menos 1")
        return v

    @field_validator("WITNESS_RANK_GAP")
    @classmethod
    def validate_rank_gap(cls, v: float) -> float:
        if v <= 1:
            raise ValueError("El salto de rango debe ser mayor que 1")
        return v

    @field_validator("DEFAULT_SEED", "R3_EXAMPLE_SEED")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("Las semillas deben ser enteros sin signo de 64 bits")
        return v

    def log_level(self) -> str:
        """Nivel de logging efectivo"""
        return "DEBUG" if self.DEBUG else self.LOG_LEVEL.upper()


class IsolatedSettings(Settings):
    """
    Configuración que ignora variables de entorno y .env (usada por la CLI)
    """

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        return (init_settings,)


settings = Settings()


def apply_settings(source: Settings) -> Settings:
    """Copia los valores de `source` sobre la instancia compartida"""
    for name, value in source.model_dump().items():
        setattr(settings, name, value)
    return settings

"""
Configuration management for Manifold Bridge
Uses pydantic-settings for environment variable validation
"""
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    app_name: str = "Manifold Bridge"
    environment: str = "development"
    log_level: str = "INFO"

    # Kernel / graph construction
    kernel_k: int = 5
    kernel_alpha: float = 2.0
    kernel_metric: str = "euclidean"
    anchor_nu: float = 1.0
    extension_gamma: float = 1.0

    # SPUD
    unreachable_multiplier: float = 1.5
    bridge_components: bool = True

    # MASH
    mash_eta: float = 0.2
    mash_max_iterations: int = 10
    mash_max_new_per_iter: int = 10
    mash_holdout_fraction: float = 0.2
    vne_t_max: int = 100
    info_distance: str = "potential"
    info_epsilon: float = 1e-7

    # Evaluation
    ce_k: int = 5

    # Domain adaptations
    distortion_scale: float = 0.05
    importance_repeats: int = 5

    # Runs
    default_seed: int = 0
    jobs: int = 1
    output_dir: str = "results"

    class Config:
        env_file = ".env"
        case_sensitive = False


# Global settings instance
settings = Settings()

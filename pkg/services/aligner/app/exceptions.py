"""
Error hierarchy for Manifold Bridge
Every error carries a machine-readable code that ends up in error.json
"""
from typing import Optional


class AlignerError(Exception):
    """Base class for all library errors"""

    code: str = "aligner_error"

    def __init__(self, detail: str, path: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        self.path = path


class ConfigError(AlignerError):
    code = "config_error"


class DataError(AlignerError):
    code = "data_error"


class GraphError(AlignerError):
    code = "graph_error"


class GeodesicError(AlignerError):
    code = "geodesic_error"


class DiffusionError(AlignerError):
    code = "diffusion_error"


class EmbeddingError(AlignerError):
    code = "embedding_error"


class MetricsError(AlignerError):
    code = "metrics_error"


class AdaptationError(AlignerError):
    code = "adaptation_error"


class BaselineError(AlignerError):
    code = "baseline_error"

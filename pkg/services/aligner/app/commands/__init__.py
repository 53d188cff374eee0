"""
CLI verbs: one module per verb, each exposing add_parser() and run()
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

ConfigT = TypeVar("ConfigT", bound=BaseModel)


def load_config(path: Optional[str], model: Type[ConfigT], overrides: Dict[str, Any]) -> ConfigT:
    """
    Parse a JSON config document and apply top-level flag overrides

    Args:
        path: Config file (required)
        model: Pydantic model of the document
        overrides: Top-level fields set on the command line (None values ignored)

    Returns:
        Validated config
    """
    if path is None:
        raise ConfigError("--config is required")
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Could not read config {config_path}: {e}", path=str(config_path)) from e

    config = model.model_validate_json(text)
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if overrides:
        logger.debug(f"Config overrides from flags: {sorted(overrides)}")
        config = model.model_validate({**config.model_dump(), **overrides})
    return config


def prepare_output(out_dir: str) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def parse_anchor_flag(value: Optional[str]):
    """--anchors is either a fraction in (0, 1] or a path to an anchor CSV"""
    if value is None:
        return None, None
    try:
        return float(value), None
    except ValueError:
        return None, value

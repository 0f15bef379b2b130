"""Process-wide model registry, filled from the built-in catalog on first use."""

import threading
from typing import Dict, List, Union

from ..core.errors import UnknownModelError
from ..core.logger import get_logger
from .catalog import CATALOG
from .loader import loads_model
from .model import ModelSpec


logger = get_logger(__name__)

_models: Dict[str, ModelSpec] = {}
_lock = threading.Lock()
_loaded = False


def _ensure_catalog() -> None:
    global _loaded
    if _loaded:
        return
    with _lock:
        if _loaded:
            return
        for name, text in CATALOG.items():
            _models[name] = loads_model(text, source=f"catalog:{name}")
        _loaded = True
        logger.debug("catalog_loaded", models=len(_models))


def register_model(model: Union[ModelSpec, str]) -> ModelSpec:
    """Add a model (a ModelSpec or model file text); replaces one of the same name."""
    _ensure_catalog()
    spec = loads_model(model) if isinstance(model, str) else model
    with _lock:
        _models[spec.name] = spec
    logger.debug("model_registered", model=spec.name)
    return spec


def get_model(name: str) -> ModelSpec:
    _ensure_catalog()
    try:
        return _models[name]
    except KeyError:
        raise UnknownModelError(name, list_models()) from None


def list_models() -> List[str]:
    _ensure_catalog()
    return sorted(_models)


__all__ = ["get_model", "list_models", "register_model"]

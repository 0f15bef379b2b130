from .loader import dump_model, load_model, loads_model
from .model import (
    CanonicalBlock,
    ConformalBlock,
    ConformalBlock2D,
    ConformalBlock3D,
    ModelSpec,
)
from .registry import get_model, list_models, register_model


__all__ = [
    "CanonicalBlock",
    "ConformalBlock",
    "ConformalBlock2D",
    "ConformalBlock3D",
    "ModelSpec",
    "dump_model",
    "get_model",
    "list_models",
    "load_model",
    "loads_model",
    "register_model",
]

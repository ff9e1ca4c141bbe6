"""embed-export: offline deep-feature extraction into EMB1 files."""

from .emb1 import read_emb1, write_emb1
from .export import export
from .models import WeightsUnavailable, build_extractor
from .registry import ModelSpec, load_registry

__version__ = "0.1.0"

__all__ = [
    "write_emb1",
    "read_emb1",
    "export",
    "build_extractor",
    "WeightsUnavailable",
    "ModelSpec",
    "load_registry",
    "__version__",
]

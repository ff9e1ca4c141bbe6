"""Model registry: which networks exist, where their weights come from, and
how images must be preprocessed.

Adding a model is a data change: drop an entry into a registry JSON file.
Families:
  * ``torchvision``  - classification models builtin to torchvision, weights
    named by their torchvision enum (downloaded on first use, cached).
  * ``simclr``       - contrastive ResNets; weights are converted checkpoints
    fetched from the pinned URL (sha256 recorded) into the torch hub cache.
  * ``file``         - a TorchScript module on disk mapping preprocessed
    batches to (N, dim) features; used for local/custom extractors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

DEFAULT_REGISTRY = "models.json"


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    family: str
    dim: int
    preprocess: dict
    builder: str = ""
    weights: str = ""
    checkpoint: dict = field(default_factory=dict)  # url/path + sha256
    notes: str = ""

    def __post_init__(self):
        if self.family not in ("torchvision", "simclr", "file"):
            raise ValueError(f"unknown model family {self.family!r}")
        for key in ("resize", "crop", "mean", "std"):
            if key not in self.preprocess:
                raise ValueError(f"{self.model_id}: preprocess is missing {key!r}")


def _parse(doc: dict) -> dict[str, ModelSpec]:
    out = {}
    for entry in doc["models"]:
        spec = ModelSpec(**entry)
        if spec.model_id in out:
            raise ValueError(f"duplicate model_id {spec.model_id!r}")
        out[spec.model_id] = spec
    return out


def load_registry(extra_paths=()) -> dict[str, ModelSpec]:
    """Builtin registry, optionally extended/overridden by extra JSON files."""
    builtin = resources.files("embed_export").joinpath("data") / DEFAULT_REGISTRY
    table = _parse(json.loads(builtin.read_text()))
    for path in extra_paths:
        table.update(_parse(json.loads(Path(path).read_text())))
    return table

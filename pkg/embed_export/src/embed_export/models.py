"""Model construction: registry spec -> a feature extractor module.

Every extractor maps a preprocessed float batch (N, 3, H, W) to features
(N, dim): torchvision classifiers with their final layers removed, SimCLR
ResNets rebuilt at the right width with converted checkpoints, or arbitrary
TorchScript modules from disk.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

import torch
from torch import nn

from .registry import ModelSpec


class WeightsUnavailable(RuntimeError):
    """Weights could not be obtained (no network, missing file, bad hash)."""


def cache_dir() -> Path:
    root = os.environ.get("EMBED_EXPORT_CACHE") or os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "embed_export"
    )
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _strip_classifier(builder: str, model: nn.Module) -> nn.Module:
    if hasattr(model, "fc"):
        model.fc = nn.Identity()
    elif hasattr(model, "classifier"):
        model.classifier = nn.Identity()
    else:
        raise WeightsUnavailable(f"cannot find the classifier head on {builder!r}")
    return model


def _build_torchvision(spec: ModelSpec) -> tuple[nn.Module, dict]:
    import torchvision.models as tvm

    builder = getattr(tvm, spec.builder, None)
    if builder is None:
        raise WeightsUnavailable(f"torchvision has no builder {spec.builder!r}")
    enum_name, _, member = spec.weights.partition(".")
    weights = getattr(getattr(tvm, enum_name), member)
    try:
        kwargs = {"weights": weights}
        if spec.builder == "inception_v3":
            kwargs["aux_logits"] = True
        model = builder(**kwargs)
    except Exception as exc:  # urlopen errors surface as various types
        raise WeightsUnavailable(
            f"could not obtain pretrained weights for {spec.model_id}: {exc}"
        ) from exc
    model = _strip_classifier(spec.builder, model)
    provenance = {"weights": spec.weights, "weight_sha256": _torchvision_weight_hash(weights)}
    return model, provenance


def _torchvision_weight_hash(weights) -> str:
    hub = Path(torch.hub.get_dir()) / "checkpoints"
    name = Path(weights.url).name
    path = hub / name
    return sha256_file(path) if path.is_file() else ""


def _build_simclr(spec: ModelSpec) -> tuple[nn.Module, dict]:
    import torchvision.models.resnet as rn

    ck = dict(spec.checkpoint)
    path = Path(ck.get("path", ""))
    if not path.is_absolute():
        path = cache_dir() / path
    if not path.is_file():
        raise WeightsUnavailable(
            f"{spec.model_id}: converted checkpoint not found at {path}; "
            f"see the registry notes for how to obtain it"
        )
    digest = sha256_file(path)
    expected = ck.get("sha256", "")
    if expected and digest != expected:
        raise WeightsUnavailable(f"{spec.model_id}: checkpoint hash {digest} != pinned {expected}")
    width = int(ck.get("width", 1))
    layers = {"resnet50": [3, 4, 6, 3], "resnet101": [3, 4, 23, 3]}[ck["arch"]]
    model = rn.ResNet(rn.Bottleneck, layers, width_per_group=64 * width)
    model.fc = nn.Identity()
    state = torch.load(path, map_location="cpu", weights_only=True)
    if isinstance(state, dict) and "state_dict" in state:
        state = state["state_dict"]
    model.load_state_dict(state, strict=True)
    return model, {"checkpoint": str(path), "weight_sha256": digest}


def _build_file(spec: ModelSpec) -> tuple[nn.Module, dict]:
    path = Path(spec.checkpoint.get("path", ""))
    if not path.is_absolute():
        path = cache_dir() / path
    if not path.is_file():
        raise WeightsUnavailable(f"{spec.model_id}: TorchScript file not found at {path}")
    model = torch.jit.load(str(path), map_location="cpu")
    return model, {"checkpoint": str(path), "weight_sha256": sha256_file(path)}


def build_extractor(spec: ModelSpec) -> tuple[nn.Module, dict]:
    """Feature extractor in eval mode plus weight-provenance metadata."""
    build = {"torchvision": _build_torchvision, "simclr": _build_simclr, "file": _build_file}[spec.family]
    model, provenance = build(spec)
    model.eval()
    return model, provenance

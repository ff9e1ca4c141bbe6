"""Run one extractor over an image directory and write an EMB1 file.

Inference runs in eval mode under no_grad, images processed in sorted-id
order, so exports are deterministic for fixed weights: the same file twice
(under two names) yields bit-identical vectors. Undecodable images are
skipped with a warning and listed in the sidecar manifest, which also records
the preprocessing recipe verbatim and the weight hashes.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .emb1 import write_emb1
from .models import build_extractor
from .registry import ModelSpec

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def _preprocess(img: Image.Image, recipe: dict) -> torch.Tensor:
    from torchvision.transforms import functional as tf

    img = img.convert("RGB")
    out = tf.resize(img, recipe["resize"], antialias=True)
    out = tf.center_crop(out, recipe["crop"])
    tensor = tf.to_tensor(out)
    return tf.normalize(tensor, recipe["mean"], recipe["std"])


def export(spec: ModelSpec, image_dir, out_file, batch: int = 1) -> dict:
    """Embed every decodable image in the directory; returns the manifest."""
    image_dir = Path(image_dir)
    if not image_dir.is_dir():
        raise FileNotFoundError(f"image directory not found: {image_dir}")
    ids = sorted(p.name for p in image_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    model, provenance = build_extractor(spec)

    records: dict[str, np.ndarray] = {}
    skipped: list[dict] = []
    pending: list[tuple[str, torch.Tensor]] = []

    def flush():
        if not pending:
            return
        batch_tensor = torch.stack([t for _, t in pending])
        with torch.no_grad():
            feats = model(batch_tensor)
        feats = feats.reshape(feats.shape[0], -1).to(torch.float32).cpu().numpy()
        if feats.shape[1] != spec.dim:
            raise RuntimeError(
                f"{spec.model_id}: extractor produced dim {feats.shape[1]}, registry declares {spec.dim}"
            )
        for (rid, _), vec in zip(pending, feats):
            records[rid] = vec
        pending.clear()

    for rid in ids:
        try:
            with Image.open(image_dir / rid) as img:
                tensor = _preprocess(img, spec.preprocess)
        except Exception as exc:
            print(f"warning: skipping {rid}: {exc}", file=sys.stderr)
            skipped.append({"id": rid, "error": str(exc)})
            continue
        pending.append((rid, tensor))
        if len(pending) >= max(1, batch):
            flush()
    flush()

    write_emb1(out_file, spec.model_id, records)
    manifest = {
        "model": asdict(spec),
        "provenance": provenance,
        "image_dir": str(image_dir),
        "record_count": len(records),
        "skipped": skipped,
        "batch": batch,
    }
    manifest_path = Path(str(out_file) + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest

import json

import numpy as np
import pytest
import torch
from PIL import Image


def make_toy_extractor(seed: int, dim: int, path):
    """A tiny deterministic TorchScript feature extractor saved to disk."""
    torch.manual_seed(seed)
    net = torch.nn.Sequential(
        torch.nn.Conv2d(3, 8, 5, stride=4),
        torch.nn.ReLU(),
        torch.nn.AdaptiveAvgPool2d(4),
        torch.nn.Flatten(),
        torch.nn.Linear(8 * 16, dim),
    )
    net.eval()
    example = torch.zeros(1, 3, 64, 64)
    scripted = torch.jit.trace(net, example)
    torch.jit.save(scripted, str(path))
    return path


TOY_PREPROCESS = {"resize": 64, "crop": 64, "mean": [0.5, 0.5, 0.5], "std": [0.25, 0.25, 0.25]}


@pytest.fixture(scope="session")
def toy_registry(tmp_path_factory):
    """Registry JSON with three local file-backed models of distinct widths."""
    root = tmp_path_factory.mktemp("toys")
    entries = []
    for name, seed, dim in (("toy_a_32", 11, 32), ("toy_b_48", 12, 48), ("toy_c_64", 13, 64)):
        ckpt = make_toy_extractor(seed, dim, root / f"{name}.pt")
        entries.append(
            {
                "model_id": name,
                "family": "file",
                "dim": dim,
                "checkpoint": {"path": str(ckpt)},
                "preprocess": TOY_PREPROCESS,
            }
        )
    path = root / "toys.json"
    path.write_text(json.dumps({"models": entries}))
    return path


@pytest.fixture(scope="session")
def image_folder(tmp_path_factory):
    """Ten decodable images (one duplicated under two names) plus one broken file."""
    root = tmp_path_factory.mktemp("images")
    rng = np.random.default_rng(99)
    for i in range(9):
        arr = rng.integers(0, 256, (72, 96, 3), dtype=np.uint8)
        Image.fromarray(arr).save(root / f"photo{i:02d}.png")
        if i == 4:
            Image.fromarray(arr).save(root / "photo04_copy.png")
    (root / "broken.png").write_bytes(b"not an image at all")
    return root

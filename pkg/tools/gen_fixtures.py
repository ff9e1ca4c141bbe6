#!/usr/bin/env python3
"""Regenerate the checked-in EMB1 fixtures under tests/fixtures/.

The vectors are synthetic (seeded), shaped like a contrastive model's output:
one record per image of the 8-image fixture corpus plus one per identity-suite
query id, where each query vector is its source vector plus small noise. Rerun
only if the fixture corpus parameters or the EMB1 layout change.
"""

from pathlib import Path

import numpy as np

from simhaystack.embeddist import write_embeddings

MODEL_ID = "simclr_v2_resnet50_2x"
DIM = 32
CORPUS_COUNT = 8
SEED = 424242

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> None:
    rng = np.random.default_rng(SEED)
    records: dict[str, np.ndarray] = {}
    for i in range(CORPUS_COUNT):
        rid = f"img{i:05d}.png"
        base = rng.normal(size=DIM).astype(np.float32)
        records[rid] = base
        records[f"{rid}__none"] = (base + rng.normal(0, 0.01, size=DIM)).astype(np.float32)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    out = FIXTURES / f"{MODEL_ID}.emb1"
    write_embeddings(out, MODEL_ID, records)
    print(f"wrote {out} ({len(records)} records, dim {DIM})")


if __name__ == "__main__":
    main()

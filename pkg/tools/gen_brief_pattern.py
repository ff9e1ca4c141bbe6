#!/usr/bin/env python3
"""Regenerate src/simhaystack/_brief_pattern.py.

256 point pairs sampled i.i.d. from an isotropic Gaussian (sigma = patch/5),
rejection-sampled into the radius-13 disk so any rotation of a pair stays
inside the 31x31 descriptor patch, degenerate pairs re-drawn. The table is
frozen in the repo; rerun this only if the sampling policy changes.
"""

from pathlib import Path

import numpy as np

SEED = 20220413
PAIRS = 256
SIGMA = 31 / 5.0
MAX_RADIUS = 13


def draw_point(rng: np.random.Generator) -> tuple[int, int]:
    while True:
        x, y = np.round(rng.normal(0.0, SIGMA, size=2)).astype(int)
        if x * x + y * y <= MAX_RADIUS * MAX_RADIUS:
            return int(x), int(y)


def main() -> None:
    rng = np.random.default_rng(SEED)
    rows = []
    while len(rows) < PAIRS:
        x1, y1 = draw_point(rng)
        x2, y2 = draw_point(rng)
        if (x1, y1) == (x2, y2):
            continue
        rows.append((x1, y1, x2, y2))

    out = Path(__file__).resolve().parents[1] / "src" / "simhaystack" / "_brief_pattern.py"
    with out.open("w") as fh:
        fh.write('"""Fixed 256-pair sampling pattern for the rotated binary descriptor.\n\n')
        fh.write("Generated by tools/gen_brief_pattern.py (seed %d); do not edit by hand.\n" % SEED)
        fh.write('Each row is (x1, y1, x2, y2), offsets from the keypoint centre.\n"""\n\n')
        fh.write("import numpy as np\n\n")
        fh.write("PATTERN = np.array([\n")
        for row in rows:
            fh.write("    (%d, %d, %d, %d),\n" % row)
        fh.write("], dtype=np.int64)\n")
    print(f"wrote {out} ({len(rows)} pairs)")


if __name__ == "__main__":
    main()

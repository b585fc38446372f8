"""Regenerate the committed contract fixture: 3 utterances, dim 8,
hand-specified values.  Engine-side tests assert these exact numbers."""

from pathlib import Path

import numpy as np

from advbridge.storefmt import write_store_file

FIXTURE_VECTORS = [
    ("fx-0", [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("fx-1", [0.5, -0.5, 0.25, -0.25, 0.125, -0.125, 0.0625, -0.0625]),
    ("fx-2", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]),
]

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "fixtures" / "structural_fixture.adve"
    records = [(utt_id, np.array(values)) for utt_id, values in FIXTURE_VECTORS]
    size = write_store_file(records, out)
    print(f"wrote {size} bytes to {out}")

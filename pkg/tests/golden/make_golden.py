"""Regenerate the checked-in JPEG fixtures (run only on a deliberate format change)."""

from pathlib import Path

import numpy as np

from dctpurify import PixelImage, QuantTable, default_luma_table, scale_by_qf, write_pnm
from dctpurify.defense import PurifyConfig, select_table
from dctpurify.jpeg import encode

HERE = Path(__file__).parent


def fixtures():
    rng = np.random.default_rng(99)
    gray = PixelImage(np.full((1, 8, 8), 77, dtype=np.uint8))
    noise = PixelImage(rng.integers(0, 256, (1, 17, 33), dtype=np.uint8))
    yy, xx = np.mgrid[0:16, 0:24]
    rgb = np.stack([xx * 10, yy * 15, 255 - xx * 5], axis=-1) + rng.integers(-6, 7, (16, 24, 3))
    color = PixelImage.from_array(np.clip(rgb, 0, 255).astype(np.uint8))
    return {
        "gray8_uniform1": (gray, QuantTable.uniform(1)),
        "noise33x17_qf90": (noise, scale_by_qf(default_luma_table(), 90)),
        "rgb24x16_dm": (color, select_table(color, PurifyConfig())),
    }


if __name__ == "__main__":
    for name, (img, table) in fixtures().items():
        (HERE / f"{name}.pnm").write_bytes(write_pnm(img))
        (HERE / f"{name}.jpg").write_bytes(encode(img, table))
        (HERE / f"{name}.table.json").write_text(repr(table.to_zigzag()).replace(" ", "") + "\n")

"""Quantization tables, QF scaling and the perturbation-filtering step size."""

from __future__ import annotations

import math

import numpy as np

from .dct import BlockGrid, assemble, forward_dct, inverse_dct, partition, unzigzag, zigzag
from .image_io import round_half_away

__all__ = [
    "QuantTable",
    "default_luma_table",
    "scale_by_qf",
    "quantize",
    "dequantize",
    "min_filtering_step",
    "quantize_plane",
    "reconstruct_plane",
]

# ITU-T T.81 Annex K, table K.1, raster order
_ANNEX_K_LUMA = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int32,
)


class QuantTable:
    """An 8x8 table of integer quantization steps in [1, 255]."""

    __slots__ = ("steps",)

    def __init__(self, steps):
        steps = np.asarray(steps)
        if steps.shape != (8, 8):
            raise ValueError(f"quantization table must be 8x8, got {steps.shape}")
        if not np.all(np.equal(np.mod(steps, 1), 0)):
            raise ValueError("quantization steps must be integers")
        steps = steps.astype(np.int32)
        if steps.min() < 1 or steps.max() > 255:
            raise ValueError("quantization steps must lie in [1, 255]")
        steps.setflags(write=False)
        self.steps = steps

    @classmethod
    def uniform(cls, step: int) -> "QuantTable":
        return cls(np.full((8, 8), step, dtype=np.int32))

    @classmethod
    def from_zigzag(cls, values) -> "QuantTable":
        values = np.asarray(values)
        if values.shape != (64,):
            raise ValueError(f"expected 64 entries, got {values.shape}")
        return cls(unzigzag(values))

    def to_zigzag(self) -> list[int]:
        """The 64 steps in zig-zag order, as carried in a DQT segment."""
        return [int(v) for v in zigzag(self.steps)]

    def __eq__(self, other):
        if not isinstance(other, QuantTable):
            return NotImplemented
        return bool(np.array_equal(self.steps, other.steps))

    def __hash__(self):
        return hash(self.steps.tobytes())

    def __repr__(self):
        return f"QuantTable({self.to_zigzag()})"


def default_luma_table() -> QuantTable:
    return QuantTable(_ANNEX_K_LUMA)


def scale_by_qf(table: QuantTable, qf: int) -> QuantTable:
    """Scale a table by a libjpeg-style quality factor (50 leaves it unchanged)."""
    if isinstance(qf, bool) or int(qf) != qf or not 1 <= qf <= 100:
        raise ValueError(f"quality factor must be an integer in [1, 100], got {qf!r}")
    qf = int(qf)
    scale = 5000 // qf if qf < 50 else 200 - 2 * qf
    steps = (table.steps.astype(np.int64) * scale + 50) // 100
    return QuantTable(np.clip(steps, 1, 255))


def quantize(coeffs, table: QuantTable) -> np.ndarray:
    """Quantized levels ``round(C / Q)``, ties away from zero. Accepts stacked blocks."""
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / table.steps).astype(np.int32)


def dequantize(levels, table: QuantTable) -> np.ndarray:
    return np.asarray(levels, dtype=np.float64) * table.steps


def min_filtering_step(epsilon: float) -> int:
    """Smallest integer step ``Q > 16*epsilon``.

    Any block perturbed by at most ``epsilon`` per sample has DCT coefficients
    bounded by ``8*epsilon``, so under this step they all quantize to zero.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return math.floor(16 * epsilon) + 1


def quantize_plane(plane, table: QuantTable) -> BlockGrid:
    """Partition, transform and quantize one 8-bit plane; the grid holds levels."""
    grid = partition(plane)
    return grid.replace(quantize(forward_dct(grid.blocks), table))


def reconstruct_plane(levels: BlockGrid, table: QuantTable) -> np.ndarray:
    """Dequantize, inverse-transform and round a grid of levels back to uint8."""
    spatial = levels.replace(inverse_dct(dequantize(levels.blocks, table)))
    return np.clip(round_half_away(assemble(spatial)), 0, 255).astype(np.uint8)

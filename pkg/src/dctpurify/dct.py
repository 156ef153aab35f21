"""8x8 block transform stage: partitioning, level shift, DCT-II and zig-zag."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BLOCK",
    "ZIGZAG",
    "BlockGrid",
    "partition",
    "assemble",
    "forward_dct",
    "inverse_dct",
    "zigzag",
    "unzigzag",
    "basis_function",
]

BLOCK = 8

# raster index of the k-th coefficient in zig-zag order
ZIGZAG = np.array(
    [
        0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5,
        12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
    ],
    dtype=np.intp,
)
# zig-zag position of each raster index
ZIGZAG_RANK = np.argsort(ZIGZAG)

_k = np.arange(BLOCK)
# _COS[u, x] = cos((2x + 1) u pi / 16); row 0 is exactly 1.0
_COS = np.cos(np.outer(_k, 2 * _k + 1) * np.pi / 16)
_COS[0] = 1.0
_ALPHA = np.where(_k == 0, np.sqrt(0.5), 1.0)
# 1/4 alpha(u) alpha(v); the (0, 0) entry is exactly 1/8
_SCALE = 0.25 * np.outer(_ALPHA, _ALPHA)
_SCALE[0, 0] = 0.125


@dataclass
class BlockGrid:
    """Row-major grid of 8x8 blocks covering an image plane.

    ``blocks`` has shape ``(block_rows * block_cols, 8, 8)`` and holds either
    level-shifted samples or DCT coefficients.
    """

    blocks: np.ndarray
    block_cols: int
    block_rows: int
    orig_width: int
    orig_height: int

    def __post_init__(self):
        if self.blocks.shape != (self.block_rows * self.block_cols, BLOCK, BLOCK):
            raise ValueError(
                f"blocks shape {self.blocks.shape} does not match "
                f"{self.block_rows}x{self.block_cols} grid"
            )

    def __len__(self):
        return self.blocks.shape[0]

    def replace(self, blocks: np.ndarray) -> "BlockGrid":
        return BlockGrid(
            blocks, self.block_cols, self.block_rows, self.orig_width, self.orig_height
        )


def partition(plane, width: int | None = None, height: int | None = None) -> BlockGrid:
    """Split a plane into level-shifted 8x8 blocks.

    Edge blocks are padded by replicating the last row/column of the plane.
    """
    plane = np.asarray(plane)
    if width is None or height is None:
        height, width = plane.shape
    plane = plane.reshape(height, width)
    if width < 1 or height < 1:
        raise ValueError("plane dimensions must be positive")
    cols = -(-width // BLOCK)
    rows = -(-height // BLOCK)
    padded = np.pad(
        plane.astype(np.float64) - 128.0,
        ((0, rows * BLOCK - height), (0, cols * BLOCK - width)),
        mode="edge",
    )
    blocks = padded.reshape(rows, BLOCK, cols, BLOCK).swapaxes(1, 2).reshape(-1, BLOCK, BLOCK)
    return BlockGrid(np.ascontiguousarray(blocks), cols, rows, width, height)


def assemble(grid: BlockGrid) -> np.ndarray:
    """Inverse of :func:`partition`: undo the level shift and crop the padding."""
    rows, cols = grid.block_rows, grid.block_cols
    plane = grid.blocks.reshape(rows, cols, BLOCK, BLOCK).swapaxes(1, 2)
    plane = plane.reshape(rows * BLOCK, cols * BLOCK)
    return plane[: grid.orig_height, : grid.orig_width] + 128.0


def forward_dct(blocks) -> np.ndarray:
    """JPEG 2D DCT-II of one ``(8, 8)`` block or a stack ``(N, 8, 8)``.

    ``C(u,v) = 1/4 a(u) a(v) sum_x sum_y s(x,y) cos((2x+1)u pi/16) cos((2y+1)v pi/16)``
    with ``u`` the row frequency.
    """
    s = np.asarray(blocks, dtype=np.float64)
    return _SCALE * (_COS @ s @ _COS.T)


def inverse_dct(coeffs) -> np.ndarray:
    """Exact inverse of :func:`forward_dct` (up to rounding error)."""
    c = np.asarray(coeffs, dtype=np.float64)
    return _COS.T @ (_SCALE * c) @ _COS


def basis_function(u: int, v: int) -> np.ndarray:
    """Spatial block produced by a unit coefficient at frequency ``(u, v)``."""
    return _SCALE[u, v] * np.outer(_COS[u], _COS[v])


def zigzag(coeffs) -> np.ndarray:
    """Flatten ``(..., 8, 8)`` blocks into ``(..., 64)`` zig-zag vectors."""
    c = np.asarray(coeffs)
    return c.reshape(c.shape[:-2] + (64,))[..., ZIGZAG]


def unzigzag(vectors) -> np.ndarray:
    v = np.asarray(vectors)
    return v[..., ZIGZAG_RANK].reshape(v.shape[:-1] + (BLOCK, BLOCK))

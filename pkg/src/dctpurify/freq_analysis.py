"""Per-band DCT statistics and the two-band (DM) quantization table.

The ``n`` bands with the largest across-block standard deviation form the
accuracy-sensitive (AS) band and get the fine step ``s2``.  The remaining
malicious-defense (MD) bands get the coarse step ``s1``, which rounds any
coefficient of magnitude below ``s1 / 2`` to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .dct import ZIGZAG_RANK, BlockGrid, zigzag
from .quantization import QuantTable

__all__ = [
    "BandStats",
    "BandPartition",
    "DmParams",
    "analyze",
    "merge_stats",
    "rank_bands",
    "dm_table",
    "sweep_top_n",
]


@dataclass
class BandStats:
    """Population mean and standard deviation of every DCT band."""

    sigma: np.ndarray
    mean: np.ndarray
    block_count: int

    def __post_init__(self):
        if self.block_count < 1:
            raise ValueError("statistics need at least one block")
        if np.any(self.sigma < 0):
            raise ValueError("standard deviations must be nonnegative")

    def to_json(self) -> dict:
        """JSON document with both arrays in zig-zag order."""
        return {
            "block_count": int(self.block_count),
            "sigma": [float(v) for v in zigzag(self.sigma)],
            "mean": [float(v) for v in zigzag(self.mean)],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BandStats":
        sigma = np.asarray(doc["sigma"], dtype=np.float64)[ZIGZAG_RANK].reshape(8, 8)
        mean = np.asarray(doc["mean"], dtype=np.float64)[ZIGZAG_RANK].reshape(8, 8)
        return cls(sigma, mean, int(doc["block_count"]))


@dataclass(frozen=True)
class BandPartition:
    accuracy_sensitive: frozenset
    malicious_defense: frozenset

    @property
    def n(self) -> int:
        return len(self.accuracy_sensitive)


@dataclass(frozen=True)
class DmParams:
    n: int = 15
    s1: int = 40
    s2: int = 1

    def __post_init__(self):
        if not 0 <= self.n <= 64:
            raise ValueError(f"n must lie in [0, 64], got {self.n}")
        for name in ("s1", "s2"):
            value = getattr(self, name)
            if not 1 <= value <= 255:
                raise ValueError(f"{name} must lie in [1, 255], got {value}")


def _coeff_stack(grid) -> np.ndarray:
    blocks = grid.blocks if isinstance(grid, BlockGrid) else np.asarray(grid)
    return np.asarray(blocks, dtype=np.float64).reshape(-1, 8, 8)


def analyze(grid) -> BandStats:
    """Band statistics over all coefficient blocks of ``grid``.

    ``grid`` is a :class:`BlockGrid` of DCT coefficients or a plain
    ``(N, 8, 8)`` array.
    """
    blocks = _coeff_stack(grid)
    if blocks.shape[0] == 0:
        raise ValueError("empty-grid: no blocks to analyze")
    mean = blocks.mean(axis=0)
    sigma = np.sqrt(((blocks - mean) ** 2).mean(axis=0))
    return BandStats(sigma, mean, blocks.shape[0])


def merge_stats(parts: Iterable[BandStats]) -> BandStats:
    """Pool statistics from several grids as if their blocks were one grid."""
    count = 0
    mean = np.zeros((8, 8))
    m2 = np.zeros((8, 8))
    for part in parts:
        n = part.block_count
        delta = part.mean - mean
        total = count + n
        mean = mean + delta * (n / total)
        m2 = m2 + part.sigma**2 * n + delta**2 * (count * n / total)
        count = total
    if count == 0:
        raise ValueError("empty-grid: no statistics to merge")
    return BandStats(np.sqrt(np.maximum(m2 / count, 0.0)), mean, count)


def _band_order(stats: BandStats) -> np.ndarray:
    """Raster indices sorted by decreasing sigma, ties to lower zig-zag position."""
    sigma = stats.sigma.reshape(64)
    return np.lexsort((ZIGZAG_RANK, -sigma))


def rank_bands(stats: BandStats, n: int) -> BandPartition:
    if not 0 <= n <= 64:
        raise ValueError(f"n must lie in [0, 64], got {n}")
    order = _band_order(stats)
    bands = [divmod(int(k), 8) for k in order]
    return BandPartition(frozenset(bands[:n]), frozenset(bands[n:]))


def dm_table(stats: BandStats, params: DmParams = DmParams()) -> QuantTable:
    """Step ``s2`` on the ``n`` highest-deviation bands, ``s1`` everywhere else."""
    steps = np.full(64, params.s1, dtype=np.int32)
    steps[_band_order(stats)[: params.n]] = params.s2
    return QuantTable(steps.reshape(8, 8))


def sweep_top_n(
    corpus: Sequence,
    classifier: Callable,
    n_values: Iterable[int],
    s1: int = 40,
    s2: int = 1,
) -> list[tuple[int, float]]:
    """Legitimate accuracy after DM purification for each AS band size.

    ``corpus`` is a sequence of ``(PixelImage, label)`` pairs and
    ``classifier`` maps a PixelImage to a predicted label.
    """
    from .defense.pipeline import PurifyConfig, purify

    if len(corpus) == 0:
        raise ValueError("empty corpus")
    results = []
    for n in n_values:
        cfg = PurifyConfig(mode="dm", dm_params=DmParams(n, s1, s2))
        correct = sum(int(classifier(purify(img, cfg)[0]) == label) for img, label in corpus)
        results.append((n, correct / len(corpus)))
    return results

"""Compress-decompress purification of classifier inputs."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from ..dct import forward_dct, partition
from ..freq_analysis import BandStats, DmParams, analyze, dm_table, merge_stats
from ..image_io import PixelImage, rgb_to_ycbcr, ycbcr_to_rgb
from ..quantization import (
    QuantTable,
    default_luma_table,
    quantize_plane,
    reconstruct_plane,
    scale_by_qf,
)

MODES = ("dm", "uniform", "default_jpeg")
SCOPES = ("per_image", "corpus")


@dataclass(frozen=True)
class PurifyConfig:
    """Which quantization table to purify with.

    ``mode="dm"`` derives a two-band table from band statistics,
    ``"uniform"`` uses ``uniform_step`` everywhere and ``"default_jpeg"``
    scales the standard luminance table by ``qf``.
    """

    mode: str = "dm"
    dm_params: DmParams = field(default_factory=DmParams)
    uniform_step: int = 40
    qf: int = 90
    analysis_scope: str = "per_image"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.analysis_scope not in SCOPES:
            raise ValueError(f"analysis_scope must be one of {SCOPES}")
        if self.mode == "uniform" and not 1 <= self.uniform_step <= 255:
            raise ValueError(f"uniform_step must lie in [1, 255], got {self.uniform_step}")
        if self.mode == "default_jpeg" and not 1 <= self.qf <= 100:
            raise ValueError(f"qf must lie in [1, 100], got {self.qf}")

    def to_json(self) -> dict:
        doc = {"mode": self.mode}
        if self.mode == "dm":
            doc["dm_params"] = asdict(self.dm_params)
            doc["analysis_scope"] = self.analysis_scope
        elif self.mode == "uniform":
            doc["uniform_step"] = self.uniform_step
        else:
            doc["qf"] = self.qf
        return doc


def _luma(img: PixelImage) -> np.ndarray:
    return rgb_to_ycbcr(img).planes[0] if img.channels == 3 else img.planes[0]


def luma_stats(img: PixelImage) -> BandStats:
    """Band statistics of the image's luminance plane."""
    return analyze(forward_dct(partition(_luma(img)).blocks))


def corpus_stats(images: Iterable[PixelImage]) -> BandStats:
    return merge_stats(luma_stats(img) for img in images)


def select_table(img: PixelImage, cfg: PurifyConfig, stats: BandStats | None = None) -> QuantTable:
    if cfg.mode == "uniform":
        return QuantTable.uniform(cfg.uniform_step)
    if cfg.mode == "default_jpeg":
        return scale_by_qf(default_luma_table(), cfg.qf)
    if stats is None:
        if cfg.analysis_scope == "corpus":
            raise ValueError("corpus-scope purification needs precomputed statistics")
        stats = luma_stats(img)
    return dm_table(stats, cfg.dm_params)


def purify(
    img: PixelImage, cfg: PurifyConfig = PurifyConfig(), stats: BandStats | None = None
) -> tuple[PixelImage, QuantTable]:
    """Quantize ``img`` in the DCT domain and rebuild it.

    Returns the purified image and the table used.  ``stats`` overrides the
    per-image analysis (pass :func:`corpus_stats` output for corpus scope).
    The result equals decoding the JPEG that :func:`dctpurify.jpeg.encode`
    writes for the same image and table.
    """
    table = select_table(img, cfg, stats)
    work = rgb_to_ycbcr(img) if img.channels == 3 else img
    planes = np.stack([reconstruct_plane(quantize_plane(p, table), table) for p in work.planes])
    out = PixelImage(planes)
    return (ycbcr_to_rgb(out) if out.channels == 3 else out), table

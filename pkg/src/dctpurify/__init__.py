"""Image purification by DCT-domain quantization with image-adaptive tables."""

from .image_io import PixelImage, read_pnm, rgb_to_ycbcr, write_pnm, ycbcr_to_rgb
from .quantization import QuantTable, default_luma_table, min_filtering_step, scale_by_qf
from .freq_analysis import BandStats, DmParams, analyze, dm_table, rank_bands

__version__ = "0.1.0"

__all__ = [
    "BandStats",
    "DmParams",
    "PixelImage",
    "QuantTable",
    "analyze",
    "default_luma_table",
    "dm_table",
    "min_filtering_step",
    "rank_bands",
    "read_pnm",
    "rgb_to_ycbcr",
    "scale_by_qf",
    "write_pnm",
    "ycbcr_to_rgb",
]

"""Baseline JFIF coding with custom quantization tables."""

from .codec import Component, JpegFrame, decode, decode_frame, encode, encode_levels, image_levels
from .entropy import BACKEND
from .errors import (
    BadMarker,
    CorruptScan,
    JpegError,
    TruncatedScan,
    UnsupportedArithmeticCoding,
    UnsupportedFeature,
    UnsupportedProgressive,
    UnsupportedSubsampling,
)

__all__ = [
    "BACKEND",
    "BadMarker",
    "Component",
    "CorruptScan",
    "JpegError",
    "JpegFrame",
    "TruncatedScan",
    "UnsupportedArithmeticCoding",
    "UnsupportedFeature",
    "UnsupportedProgressive",
    "UnsupportedSubsampling",
    "decode",
    "decode_frame",
    "encode",
    "encode_levels",
    "image_levels",
]

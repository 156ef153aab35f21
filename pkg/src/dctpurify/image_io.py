"""Binary PNM (P5/P6) ingestion and the JFIF colour transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PixelImage",
    "PnmError",
    "MalformedHeader",
    "UnsupportedMaxval",
    "TruncatedPayload",
    "read_pnm",
    "write_pnm",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
    "round_half_away",
]


def round_half_away(x):
    """Round to nearest integer, ties away from zero (numpy's rint is half-even)."""
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


@dataclass(frozen=True, eq=False)
class PixelImage:
    """Planar 8-bit image.

    ``planes`` has shape ``(channels, height, width)`` and dtype uint8.
    """

    planes: np.ndarray

    def __post_init__(self):
        planes = np.asarray(self.planes)
        if planes.ndim == 2:
            planes = planes[np.newaxis]
        if planes.ndim != 3 or planes.shape[0] not in (1, 3):
            raise ValueError(f"planes must have shape (1|3, H, W), got {planes.shape}")
        if planes.shape[1] < 1 or planes.shape[2] < 1:
            raise ValueError("image dimensions must be positive")
        if planes.dtype != np.uint8:
            if np.any(planes < 0) or np.any(planes > 255):
                raise ValueError("samples must lie in [0, 255]")
            planes = planes.astype(np.uint8)
        planes = np.ascontiguousarray(planes)
        planes.setflags(write=False)
        object.__setattr__(self, "planes", planes)

    @classmethod
    def from_array(cls, array) -> "PixelImage":
        """Build from an ``(H, W)`` or interleaved ``(H, W, 3)`` array."""
        array = np.asarray(array)
        if array.ndim == 3:
            array = np.moveaxis(array, -1, 0)
        return cls(array)

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def to_array(self) -> np.ndarray:
        """Interleaved ``(H, W)`` or ``(H, W, 3)`` view of the samples."""
        if self.channels == 1:
            return self.planes[0]
        return np.moveaxis(self.planes, 0, -1)

    def __eq__(self, other):
        if not isinstance(other, PixelImage):
            return NotImplemented
        return self.planes.shape == other.planes.shape and bool(
            np.array_equal(self.planes, other.planes)
        )

    def __repr__(self):
        return f"PixelImage({self.width}x{self.height}x{self.channels})"


class PnmError(ValueError):
    """Malformed PNM input. ``offset`` is the byte position of the problem."""

    kind = "pnm-error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{self.kind} at byte {offset}: {message}")
        self.offset = offset


class MalformedHeader(PnmError):
    kind = "malformed-header"


class UnsupportedMaxval(PnmError):
    kind = "unsupported-maxval"


class TruncatedPayload(PnmError):
    kind = "truncated-payload"


_WHITESPACE = b" \t\n\r\v\f"


def _header_tokens(data: bytes, count: int):
    """Yield ``count`` (token, start_offset) pairs; return the offset after the last."""
    pos = 0
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise MalformedHeader("unexpected end of header", pos)
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append((data[start:pos], start))
    return tokens, pos


def read_pnm(data: bytes) -> PixelImage:
    """Decode a binary PGM (P5) or PPM (P6) file with maxval 255."""
    data = bytes(data)
    if len(data) < 2:
        raise MalformedHeader("file too short for a magic number", 0)
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise MalformedHeader(f"unsupported magic {magic!r}", 0)
    if len(data) < 3 or data[2] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace after magic", 2)

    tokens, pos = _header_tokens(data[2:], 3)
    values = []
    for token, start in tokens:
        if not token.isdigit():
            raise MalformedHeader(f"expected a decimal integer, got {token!r}", start + 2)
        values.append((int(token), start + 2))
    pos += 2
    (width, w_off), (height, h_off), (maxval, m_off) = values
    if width < 1:
        raise MalformedHeader("width must be positive", w_off)
    if height < 1:
        raise MalformedHeader("height must be positive", h_off)
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} (only 255 is supported)", m_off)
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace before payload", pos)
    pos += 1

    expected = width * height * channels
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise TruncatedPayload(
            f"payload needs {expected} bytes, found {len(payload)}", pos + len(payload)
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return PixelImage(np.moveaxis(samples, -1, 0))


def write_pnm(img: PixelImage) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    return header + np.ascontiguousarray(img.to_array()).tobytes()


# JFIF full-range coefficients
_RGB_TO_YCC = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)
_YCC_TO_RGB = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136, -0.714136],
        [1.0, 1.772, 0.0],
    ]
)
_YCC_OFFSET = np.array([0.0, 128.0, 128.0])


def _require_rgb(img: PixelImage):
    if img.channels != 3:
        raise ValueError(f"wrong-channel-count: expected 3 channels, got {img.channels}")


def _to_bytes(x) -> np.ndarray:
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(img: PixelImage) -> PixelImage:
    _require_rgb(img)
    rgb = img.planes.astype(np.float64)
    ycc = np.tensordot(_RGB_TO_YCC, rgb, axes=1) + _YCC_OFFSET[:, None, None]
    return PixelImage(_to_bytes(ycc))


def ycbcr_to_rgb(img: PixelImage) -> PixelImage:
    _require_rgb(img)
    ycc = img.planes.astype(np.float64) - _YCC_OFFSET[:, None, None]
    return PixelImage(_to_bytes(np.tensordot(_YCC_TO_RGB, ycc, axes=1)))

class JpegError(ValueError):
    """Unsupported or malformed JPEG stream; ``offset`` locates the problem."""

    kind = "jpeg-error"

    def __init__(self, message: str, offset: int | None = None, marker: int | None = None):
        where = []
        if marker is not None:
            where.append(f"marker 0x{marker:02X}")
        if offset is not None:
            where.append(f"offset {offset}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{self.kind}: {message}{suffix}")
        self.offset = offset
        self.marker = marker


class BadMarker(JpegError):
    kind = "bad-marker"


class UnsupportedProgressive(JpegError):
    kind = "unsupported-progressive"


class UnsupportedSubsampling(JpegError):
    kind = "unsupported-subsampling"


class UnsupportedArithmeticCoding(JpegError):
    kind = "unsupported-arithmetic-coding"


class UnsupportedFeature(JpegError):
    """Lossless/hierarchical processes, restart intervals, 12-bit samples."""

    kind = "unsupported-feature"


class TruncatedScan(JpegError):
    kind = "truncated-scan"


class CorruptScan(JpegError):
    kind = "corrupt-scan"

"""Baseline sequential JFIF encoder/decoder (Huffman, 4:4:4 or grayscale)."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..dct import BlockGrid, unzigzag, zigzag
from ..image_io import PixelImage, rgb_to_ycbcr, ycbcr_to_rgb
from ..quantization import QuantTable, quantize_plane, reconstruct_plane
from . import entropy, tables
from .errors import (
    BadMarker,
    TruncatedScan,
    UnsupportedArithmeticCoding,
    UnsupportedFeature,
    UnsupportedProgressive,
    UnsupportedSubsampling,
)
from .huffman import HuffmanTable

__all__ = ["Component", "JpegFrame", "encode", "encode_levels", "decode", "decode_frame"]

SOI, EOI, SOS, DQT, DHT, DRI, APP0, COM = 0xD8, 0xD9, 0xDA, 0xDB, 0xC4, 0xDD, 0xE0, 0xFE
_PROGRESSIVE = {0xC2, 0xC6, 0xCA, 0xCE}
_ARITHMETIC = {0xC9, 0xCB, 0xCD}
_OTHER_SOF = {0xC3, 0xC5, 0xC7}  # lossless / hierarchical
_BASELINE = {0xC0, 0xC1}

STANDARD_HUFFMAN = {
    (0, 0): HuffmanTable(0, 0, tables.DC_LUMA_BITS, tables.DC_LUMA_VALS),
    (1, 0): HuffmanTable(1, 0, tables.AC_LUMA_BITS, tables.AC_LUMA_VALS),
    (0, 1): HuffmanTable(0, 1, tables.DC_CHROMA_BITS, tables.DC_CHROMA_VALS),
    (1, 1): HuffmanTable(1, 1, tables.AC_CHROMA_BITS, tables.AC_CHROMA_VALS),
}


@dataclass
class Component:
    id: int
    h: int = 1
    v: int = 1
    quant_id: int = 0
    dc_id: int = 0
    ac_id: int = 0


@dataclass
class JpegFrame:
    """Parsed frame. ``levels`` is ``(nblocks, ncomp, 64)`` in zig-zag order."""

    width: int
    height: int
    components: list
    quant_tables: dict = field(default_factory=dict)
    huffman_tables: dict = field(default_factory=dict)
    scan_data: bytes = b""
    levels: np.ndarray | None = None

    @property
    def block_cols(self):
        return -(-self.width // 8)

    @property
    def block_rows(self):
        return -(-self.height // 8)

    def component_levels(self, index: int) -> BlockGrid:
        blocks = unzigzag(self.levels[:, index, :])
        return BlockGrid(blocks, self.block_cols, self.block_rows, self.width, self.height)

    def to_image(self) -> PixelImage:
        planes = []
        for i, comp in enumerate(self.components):
            table = self.quant_tables[comp.quant_id]
            planes.append(reconstruct_plane(self.component_levels(i), table))
        img = PixelImage(np.stack(planes))
        return ycbcr_to_rgb(img) if img.channels == 3 else img


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


def _app0() -> bytes:
    # JFIF 1.01, aspect ratio 1:1, no thumbnail
    return _segment(APP0, b"JFIF\x00" + struct.pack(">BBBHHBB", 1, 1, 0, 1, 1, 0, 0))


def _dqt(table: QuantTable, table_id: int) -> bytes:
    return _segment(DQT, bytes([table_id]) + bytes(table.to_zigzag()))


def encode_levels(levels: np.ndarray, table: QuantTable, width: int, height: int) -> bytes:
    """Assemble a JFIF stream from quantized levels ``(nblocks, ncomp, 64)``.

    Component 0 uses the luminance Huffman tables, others the chrominance
    ones; every component is quantized with ``table``.
    """
    levels = np.asarray(levels, dtype=np.int32)
    ncomp = levels.shape[1]
    if ncomp not in (1, 3):
        raise ValueError(f"expected 1 or 3 components, got {ncomp}")
    if width < 1 or height < 1 or width > 0xFFFF or height > 0xFFFF:
        raise ValueError(f"image dimensions {width}x{height} out of range")
    if levels.shape[0] != -(-width // 8) * -(-height // 8):
        raise ValueError("level array does not match image dimensions")

    out = [struct.pack(">BB", 0xFF, SOI), _app0(), _dqt(table, 0)]
    if ncomp == 3:
        out.append(_dqt(table, 1))

    comps = [Component(1, quant_id=0, dc_id=0, ac_id=0)]
    if ncomp == 3:
        comps += [Component(i, quant_id=1, dc_id=1, ac_id=1) for i in (2, 3)]
    sof = struct.pack(">BHHB", 8, height, width, ncomp)
    for c in comps:
        sof += struct.pack(">BBB", c.id, (c.h << 4) | c.v, c.quant_id)
    out.append(_segment(0xC0, sof))

    used = sorted({(0, c.dc_id) for c in comps} | {(1, c.ac_id) for c in comps})
    out.append(_segment(DHT, b"".join(STANDARD_HUFFMAN[k].segment_payload() for k in used)))

    sos = bytes([ncomp])
    for c in comps:
        sos += bytes([c.id, (c.dc_id << 4) | c.ac_id])
    out.append(_segment(SOS, sos + bytes([0, 63, 0])))

    dc = [STANDARD_HUFFMAN[(0, c.dc_id)] for c in comps]
    ac = [STANDARD_HUFFMAN[(1, c.ac_id)] for c in comps]
    out.append(
        entropy.encode_scan(
            levels,
            np.stack([t.codes for t in dc]),
            np.stack([t.sizes for t in dc]),
            np.stack([t.codes for t in ac]),
            np.stack([t.sizes for t in ac]),
        )
    )
    out.append(struct.pack(">BB", 0xFF, EOI))
    return b"".join(out)


def image_levels(img: PixelImage, table: QuantTable) -> np.ndarray:
    """Quantized levels ``(nblocks, ncomp, 64)`` the encoder would emit for ``img``."""
    if img.channels == 3:
        img = rgb_to_ycbcr(img)
    per_comp = [zigzag(quantize_plane(p, table).blocks) for p in img.planes]
    return np.stack(per_comp, axis=1)


def encode(img: PixelImage, table: QuantTable) -> bytes:
    """Compress ``img`` with ``table`` in every DQT slot."""
    if img.width < 1 or img.height < 1:
        raise ValueError("image dimensions must be positive")
    return encode_levels(image_levels(img, table), table, img.width, img.height)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def u8(self):
        if self.pos >= len(self.data):
            raise BadMarker("unexpected end of data", offset=self.pos)
        v = self.data[self.pos]
        self.pos += 1
        return v

    def u16(self):
        return (self.u8() << 8) | self.u8()

    def segment(self, marker):
        start = self.pos
        length = self.u16()
        if length < 2 or start + length > len(self.data):
            raise BadMarker("segment length overruns data", offset=start, marker=marker)
        payload = self.data[start + 2 : start + length]
        self.pos = start + length
        return payload, start + 2


def _parse_dqt(payload, offset, quant):
    i = 0
    while i < len(payload):
        pq, tq = payload[i] >> 4, payload[i] & 15
        size = 64 * (pq + 1)
        if pq > 1 or tq > 3 or i + 1 + size > len(payload):
            raise BadMarker("malformed DQT", offset=offset + i, marker=DQT)
        raw = payload[i + 1 : i + 1 + size]
        values = list(raw) if pq == 0 else list(struct.unpack(">64H", raw))
        try:
            quant[tq] = QuantTable.from_zigzag(np.array(values))
        except ValueError as exc:
            raise UnsupportedFeature(str(exc), offset=offset + i, marker=DQT) from None
        i += 1 + size


def _parse_dht(payload, offset, huff):
    i = 0
    while i < len(payload):
        if i + 17 > len(payload):
            raise BadMarker("malformed DHT", offset=offset + i, marker=DHT)
        tc, th = payload[i] >> 4, payload[i] & 15
        bits = tuple(payload[i + 1 : i + 17])
        count = sum(bits)
        if tc > 1 or th > 3 or i + 17 + count > len(payload):
            raise BadMarker("malformed DHT", offset=offset + i, marker=DHT)
        try:
            huff[(tc, th)] = HuffmanTable(tc, th, bits, tuple(payload[i + 17 : i + 17 + count]))
        except ValueError as exc:
            raise BadMarker(str(exc), offset=offset + i, marker=DHT) from None
        i += 17 + count


def _parse_sof(marker, payload, offset):
    if len(payload) < 6:
        raise BadMarker("malformed SOF", offset=offset, marker=marker)
    precision, height, width, ncomp = struct.unpack(">BHHB", payload[:6])
    if precision != 8:
        raise UnsupportedFeature(f"{precision}-bit samples", offset=offset, marker=marker)
    if width == 0 or height == 0:
        raise UnsupportedFeature("zero or deferred image dimensions", offset=offset, marker=marker)
    if ncomp not in (1, 3) or len(payload) != 6 + 3 * ncomp:
        raise UnsupportedFeature(f"{ncomp} components", offset=offset, marker=marker)
    comps = []
    for k in range(ncomp):
        cid, hv, tq = payload[6 + 3 * k : 9 + 3 * k]
        h, v = hv >> 4, hv & 15
        if ncomp > 1 and (h, v) != (1, 1):
            raise UnsupportedSubsampling(
                f"component {cid} sampled {h}x{v}", offset=offset + 6 + 3 * k, marker=marker
            )
        comps.append(Component(cid, h, v, tq))
    return JpegFrame(width, height, comps)


def _next_marker(data: bytes, pos: int) -> int:
    """Position of the next real marker at or after ``pos``."""
    while True:
        pos = data.find(b"\xff", pos)
        if pos < 0 or pos + 1 >= len(data):
            raise TruncatedScan("no marker after entropy-coded data", offset=len(data))
        nxt = data[pos + 1]
        if nxt == 0 or nxt == 0xFF:
            pos += 1 if nxt == 0xFF else 2
            continue
        return pos


def decode_frame(data: bytes) -> JpegFrame:
    """Parse a baseline JFIF stream down to its quantized levels."""
    data = bytes(data)
    r = _Reader(data)
    if len(data) < 2 or data[0] != 0xFF or data[1] != SOI:
        raise BadMarker("missing SOI", offset=0)
    r.pos = 2
    quant, huff = {}, {}
    frame = None
    scanned = None
    while True:
        start = r.pos
        if r.u8() != 0xFF:
            raise BadMarker("expected a marker", offset=start)
        marker = r.u8()
        while marker == 0xFF:  # fill bytes
            marker = r.u8()
        if marker == EOI:
            break
        if marker == SOI or 0xD0 <= marker <= 0xD7 or marker in (0x00, 0x01):
            raise BadMarker("unexpected marker", offset=start, marker=marker)
        payload, off = r.segment(marker)
        if marker == DQT:
            _parse_dqt(payload, off, quant)
        elif marker == DHT:
            _parse_dht(payload, off, huff)
        elif marker in _PROGRESSIVE:
            raise UnsupportedProgressive("progressive JPEG", offset=start, marker=marker)
        elif marker in _ARITHMETIC:
            raise UnsupportedArithmeticCoding("arithmetic-coded JPEG", offset=start, marker=marker)
        elif marker in _OTHER_SOF or marker == 0xCF:
            raise UnsupportedFeature("lossless or hierarchical JPEG", offset=start, marker=marker)
        elif marker == 0xCC:
            raise UnsupportedArithmeticCoding("arithmetic conditioning table", offset=start, marker=marker)
        elif marker in _BASELINE:
            if frame is not None:
                raise BadMarker("second frame header", offset=start, marker=marker)
            frame = _parse_sof(marker, payload, off)
            frame.levels = np.zeros(
                (frame.block_cols * frame.block_rows, len(frame.components), 64), dtype=np.int32
            )
            scanned = set()
        elif marker == DRI:
            if len(payload) != 2:
                raise BadMarker("malformed DRI", offset=off, marker=marker)
            if struct.unpack(">H", payload)[0]:
                raise UnsupportedFeature("restart intervals", offset=start, marker=marker)
        elif marker == SOS:
            if frame is None:
                raise BadMarker("scan before frame header", offset=start, marker=marker)
            r.pos = _decode_scan(data, payload, off, r.pos, frame, quant, huff, scanned)
        elif 0xE0 <= marker <= 0xEF or marker == COM or marker == 0xDC or marker == 0xDE or marker == 0xDF:
            pass
        else:
            raise BadMarker("unknown marker", offset=start, marker=marker)
    if frame is None:
        raise BadMarker("no frame header before EOI", offset=r.pos)
    if len(scanned) != len(frame.components):
        raise TruncatedScan("not every component was coded", offset=r.pos)
    for comp in frame.components:
        if comp.quant_id not in quant:
            raise BadMarker(f"component {comp.id} references missing DQT {comp.quant_id}", offset=r.pos)
    frame.quant_tables = quant
    frame.huffman_tables = huff
    return frame


def _decode_scan(data, payload, off, pos, frame, quant, huff, scanned):
    ns = payload[0] if payload else 0
    if ns < 1 or len(payload) != 4 + 2 * ns:
        raise BadMarker("malformed SOS", offset=off, marker=SOS)
    ss, se, ahal = payload[1 + 2 * ns :]
    if (ss, se, ahal) != (0, 63, 0):
        raise UnsupportedProgressive("spectral selection in scan", offset=off, marker=SOS)
    ids = {c.id: i for i, c in enumerate(frame.components)}
    index, dc, ac = [], [], []
    for k in range(ns):
        cid, tables_ = payload[1 + 2 * k], payload[2 + 2 * k]
        if cid not in ids or ids[cid] in scanned or ids[cid] in index:
            raise BadMarker(f"scan references bad component {cid}", offset=off, marker=SOS)
        td, ta = tables_ >> 4, tables_ & 15
        if (0, td) not in huff or (1, ta) not in huff:
            raise BadMarker(f"component {cid} references missing DHT", offset=off, marker=SOS)
        index.append(ids[cid])
        dc.append(huff[(0, td)])
        ac.append(huff[(1, ta)])
    for i, k in enumerate(index):
        frame.components[k].dc_id = dc[i].table_id
        frame.components[k].ac_id = ac[i].table_id
    nblocks = frame.levels.shape[0]
    lv, end = entropy.decode_scan(
        data,
        pos,
        nblocks,
        ns,
        [(t.maxcode, t.mincode, t.valptr, t.huffval) for t in dc],
        [(t.maxcode, t.mincode, t.valptr, t.huffval) for t in ac],
    )
    frame.levels[:, index, :] = lv
    scanned.update(index)
    marker_pos = _next_marker(data, end)
    frame.scan_data += data[pos:marker_pos]
    return marker_pos


def decode(data: bytes) -> tuple[PixelImage, QuantTable]:
    """Decode to pixels; also return the luminance quantization table."""
    frame = decode_frame(data)
    return frame.to_image(), frame.quant_tables[frame.components[0].quant_id]

import io
import os
import subprocess
import sys
import json
import struct
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from dctpurify import PixelImage, QuantTable, default_luma_table, read_pnm, scale_by_qf
from dctpurify.jpeg import (
    BadMarker,
    JpegError,
    TruncatedScan,
    UnsupportedArithmeticCoding,
    UnsupportedFeature,
    UnsupportedProgressive,
    UnsupportedSubsampling,
    decode,
    decode_frame,
    encode,
    image_levels,
)
from dctpurify.jpeg import _entropy_py, entropy
from dctpurify.jpeg.codec import STANDARD_HUFFMAN

GOLDEN = Path(__file__).parent / "golden"


def segments(data):
    """(marker, payload) pairs up to SOS."""
    pos, out = 2, []
    while True:
        marker = data[pos + 1]
        length = struct.unpack(">H", data[pos + 2:pos + 4])[0]
        out.append((marker, data[pos + 4:pos + 2 + length]))
        pos += 2 + length
        if marker == 0xDA:
            return out, pos


def scan_bytes(data):
    _, start = segments(data)
    return data[start:-2]


def random_image(rng, channels=None):
    h, w = rng.integers(1, 40, 2)
    c = channels or rng.choice([1, 3])
    return PixelImage(rng.integers(0, 256, (c, h, w), dtype=np.uint8))


def test_framing():
    data = encode(PixelImage(np.zeros((1, 5, 5), dtype=np.uint8)), QuantTable.uniform(10))
    assert data[:2] == b"\xff\xd8" and data[-2:] == b"\xff\xd9"


def test_segment_order():
    img = PixelImage(np.zeros((3, 8, 8), dtype=np.uint8))
    markers = [m for m, _ in segments(encode(img, QuantTable.uniform(3)))[0]]
    assert markers == [0xE0, 0xDB, 0xDB, 0xC0, 0xC4, 0xDA]


def test_dqt_payload_is_zigzag_table():
    table = scale_by_qf(default_luma_table(), 75)
    segs, _ = segments(encode(PixelImage(np.zeros((1, 8, 8), dtype=np.uint8)), table))
    dqt = [p for m, p in segs if m == 0xDB]
    assert dqt == [bytes([0]) + bytes(table.to_zigzag())]


def test_constant_block_scan_hand_trace():
    # DC = 8 * (77 - 128) = -408: category 9 code 1111110, magnitude bits
    # 001100111 (-408 + 511); then EOB 1010 and four 1s of padding
    img = PixelImage(np.full((1, 8, 8), 77, dtype=np.uint8))
    assert scan_bytes(encode(img, QuantTable.uniform(1))) == bytes([0xFC, 0x67, 0xAF])


@pytest.mark.parametrize("channels", [1, 3])
def test_roundtrip_levels_and_table(rng, channels):
    for _ in range(10):
        img = random_image(rng, channels)
        table = QuantTable(rng.integers(1, 256, (8, 8)))
        frame = decode_frame(encode(img, table))
        assert np.array_equal(frame.levels, image_levels(img, table))
        assert all(t == table for t in frame.quant_tables.values())
        assert decode(encode(img, table))[1] == table


def test_no_unescaped_ff_in_scan(rng):
    for _ in range(20):
        scan = scan_bytes(encode(random_image(rng), QuantTable.uniform(1)))
        for i in np.flatnonzero(np.frombuffer(scan, np.uint8) == 0xFF):
            assert scan[i + 1] == 0x00


def test_zero_size_rejected():
    from dctpurify.jpeg import encode_levels

    with pytest.raises(ValueError):
        encode_levels(np.zeros((0, 1, 64)), QuantTable.uniform(1), 0, 8)


def test_large_levels_survive(rng):
    # extreme 8-bit coefficients: DC swing of 2040 (category 11), long zero runs
    levels = np.zeros((4, 1, 64), dtype=np.int32)
    levels[0, 0, 0] = -1024
    levels[1, 0, 0] = 1016
    levels[2, 0, 63] = 1023
    levels[3, 0, 17] = -1023
    from dctpurify.jpeg import encode_levels

    frame = decode_frame(encode_levels(levels, QuantTable.uniform(1), 32, 8))
    assert np.array_equal(frame.levels, levels)


@pytest.mark.parametrize("name", ["gray8_uniform1", "noise33x17_qf90", "rgb24x16_dm"])
def test_golden_files(name):
    img = read_pnm((GOLDEN / f"{name}.pnm").read_bytes())
    table = QuantTable.from_zigzag(json.loads((GOLDEN / f"{name}.table.json").read_text()))
    expected = (GOLDEN / f"{name}.jpg").read_bytes()
    assert encode(img, table) == expected
    assert decode(expected)[1] == table


def test_backends_agree(rng):
    huff = STANDARD_HUFFMAN
    dc, ac = huff[(0, 0)], huff[(1, 0)]
    tables_dc = (dc.maxcode, dc.mincode, dc.valptr, dc.huffval)
    tables_ac = (ac.maxcode, ac.mincode, ac.valptr, ac.huffval)
    for _ in range(20):
        n = int(rng.integers(1, 30))
        levels = np.where(rng.random((n, 1, 64)) < 0.3, rng.integers(-300, 301, (n, 1, 64)), 0).astype(np.int32)
        args = (levels, dc.codes[None], dc.sizes[None], ac.codes[None], ac.sizes[None])
        py = _entropy_py.encode_scan(*args)
        assert entropy.encode_scan(*args) == py
        data = py + b"\xff\xd9"
        a, pa = _entropy_py.decode_scan(data, 0, n, 1, [tables_dc], [tables_ac])
        b, pb = entropy.decode_scan(data, 0, n, 1, [tables_dc], [tables_ac])
        assert np.array_equal(a, levels) and np.array_equal(b, levels) and pa == pb


def test_mainstream_decoder_reads_our_files(rng):
    for channels in (1, 3):
        img = random_image(rng, channels)
        ours = decode(encode(img, QuantTable.uniform(4)))[0]
        theirs = np.asarray(Image.open(io.BytesIO(encode(img, QuantTable.uniform(4)))))
        # integer IDCT and color conversion in the other decoder round differently
        assert np.abs(theirs.astype(int) - ours.to_array().astype(int)).max() <= 3


def pillow_jpeg(array, **kwargs):
    buf = io.BytesIO()
    Image.fromarray(array).save(buf, "JPEG", **kwargs)
    return buf.getvalue()


def test_we_read_mainstream_baseline(rng):
    gray = rng.integers(0, 256, (19, 23), dtype=np.uint8)
    data = pillow_jpeg(gray, quality=80)
    ours = decode(data)[0].to_array()
    theirs = np.asarray(Image.open(io.BytesIO(data)))
    assert np.abs(ours.astype(int) - theirs.astype(int)).max() <= 2
    color = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    data = pillow_jpeg(color, quality=90, subsampling=0)
    ours = decode(data)[0].to_array()
    theirs = np.asarray(Image.open(io.BytesIO(data)))
    assert np.abs(ours.astype(int) - theirs.astype(int)).max() <= 3


def test_optimized_huffman_tables(rng):
    data = pillow_jpeg(rng.integers(0, 256, (16, 16), dtype=np.uint8), quality=70, optimize=True)
    theirs = np.asarray(Image.open(io.BytesIO(data)))
    assert np.abs(decode(data)[0].to_array().astype(int) - theirs.astype(int)).max() <= 2


def test_progressive_rejected(rng):
    data = pillow_jpeg(rng.integers(0, 256, (16, 16), dtype=np.uint8), progressive=True)
    with pytest.raises(UnsupportedProgressive) as exc:
        decode(data)
    assert exc.value.offset > 0 and "unsupported-progressive" in str(exc.value)


def test_subsampling_rejected(rng):
    data = pillow_jpeg(rng.integers(0, 256, (16, 16, 3), dtype=np.uint8), subsampling=2)
    with pytest.raises(UnsupportedSubsampling):
        decode(data)


def test_arithmetic_rejected():
    data = bytearray(encode(PixelImage(np.zeros((1, 8, 8), dtype=np.uint8)), QuantTable.uniform(1)))
    sof = data.index(b"\xff\xc0")
    data[sof + 1] = 0xC9
    with pytest.raises(UnsupportedArithmeticCoding):
        decode(bytes(data))


def test_restart_interval_rejected():
    data = encode(PixelImage(np.zeros((1, 8, 8), dtype=np.uint8)), QuantTable.uniform(1))
    dri = b"\xff\xdd\x00\x04\x00\x01"
    with pytest.raises(UnsupportedFeature):
        decode(data[:2] + dri + data[2:])


def test_bad_marker():
    with pytest.raises(BadMarker):
        decode(b"\x00\x01\x02")
    data = encode(PixelImage(np.zeros((1, 8, 8), dtype=np.uint8)), QuantTable.uniform(1))
    with pytest.raises(BadMarker):
        decode(data[:2] + b"\x12\x34" + data[2:])


def test_truncated_scan(rng):
    data = encode(random_image(rng, 3), QuantTable.uniform(1))
    with pytest.raises(TruncatedScan):
        decode(data[: len(data) - 40])


@settings(max_examples=60, deadline=None)
@given(st.binary(max_size=200), st.integers(0, 10**6))
def test_garbage_raises_only_jpeg_errors(junk, cut):
    base = encode(PixelImage(np.full((1, 16, 16), 90, dtype=np.uint8)), QuantTable.uniform(5))
    for data in (junk, base[: cut % len(base)] + junk):
        try:
            decode(data)
        except JpegError:
            pass


@settings(max_examples=25, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 20), st.integers(1, 20))), st.integers(1, 255))
def test_entropy_layer_lossless(array, step):
    img = PixelImage(array[None])
    table = QuantTable.uniform(step)
    assert np.array_equal(decode_frame(encode(img, table)).levels, image_levels(img, table))


def test_decode_matches_purify(rng):
    from dctpurify.defense import PurifyConfig, purify

    for _ in range(5):
        img = random_image(rng)
        out, table = purify(img, PurifyConfig())
        assert decode(encode(img, table))[0] == out


def test_pure_python_fallback_matches_golden():
    script = (
        "import pathlib, json, sys\n"
        "from dctpurify import QuantTable, read_pnm\n"
        "from dctpurify.jpeg import BACKEND, encode, decode\n"
        "g = pathlib.Path(sys.argv[1])\n"
        "assert BACKEND == 'python', BACKEND\n"
        "for jpg in sorted(g.glob('*.jpg')):\n"
        "    img = read_pnm(jpg.with_suffix('.pnm').read_bytes())\n"
        "    t = QuantTable.from_zigzag(json.loads(jpg.with_suffix('.table.json').read_text()))\n"
        "    assert encode(img, t) == jpg.read_bytes()\n"
        "    assert decode(jpg.read_bytes())[1] == t\n"
    )
    env = dict(os.environ, DCTPURIFY_PURE_PYTHON="1")
    proc = subprocess.run([sys.executable, "-c", script, str(GOLDEN)], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_compiled_backend_in_use():
    # the editable install builds the extension; the fallback is covered above
    assert entropy.BACKEND in ("cython", "python")
    if entropy.BACKEND == "python":
        pytest.skip("compiled extension not built")

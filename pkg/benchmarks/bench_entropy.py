"""Time the compiled and pure-Python entropy coders on the same scan.

    python benchmarks/bench_entropy.py [--size 512] [--repeat 3]
"""

import argparse
import time

import numpy as np

from dctpurify import PixelImage, default_luma_table, scale_by_qf
from dctpurify.jpeg import _entropy_py, image_levels
from dctpurify.jpeg.codec import STANDARD_HUFFMAN

try:
    from dctpurify.jpeg import _entropy
except ImportError:
    _entropy = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    yy, xx = np.mgrid[0:args.size, 0:args.size]
    rgb = np.stack([xx % 256, yy % 256, (xx + yy) % 256], axis=-1) + rng.normal(0, 12, (args.size, args.size, 3))
    img = PixelImage.from_array(np.clip(rgb, 0, 255).astype(np.uint8))
    levels = image_levels(img, scale_by_qf(default_luma_table(), 90))
    nblocks, ncomp, _ = levels.shape

    keys = [(0, 0), (0, 1), (0, 1)], [(1, 0), (1, 1), (1, 1)]
    dc = [STANDARD_HUFFMAN[k] for k in keys[0]]
    ac = [STANDARD_HUFFMAN[k] for k in keys[1]]
    enc_args = (
        levels,
        np.stack([t.codes for t in dc]), np.stack([t.sizes for t in dc]),
        np.stack([t.codes for t in ac]), np.stack([t.sizes for t in ac]),
    )
    dec_tables = (
        [(t.maxcode, t.mincode, t.valptr, t.huffval) for t in dc],
        [(t.maxcode, t.mincode, t.valptr, t.huffval) for t in ac],
    )

    backends = [("python", _entropy_py)] + ([("cython", _entropy)] if _entropy else [])
    print(f"{args.size}x{args.size} RGB, {nblocks * ncomp} blocks, best of {args.repeat}")
    reference = None
    timings = {}
    for name, mod in backends:
        t_enc, scan = best_of(lambda: mod.encode_scan(*enc_args), args.repeat)
        data = scan + b"\xff\xd9"
        t_dec, (decoded, _) = best_of(lambda: mod.decode_scan(data, 0, nblocks, ncomp, *dec_tables), args.repeat)
        assert np.array_equal(decoded, levels)
        if reference is None:
            reference = scan
        assert scan == reference, "backends disagree"
        timings[name] = (t_enc, t_dec)
        print(f"  {name:7s} encode {t_enc * 1e3:9.1f} ms   decode {t_dec * 1e3:9.1f} ms   ({len(scan)} scan bytes)")
    if len(timings) == 2:
        (pe, pd), (ce, cd) = timings["python"], timings["cython"]
        print(f"  speedup encode x{pe / ce:.0f}, decode x{pd / cd:.0f}")
    else:
        print("  compiled backend not built")


if __name__ == "__main__":
    main()

"""Pure-Python Huffman scan coder; mirrors the compiled ``_entropy`` module.

Levels are laid out ``(nblocks, ncomp, 64)`` in zig-zag order, i.e. one
MCU per block index with 1x1 sampling.
"""

import numpy as np

from .errors import CorruptScan, TruncatedScan


def encode_scan(levels, dc_codes, dc_sizes, ac_codes, ac_sizes):
    levels = np.asarray(levels, dtype=np.int32)
    nblocks, ncomp, _ = levels.shape
    dc_codes = dc_codes.tolist()
    dc_sizes = dc_sizes.tolist()
    ac_codes = ac_codes.tolist()
    ac_sizes = ac_sizes.tolist()
    rows = levels.tolist()

    out = bytearray()
    acc = 0  # pending bits, most significant first
    nbits = 0
    pred = [0] * ncomp

    def emit(code, size):
        nonlocal acc, nbits
        acc = (acc << size) | code
        nbits += size
        while nbits >= 8:
            nbits -= 8
            byte = (acc >> nbits) & 0xFF
            out.append(byte)
            if byte == 0xFF:
                out.append(0)
        acc &= (1 << nbits) - 1

    for mcu in rows:
        for c in range(ncomp):
            block = mcu[c]
            diff = block[0] - pred[c]
            pred[c] = block[0]
            mag = -diff if diff < 0 else diff
            s = mag.bit_length()
            if dc_sizes[c][s] == 0:
                raise ValueError(f"DC difference {diff} has no Huffman code")
            emit(dc_codes[c][s], dc_sizes[c][s])
            if s:
                emit(diff if diff > 0 else diff + (1 << s) - 1, s)
            run = 0
            codes = ac_codes[c]
            sizes = ac_sizes[c]
            for k in range(1, 64):
                v = block[k]
                if v == 0:
                    run += 1
                    continue
                while run > 15:
                    emit(codes[0xF0], sizes[0xF0])
                    run -= 16
                mag = -v if v < 0 else v
                s = mag.bit_length()
                rs = (run << 4) | s
                if s > 10 or sizes[rs] == 0:
                    raise ValueError(f"AC level {v} has no Huffman code")
                emit(codes[rs], sizes[rs])
                emit(v if v > 0 else v + (1 << s) - 1, s)
                run = 0
            if run:
                emit(codes[0], sizes[0])
    if nbits:
        emit((1 << (8 - nbits)) - 1, 8 - nbits)
    return bytes(out)


def decode_scan(data, pos, nblocks, ncomp, dc_tables, ac_tables):
    """Decode ``nblocks`` MCUs starting at ``data[pos]``.

    ``dc_tables``/``ac_tables`` are per-component tuples
    ``(maxcode, mincode, valptr, huffval)``.  Returns ``(levels, next_pos)``.
    """
    data = bytes(data)
    n = len(data)
    dc = [tuple(t.tolist() for t in tab) for tab in dc_tables]
    ac = [tuple(t.tolist() for t in tab) for tab in ac_tables]
    levels = np.zeros((nblocks, ncomp, 64), dtype=np.int32)
    out = levels.reshape(-1, 64)

    acc = 0
    nbits = 0

    def fill():
        nonlocal pos, acc, nbits
        if pos >= n:
            raise TruncatedScan("entropy-coded data ends early", offset=pos)
        byte = data[pos]
        if byte == 0xFF:
            if pos + 1 >= n:
                raise TruncatedScan("entropy-coded data ends early", offset=pos)
            if data[pos + 1] != 0:
                raise TruncatedScan("marker inside unfinished scan", offset=pos, marker=data[pos + 1])
            pos += 2
        else:
            pos += 1
        acc = (acc << 8) | byte
        nbits += 8

    def bits(count):
        nonlocal acc, nbits
        while nbits < count:
            fill()
        nbits -= count
        value = (acc >> nbits) & ((1 << count) - 1)
        acc &= (1 << nbits) - 1
        return value

    def symbol(table):
        maxcode, mincode, valptr, huffval = table
        code = bits(1)
        length = 1
        while code > maxcode[length]:
            code = (code << 1) | bits(1)
            length += 1
            if length > 16:
                raise CorruptScan("invalid Huffman code", offset=pos)
        return huffval[valptr[length] + code - mincode[length]]

    def extend(v, s):
        return v - (1 << s) + 1 if v < (1 << (s - 1)) else v

    pred = [0] * ncomp
    row = 0
    for _ in range(nblocks):
        for c in range(ncomp):
            coef = [0] * 64
            s = symbol(dc[c])
            if s > 11:
                raise CorruptScan(f"DC category {s} out of range", offset=pos)
            diff = extend(bits(s), s) if s else 0
            pred[c] += diff
            coef[0] = pred[c]
            k = 1
            table = ac[c]
            while k < 64:
                rs = symbol(table)
                r = rs >> 4
                s = rs & 15
                if s == 0:
                    if r != 15:
                        break
                    k += 16
                    continue
                k += r
                if k > 63:
                    raise CorruptScan("AC run past end of block", offset=pos)
                coef[k] = extend(bits(s), s)
                k += 1
            if k > 64:
                raise CorruptScan("AC run past end of block", offset=pos)
            out[row] = coef
            row += 1
    return levels, pos

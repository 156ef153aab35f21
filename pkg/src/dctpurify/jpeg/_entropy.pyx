# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Huffman scan coder; same contract as ``_entropy_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, uint8_t, uint32_t

from .errors import CorruptScan, TruncatedScan

cnp.import_array()


cdef struct BitWriter:
    uint8_t* buf
    Py_ssize_t pos
    uint32_t acc
    int nbits


cdef inline void _emit(BitWriter* w, uint32_t code, int size) noexcept nogil:
    cdef uint8_t byte
    w.acc = (w.acc << size) | code
    w.nbits += size
    while w.nbits >= 8:
        w.nbits -= 8
        byte = <uint8_t>((w.acc >> w.nbits) & 0xFF)
        w.buf[w.pos] = byte
        w.pos += 1
        if byte == 0xFF:
            w.buf[w.pos] = 0
            w.pos += 1
    w.acc &= (1u << w.nbits) - 1


cdef inline int _bit_length(int v) noexcept nogil:
    cdef int s = 0
    while v:
        s += 1
        v >>= 1
    return s


def encode_scan(levels, dc_codes, dc_sizes, ac_codes, ac_sizes):
    cdef int32_t[:, :, ::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    cdef int32_t[:, ::1] dcc = np.ascontiguousarray(dc_codes, dtype=np.int32)
    cdef int32_t[:, ::1] dcs = np.ascontiguousarray(dc_sizes, dtype=np.int32)
    cdef int32_t[:, ::1] acc_ = np.ascontiguousarray(ac_codes, dtype=np.int32)
    cdef int32_t[:, ::1] acs = np.ascontiguousarray(ac_sizes, dtype=np.int32)
    cdef Py_ssize_t nblocks = lv.shape[0]
    cdef Py_ssize_t ncomp = lv.shape[1]
    # worst case per block: DC 16+11 bits, 63 AC symbols of 16+10 bits, doubled for stuffing
    out = np.empty(nblocks * ncomp * 432 + 16, dtype=np.uint8)
    cdef uint8_t[::1] obuf = out
    cdef BitWriter w
    w.buf = &obuf[0]
    w.pos = 0
    w.acc = 0
    w.nbits = 0
    if ncomp > 4:
        raise ValueError("at most 4 components per scan")
    cdef int32_t pred[4]
    cdef Py_ssize_t b, c, k
    cdef int diff, mag, s, run, v, rs
    cdef int bad_kind = 0, bad_value = 0
    for c in range(4):
        pred[c] = 0
    with nogil:
        for b in range(nblocks):
            for c in range(ncomp):
                diff = lv[b, c, 0] - pred[c]
                pred[c] = lv[b, c, 0]
                mag = -diff if diff < 0 else diff
                s = _bit_length(mag)
                if s > 255 or dcs[c, s] == 0:
                    bad_kind = 1
                    bad_value = diff
                    break
                _emit(&w, dcc[c, s], dcs[c, s])
                if s:
                    _emit(&w, <uint32_t>((diff if diff > 0 else diff + (1 << s) - 1) & ((1 << s) - 1)), s)
                run = 0
                for k in range(1, 64):
                    v = lv[b, c, k]
                    if v == 0:
                        run += 1
                        continue
                    while run > 15:
                        _emit(&w, acc_[c, 0xF0], acs[c, 0xF0])
                        run -= 16
                    mag = -v if v < 0 else v
                    s = _bit_length(mag)
                    rs = (run << 4) | s
                    if s > 10 or acs[c, rs] == 0:
                        bad_kind = 2
                        bad_value = v
                        break
                    _emit(&w, acc_[c, rs], acs[c, rs])
                    _emit(&w, <uint32_t>((v if v > 0 else v + (1 << s) - 1) & ((1 << s) - 1)), s)
                    run = 0
                if bad_kind:
                    break
                if run:
                    _emit(&w, acc_[c, 0], acs[c, 0])
            if bad_kind:
                break
        if not bad_kind and w.nbits:
            _emit(&w, (1u << (8 - w.nbits)) - 1, 8 - w.nbits)
    if bad_kind == 1:
        raise ValueError(f"DC difference {bad_value} has no Huffman code")
    if bad_kind == 2:
        raise ValueError(f"AC level {bad_value} has no Huffman code")
    return out[: w.pos].tobytes()


cdef struct BitReader:
    const uint8_t* data
    Py_ssize_t n
    Py_ssize_t pos
    uint32_t acc
    int nbits
    int err  # 0 ok, 1 end of data, 2 marker hit, 3 bad code
    int marker


cdef inline int _fill(BitReader* r) noexcept nogil:
    cdef uint8_t byte
    if r.pos >= r.n:
        r.err = 1
        return -1
    byte = r.data[r.pos]
    if byte == 0xFF:
        if r.pos + 1 >= r.n:
            r.err = 1
            return -1
        if r.data[r.pos + 1] != 0:
            r.err = 2
            r.marker = r.data[r.pos + 1]
            return -1
        r.pos += 2
    else:
        r.pos += 1
    r.acc = (r.acc << 8) | byte
    r.nbits += 8
    return 0


cdef inline int _bits(BitReader* r, int count) noexcept nogil:
    cdef int value
    if count == 0:
        return 0
    while r.nbits < count:
        if _fill(r) < 0:
            return -1
    r.nbits -= count
    value = <int>((r.acc >> r.nbits) & ((1u << count) - 1))
    r.acc &= (1u << r.nbits) - 1
    return value


cdef inline int _symbol(BitReader* r, const int32_t* maxcode, const int32_t* mincode,
                        const int32_t* valptr, const int32_t* huffval) noexcept nogil:
    cdef int code = _bits(r, 1)
    cdef int length = 1
    cdef int bit
    if code < 0:
        return -1
    while code > maxcode[length]:
        bit = _bits(r, 1)
        if bit < 0:
            return -1
        code = (code << 1) | bit
        length += 1
        if length > 16:
            r.err = 3
            return -1
    return huffval[valptr[length] + code - mincode[length]]


cdef inline int _extend(int v, int s) noexcept nogil:
    if v < (1 << (s - 1)):
        return v - (1 << s) + 1
    return v


def decode_scan(data, Py_ssize_t pos, Py_ssize_t nblocks, Py_ssize_t ncomp, dc_tables, ac_tables):
    raw = bytes(data)
    if ncomp > 4:
        raise ValueError("at most 4 components per scan")
    # trailing pad keeps &buf[0] valid for empty input; r.n excludes it
    cdef const uint8_t[::1] buf = np.frombuffer(raw + b"\x00", dtype=np.uint8)
    # packed per component: maxcode(18) mincode(18) valptr(18) huffval(256)
    cdef int32_t[:, :, ::1] dct = np.ascontiguousarray(
        [np.concatenate([np.asarray(arr, dtype=np.int32) for arr in tab]) for tab in dc_tables],
        dtype=np.int32,
    ).reshape(ncomp, 1, -1)
    cdef int32_t[:, :, ::1] act = np.ascontiguousarray(
        [np.concatenate([np.asarray(arr, dtype=np.int32) for arr in tab]) for tab in ac_tables],
        dtype=np.int32,
    ).reshape(ncomp, 1, -1)
    levels = np.zeros((nblocks, ncomp, 64), dtype=np.int32)
    cdef int32_t[:, :, ::1] lv = levels
    cdef BitReader r
    r.data = &buf[0]
    r.n = len(raw)
    r.pos = pos
    r.acc = 0
    r.nbits = 0
    r.err = 0
    r.marker = -1
    cdef int32_t pred[4]
    cdef Py_ssize_t b, c
    cdef int s = 0, v, k, rs, run, diff
    cdef int corrupt = 0
    cdef const int32_t* t
    for c in range(4):
        pred[c] = 0
    with nogil:
        for b in range(nblocks):
            for c in range(ncomp):
                t = &dct[c, 0, 0]
                s = _symbol(&r, t, t + 18, t + 36, t + 54)
                if s < 0:
                    break
                if s > 11:
                    corrupt = 1
                    break
                diff = 0
                if s:
                    v = _bits(&r, s)
                    if v < 0:
                        break
                    diff = _extend(v, s)
                pred[c] += diff
                lv[b, c, 0] = pred[c]
                t = &act[c, 0, 0]
                k = 1
                while k < 64:
                    rs = _symbol(&r, t, t + 18, t + 36, t + 54)
                    if rs < 0:
                        break
                    run = rs >> 4
                    s = rs & 15
                    if s == 0:
                        if run != 15:
                            break
                        k += 16
                        continue
                    k += run
                    if k > 63:
                        corrupt = 2
                        break
                    v = _bits(&r, s)
                    if v < 0:
                        break
                    lv[b, c, k] = _extend(v, s)
                    k += 1
                if r.err or corrupt:
                    break
                if k > 64:
                    corrupt = 2
                    break
            if r.err or corrupt or s < 0:
                break
    if r.err == 1:
        raise TruncatedScan("entropy-coded data ends early", offset=r.pos)
    if r.err == 2:
        raise TruncatedScan("marker inside unfinished scan", offset=r.pos, marker=r.marker)
    if r.err == 3:
        raise CorruptScan("invalid Huffman code", offset=r.pos)
    if corrupt == 1:
        raise CorruptScan(f"DC category {s} out of range", offset=r.pos)
    if corrupt == 2:
        raise CorruptScan("AC run past end of block", offset=r.pos)
    return levels, r.pos

"""Huffman table construction (T.81 Annex C and F.2.2.3)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class HuffmanTable:
    table_class: int  # 0 = DC, 1 = AC
    table_id: int
    bits: tuple  # number of codes of each length 1..16
    values: tuple
    codes: np.ndarray = field(init=False, repr=False)
    sizes: np.ndarray = field(init=False, repr=False)
    maxcode: np.ndarray = field(init=False, repr=False)
    mincode: np.ndarray = field(init=False, repr=False)
    valptr: np.ndarray = field(init=False, repr=False)
    huffval: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.bits = tuple(int(b) for b in self.bits)
        self.values = tuple(int(v) for v in self.values)
        if len(self.bits) != 16:
            raise ValueError("Huffman table needs 16 bit-length counts")
        if sum(self.bits) != len(self.values) or len(self.values) > 256:
            raise ValueError("Huffman symbol count does not match bit-length counts")
        self._build()

    def _build(self):
        codes = np.zeros(256, dtype=np.int32)
        sizes = np.zeros(256, dtype=np.int32)
        # index by code length l = 1..16; entries 0 and 17 are sentinels
        maxcode = np.full(18, -1, dtype=np.int32)
        mincode = np.zeros(18, dtype=np.int32)
        valptr = np.zeros(18, dtype=np.int32)
        code = 0
        k = 0
        for length in range(1, 17):
            count = self.bits[length - 1]
            if count:
                valptr[length] = k
                mincode[length] = code
                for _ in range(count):
                    symbol = self.values[k]
                    codes[symbol] = code
                    sizes[symbol] = length
                    code += 1
                    k += 1
                maxcode[length] = code - 1
                if code > (1 << length):
                    raise ValueError("Huffman code lengths oversubscribed")
            code <<= 1
        maxcode[17] = 0x7FFFFFFF
        huffval = np.zeros(256, dtype=np.int32)
        huffval[: len(self.values)] = self.values
        self.codes, self.sizes = codes, sizes
        self.maxcode, self.mincode, self.valptr, self.huffval = maxcode, mincode, valptr, huffval

    def segment_payload(self) -> bytes:
        return bytes([(self.table_class << 4) | self.table_id, *self.bits, *self.values])

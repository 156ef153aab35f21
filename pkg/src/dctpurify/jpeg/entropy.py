"""Huffman scan coding backend, compiled when available.

``BACKEND`` names the implementation in use: ``"cython"`` or ``"python"``.
Both modules share one contract and are tested against each other.
Setting ``DCTPURIFY_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _entropy_py

_impl = _entropy_py
BACKEND = "python"
if not os.environ.get("DCTPURIFY_PURE_PYTHON"):
    try:
        from . import _entropy as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass

encode_scan = _impl.encode_scan
decode_scan = _impl.decode_scan

__all__ = ["BACKEND", "encode_scan", "decode_scan"]

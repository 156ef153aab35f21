from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..image_io import PixelImage


@dataclass(frozen=True)
class DistortionMetrics:
    """Difference between two images on the [0, 1] intensity scale.

    ``l0`` is the fraction of pixel locations where any channel changed.
    """

    l_inf: float
    l2: float
    l0: float

    def format(self) -> str:
        return f"linf={self.l_inf:.6g} l2={self.l2:.6g} l0={self.l0:.6g}"


def distortion(a: PixelImage, b: PixelImage) -> DistortionMetrics:
    if a.planes.shape != b.planes.shape:
        raise ValueError(
            f"dimension-mismatch: {a.planes.shape} vs {b.planes.shape}"
        )
    diff = (a.planes.astype(np.float64) - b.planes.astype(np.float64)) / 255.0
    changed = np.any(diff != 0, axis=0)
    return DistortionMetrics(
        l_inf=float(np.abs(diff).max()),
        l2=float(np.sqrt(np.sum(diff * diff))),
        l0=float(changed.mean()),
    )

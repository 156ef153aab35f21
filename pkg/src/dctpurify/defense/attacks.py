"""Gradient-sign attacks (FGSM, BIM) against a :class:`ToyClassifier`.

Perturbation budgets are in 0-255 pixel units.  Outputs are rounded to
8-bit samples, so integer budgets are applied exactly.
"""

from __future__ import annotations

import numpy as np

from ..image_io import PixelImage, round_half_away
from .toy import ToyClassifier


def _to_image(x: np.ndarray) -> PixelImage:
    return PixelImage(np.clip(round_half_away(x), 0, 255).astype(np.uint8))


def fgsm(x: PixelImage, label: int, clf: ToyClassifier, epsilon: float) -> PixelImage:
    """One step of ``epsilon * sign(grad)`` on the cross-entropy loss."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    _, grad = clf.loss_and_grad(x, label)
    return _to_image(x.planes.astype(np.float64) + epsilon * np.sign(grad))


def bim(
    x: PixelImage,
    label: int,
    clf: ToyClassifier,
    epsilon: float,
    alpha: float,
    iters: int,
) -> PixelImage:
    """Iterated FGSM with step ``alpha`` projected onto the ``epsilon`` box.

    Stops as soon as the classifier no longer predicts ``label``.
    """
    if not 0 < alpha <= epsilon:
        raise ValueError("need 0 < alpha <= epsilon")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    orig = x.planes.astype(np.float64)
    lo = np.maximum(orig - epsilon, 0.0)
    hi = np.minimum(orig + epsilon, 255.0)
    adv = orig
    for _ in range(iters):
        _, grad = clf.loss_and_grad(adv, label)
        adv = np.clip(adv + alpha * np.sign(grad), lo, hi)
        if clf.predict(adv) != label:
            break
    return _to_image(adv)

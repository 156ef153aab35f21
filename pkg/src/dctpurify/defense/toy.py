"""Multinomial-logistic toy classifier and the synthetic texture corpus.

The classifier scores ``W @ (pixels / 255) + b`` over the flattened planes,
so its input gradient is available in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..image_io import PixelImage


@dataclass
class ToyClassifier:
    weights: np.ndarray  # (classes, channels * height * width)
    biases: np.ndarray  # (classes,)
    input_dims: tuple  # (width, height, channels)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.biases = np.asarray(self.biases, dtype=np.float64)
        self.input_dims = tuple(int(v) for v in self.input_dims)
        w, h, c = self.input_dims
        if self.weights.shape != (self.biases.shape[0], w * h * c):
            raise ValueError("weight matrix does not match input dimensions")

    @property
    def num_classes(self) -> int:
        return self.biases.shape[0]

    def _features(self, x) -> np.ndarray:
        if isinstance(x, PixelImage):
            w, h, c = self.input_dims
            if (x.width, x.height, x.channels) != (w, h, c):
                raise ValueError(
                    f"dimension-mismatch: classifier expects {w}x{h}x{c}, "
                    f"got {x.width}x{x.height}x{x.channels}"
                )
            x = x.planes
        x = np.asarray(x, dtype=np.float64)
        if x.size != self.weights.shape[1]:
            raise ValueError("dimension-mismatch: input size does not match classifier")
        return x.reshape(-1) / 255.0

    def scores(self, x) -> np.ndarray:
        return self.weights @ self._features(x) + self.biases

    def predict(self, x) -> int:
        return int(np.argmax(self.scores(x)))

    __call__ = predict

    def loss_and_grad(self, x, label: int) -> tuple[float, np.ndarray]:
        """Cross-entropy loss and its gradient w.r.t. pixel values (0-255 units)."""
        if not 0 <= label < self.num_classes:
            raise ValueError(f"label {label} out of range")
        z = self.scores(x)
        z = z - z.max()
        logsum = np.log(np.exp(z).sum())
        p = np.exp(z - logsum)
        p[label] -= 1.0
        grad = (self.weights.T @ p) / 255.0
        shape = x.planes.shape if isinstance(x, PixelImage) else np.shape(x)
        return float(logsum - z[label]), grad.reshape(shape)

    def to_json(self) -> dict:
        w, h, c = self.input_dims
        return {
            "input_dims": {"width": w, "height": h, "channels": c},
            "classes": self.num_classes,
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ToyClassifier":
        dims = doc["input_dims"]
        return cls(
            np.array(doc["weights"]), np.array(doc["biases"]),
            (dims["width"], dims["height"], dims["channels"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "ToyClassifier":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def accuracy(clf: ToyClassifier, corpus) -> float:
    return sum(clf.predict(img) == label for img, label in corpus) / len(corpus)


def train(corpus, num_classes: int | None = None, shrinkage: float = 1e-4) -> ToyClassifier:
    """Fit softmax scores by shared-covariance discriminant analysis.

    With Gaussian classes sharing one covariance the class posterior is
    exactly a softmax over linear scores, so the closed-form Gaussian fit
    yields the logistic weights directly.  ``shrinkage`` is added to the
    covariance diagonal (features on the [0, 1] scale).  Deterministic.
    """
    first = corpus[0][0]
    dims = (first.width, first.height, first.channels)
    X = np.stack([img.planes.reshape(-1) for img, _ in corpus]).astype(np.float64) / 255.0
    y = np.array([label for _, label in corpus])
    k = num_classes or int(y.max()) + 1
    counts = np.bincount(y, minlength=k)
    if np.any(counts == 0):
        raise ValueError("every class needs at least one training image")
    means = np.stack([X[y == c].mean(axis=0) for c in range(k)])
    resid = X - means[y]
    cov = resid.T @ resid / len(y)
    cov[np.diag_indices_from(cov)] += shrinkage
    W = np.linalg.solve(cov, means.T).T
    b = -0.5 * np.einsum("kd,kd->k", W, means) + np.log(counts / len(y))
    return ToyClassifier(W, b, dims)


def make_corpus(
    count: int = 300,
    num_classes: int = 4,
    size: int = 32,
    seed: int = 0,
    robust_amplitude: tuple = (10.0, 30.0),
    fragile_amplitude: float = 1.0,
    noise: float = 3.0,
):
    """Class-coded frequency textures, ``count`` grayscale ``size`` x ``size`` images.

    Every class carries two cues: a strong oriented grating (random
    amplitude, high across-block variance) and a faint fixed +/-1 pattern
    spread over all frequencies.  The faint cue is nearly noise-free, so a
    fitted linear model leans on it, and a few gray levels of gradient-sign
    perturbation suffice to flip it.  Labels cycle ``0, ..., num_classes - 1``.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    design = np.random.default_rng(12345)
    robust, fragile = [], []
    for k in range(num_classes):
        angle = np.pi * k / num_classes
        period = 7.0 + 2.0 * (k % 2)
        phase = 2 * np.pi * (xx * np.cos(angle) + yy * np.sin(angle)) / period
        robust.append(np.cos(phase))
        fragile.append(design.choice([-1.0, 1.0], size=(size, size)))
    corpus = []
    for i in range(count):
        label = i % num_classes
        amp = rng.uniform(*robust_amplitude)
        base = 128.0 + rng.uniform(-20, 20)
        img = (
            base
            + amp * robust[label]
            + fragile_amplitude * fragile[label]
            + rng.normal(0.0, noise, (size, size))
        )
        pixels = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
        corpus.append((PixelImage(pixels), label))
    return corpus

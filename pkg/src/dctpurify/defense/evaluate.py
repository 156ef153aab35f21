"""Attack/defense harness and the weighted accuracy aggregate."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..image_io import PixelImage
from .attacks import bim, fgsm
from .pipeline import PurifyConfig, corpus_stats, purify
from .toy import ToyClassifier


@dataclass(frozen=True)
class AttackConfig:
    method: str = "fgsm"  # fgsm | bim
    epsilon: float = 8.0
    alpha: float = 2.0
    iters: int = 10

    def __post_init__(self):
        if self.method not in ("fgsm", "bim"):
            raise ValueError(f"unknown attack {self.method!r}")

    def craft(self, img: PixelImage, label: int, clf: ToyClassifier) -> PixelImage:
        if self.method == "fgsm":
            return fgsm(img, label, clf, self.epsilon)
        return bim(img, label, clf, self.epsilon, self.alpha, self.iters)

    def to_json(self) -> dict:
        doc = asdict(self)
        if self.method == "fgsm":
            del doc["alpha"], doc["iters"]
        return doc


@dataclass
class DefenseReport:
    acc_legal: float
    acc_malicious: float
    attack_success_before: float
    attack_success_after: float
    weighted: float | None = None
    acc_unpurified: float | None = None
    seeds: int = 0
    config: dict | None = None

    def to_json(self) -> dict:
        return {
            "acc_legal": self.acc_legal,
            "acc_malicious": self.acc_malicious,
            "attack_success_before": self.attack_success_before,
            "attack_success_after": self.attack_success_after,
            "weighted": self.weighted,
            "acc_unpurified": self.acc_unpurified,
            "seeds": self.seeds,
            "config": self.config or {},
        }


def weighted_accuracy(acc_legal: float, acc_malicious: float, p_l: float, p_m: float) -> float:
    """Overall accuracy when a fraction ``p_l`` of inputs is legal, ``p_m`` malicious."""
    if p_l < 0 or p_m < 0 or abs(p_l + p_m - 1.0) > 1e-9:
        raise ValueError("p_l and p_m must be nonnegative and sum to 1")
    return p_l * acc_legal + p_m * acc_malicious


def _check_corpus(corpus):
    if len(corpus) == 0:
        raise ValueError("empty-corpus: nothing to evaluate")


def evaluate(
    corpus,
    clf: ToyClassifier,
    attack: AttackConfig,
    cfg: PurifyConfig,
    p_l: float = 0.5,
    p_m: float = 0.5,
) -> DefenseReport:
    """Attack every correctly classified image, then purify and re-classify.

    ``acc_legal`` is measured over the whole purified corpus; the attack
    rates and ``acc_malicious`` over adversarial images crafted from the
    correctly classified seeds.
    """
    _check_corpus(corpus)
    seeds = [(img, label) for img, label in corpus if clf.predict(img) == label]
    if not seeds:
        raise ValueError("degenerate-classifier: no correctly classified seeds")
    adversarial = [(attack.craft(img, label, clf), label) for img, label in seeds]
    report = _score(corpus, adversarial, clf, cfg, p_l, p_m)
    report.acc_unpurified = len(seeds) / len(corpus)
    report.config = {"attack": attack.to_json(), "purify": cfg.to_json(), "p_l": p_l, "p_m": p_m}
    return report


def evaluate_pairs(
    clean,
    adversarial,
    labels,
    clf,
    cfg: PurifyConfig,
    p_l: float = 0.5,
    p_m: float = 0.5,
) -> DefenseReport:
    """Score externally crafted adversarial images against their clean sources.

    Only pairs whose clean image is classified correctly count as attack seeds.
    """
    if not (len(clean) == len(adversarial) == len(labels)):
        raise ValueError("clean, adversarial and label lists differ in length")
    corpus = list(zip(clean, labels))
    _check_corpus(corpus)
    kept = [(adv, y) for img, adv, y in zip(clean, adversarial, labels) if clf(img) == y]
    if not kept:
        raise ValueError("degenerate-classifier: no correctly classified seeds")
    report = _score(corpus, kept, clf, cfg, p_l, p_m)
    report.acc_unpurified = len(kept) / len(corpus)
    report.config = {"attack": {"method": "external"}, "purify": cfg.to_json(), "p_l": p_l, "p_m": p_m}
    return report


def _score(corpus, adversarial, clf, cfg, p_l, p_m) -> DefenseReport:
    stats = None
    if cfg.mode == "dm" and cfg.analysis_scope == "corpus":
        stats = corpus_stats(img for img, _ in corpus)
    legal_ok = sum(clf(purify(img, cfg, stats)[0]) == y for img, y in corpus)
    fooled_before = sum(clf(adv) != y for adv, y in adversarial)
    fooled_after = sum(clf(purify(adv, cfg, stats)[0]) != y for adv, y in adversarial)
    n_adv = len(adversarial)
    acc_legal = legal_ok / len(corpus)
    acc_malicious = 1.0 - fooled_after / n_adv
    return DefenseReport(
        acc_legal=acc_legal,
        acc_malicious=acc_malicious,
        attack_success_before=fooled_before / n_adv,
        attack_success_after=fooled_after / n_adv,
        weighted=weighted_accuracy(acc_legal, acc_malicious, p_l, p_m),
        seeds=n_adv,
    )

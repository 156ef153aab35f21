"""Purification pipeline, distortion metrics and the toy attack harness."""

from .attacks import bim, fgsm
from .evaluate import AttackConfig, DefenseReport, evaluate, evaluate_pairs, weighted_accuracy
from .metrics import DistortionMetrics, distortion
from .pipeline import PurifyConfig, corpus_stats, luma_stats, purify, select_table
from .toy import ToyClassifier, accuracy, make_corpus, train

__all__ = [
    "AttackConfig",
    "DefenseReport",
    "DistortionMetrics",
    "PurifyConfig",
    "ToyClassifier",
    "accuracy",
    "bim",
    "corpus_stats",
    "distortion",
    "evaluate",
    "evaluate_pairs",
    "fgsm",
    "luma_stats",
    "make_corpus",
    "purify",
    "select_table",
    "train",
    "weighted_accuracy",
]

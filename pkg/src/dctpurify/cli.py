"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O or format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import jpeg
from .freq_analysis import BandStats, DmParams, dm_table
from .image_io import PixelImage, PnmError, read_pnm, write_pnm
from .quantization import QuantTable, default_luma_table, scale_by_qf
from .defense import (
    AttackConfig,
    PurifyConfig,
    ToyClassifier,
    distortion,
    evaluate,
    evaluate_pairs,
    luma_stats,
    make_corpus,
    purify,
    train,
)

PNM_SUFFIXES = (".pgm", ".ppm", ".pnm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dump_json(doc, path=None):
    text = json.dumps(doc, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_image(path) -> PixelImage:
    return read_pnm(Path(path).read_bytes())


def _read_table(path) -> QuantTable:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc["table"]
    return QuantTable.from_zigzag(doc)


def _purify_config(args) -> PurifyConfig:
    mode = {"jpeg": "default_jpeg"}.get(args.mode, args.mode)
    scope = "corpus" if getattr(args, "stats", None) or getattr(args, "scope", None) == "corpus" else "per_image"
    try:
        return PurifyConfig(
            mode=mode,
            dm_params=DmParams(args.n, args.s1, args.s2),
            uniform_step=args.qs,
            qf=args.qf,
            analysis_scope=scope,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_table_flags(p, default_mode="dm"):
    p.add_argument("--mode", choices=("dm", "uniform", "jpeg"), default=default_mode)
    p.add_argument("--n", type=int, default=15, help="size of the fine-step band")
    p.add_argument("--s1", type=int, default=40, help="coarse step")
    p.add_argument("--s2", type=int, default=1, help="fine step")
    p.add_argument("--qs", type=int, default=40, help="step for --mode uniform")
    p.add_argument("--qf", type=int, default=90, help="quality factor for --mode jpeg")


def cmd_analyze(args):
    stats = luma_stats(_read_image(args.input))
    _dump_json(stats.to_json(), args.json)


def cmd_qtable(args):
    try:
        params = DmParams(args.n, args.s1, args.s2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table = dm_table(luma_stats(_read_image(args.input)), params)
    _dump_json(table.to_zigzag(), args.out)


def cmd_purify(args):
    cfg = _purify_config(args)
    img = _read_image(args.input)
    stats = BandStats.from_json(json.loads(Path(args.stats).read_text())) if args.stats else None
    out, table = purify(img, cfg, stats)
    Path(args.output).write_bytes(write_pnm(out))
    if args.emit_jpeg:
        Path(args.emit_jpeg).write_bytes(jpeg.encode(img, table))


def cmd_encode(args):
    if args.table and args.qf is not None:
        raise UsageError("encode: --qf and --table are mutually exclusive")
    if args.table:
        table = _read_table(args.table)
    else:
        qf = 90 if args.qf is None else args.qf
        if not 1 <= qf <= 100:
            raise UsageError("encode: --qf must lie in [1, 100]")
        table = scale_by_qf(default_luma_table(), qf)
    Path(args.output).write_bytes(jpeg.encode(_read_image(args.input), table))


def cmd_decode(args):
    img, _ = jpeg.decode(Path(args.input).read_bytes())
    Path(args.output).write_bytes(write_pnm(img))


def _attack_config(args) -> AttackConfig:
    if args.eps < 0:
        raise UsageError("--eps must be nonnegative")
    if args.bim:
        if not 0 < args.alpha <= args.eps or args.iters < 1:
            raise UsageError("BIM needs 0 < --alpha <= --eps and --iters >= 1")
        return AttackConfig("bim", args.eps, args.alpha, args.iters)
    return AttackConfig("fgsm", args.eps)


def cmd_attack(args):
    attack = _attack_config(args)
    clf = ToyClassifier.load(args.model)
    if not 0 <= args.label < clf.num_classes:
        raise UsageError(f"--label must lie in [0, {clf.num_classes})")
    adv = attack.craft(_read_image(args.input), args.label, clf)
    Path(args.output).write_bytes(write_pnm(adv))


def _corpus_files(directory: Path):
    files = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in PNM_SUFFIXES)
    labels_path = directory / "labels.txt"
    labels = [int(line) for line in labels_path.read_text().split()]
    if len(labels) != len(files):
        raise ValueError(f"{labels_path}: {len(labels)} labels for {len(files)} images")
    return files, labels


def cmd_evaluate(args):
    if args.pl < 0 or args.pm < 0 or abs(args.pl + args.pm - 1.0) > 1e-9:
        raise UsageError("--pl and --pm must be nonnegative and sum to 1")
    cfg = _purify_config(args)
    clf = ToyClassifier.load(args.model)
    directory = Path(args.corpus)
    files, labels = _corpus_files(directory)
    images = [_read_image(p) for p in files]
    adv_dir = directory / "adv"
    if adv_dir.is_dir():
        adversarial = [_read_image(adv_dir / p.name) for p in files]
        report = evaluate_pairs(images, adversarial, labels, clf, cfg, args.pl, args.pm)
    else:
        report = evaluate(list(zip(images, labels)), clf, _attack_config(args), cfg, args.pl, args.pm)
    _dump_json(report.to_json(), args.report)


def cmd_metrics(args):
    m = distortion(_read_image(args.a), _read_image(args.b))
    print(m.format())


def cmd_synth(args):
    if args.count < 1 or args.classes < 2:
        raise UsageError("synth: need --count >= 1 and --classes >= 2")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = make_corpus(args.count, args.classes, seed=args.seed)
    width = len(str(args.count - 1))
    for i, (img, _) in enumerate(corpus):
        (out / f"{i:0{width}d}.pgm").write_bytes(write_pnm(img))
    (out / "labels.txt").write_text("".join(f"{label}\n" for _, label in corpus))
    if args.model:
        train_set = make_corpus(args.train_count, args.classes, seed=args.seed + 1)
        train(train_set, args.classes).save(args.model)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dctpurify", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="per-band DCT statistics of an image")
    p.add_argument("input")
    p.add_argument("--json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("qtable", help="two-band quantization table for an image")
    p.add_argument("input")
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--s1", type=int, default=40)
    p.add_argument("--s2", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_qtable)

    p = sub.add_parser("purify", help="compress-decompress an image")
    p.add_argument("input")
    p.add_argument("output")
    _add_table_flags(p)
    p.add_argument("--stats", help="BandStats JSON to use instead of per-image analysis")
    p.add_argument("--emit-jpeg")
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("encode", help="write a baseline JPEG")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--qf", type=int)
    p.add_argument("--table")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a baseline JPEG to PNM")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    def attack_flags(p, required):
        p.add_argument("--eps", type=float, required=required, default=8.0)
        p.add_argument("--bim", action="store_true")
        p.add_argument("--alpha", type=float, default=2.0)
        p.add_argument("--iters", type=int, default=10)
        p.add_argument("--model", required=True)

    p = sub.add_parser("attack", help="craft an FGSM/BIM adversarial image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--label", type=int, required=True)
    attack_flags(p, required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="attack/defense report over a corpus directory")
    p.add_argument("--corpus", required=True)
    attack_flags(p, required=False)
    _add_table_flags(p)
    p.add_argument("--scope", choices=("per_image", "corpus"), default="per_image")
    p.add_argument("--pl", type=float, default=0.5)
    p.add_argument("--pm", type=float, default=0.5)
    p.add_argument("--report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("metrics", help="L-inf / L2 / L0 distance between two images")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="write the synthetic corpus and fit a toy model")
    p.add_argument("--out", required=True)
    p.add_argument("--model")
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--train-count", type=int, default=400)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (OSError, PnmError, jpeg.JpegError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"dctpurify: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: gen, train, eval, baselines, sweep.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
Artifact-producing commands drop a "<out>.manifest.json" beside each
primary output recording the command, flags, seeds, paths, and timing.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .dataset import Dataset, generate, load, restrict, save, split
from .errors import CewlabError, UnknownPreset
from .evaluate import (RocCurve, Witness, baseline_rates, roc_curve,
                       tpr_at_fpr, write_roc)
from .measure import preset_by_name
from .model import (TrainConfig, init_mlp, load_model, predict_negativity,
                    save_model, train)
from .states import SystemKind

_KIND_NAMES = [k.value for k in SystemKind]
# largest built-in preset per kind; every other preset is a subset of it,
# so sweep splits can be shared by column projection
_MASTER_PRESET = {SystemKind.TWO_QUBIT: "B10", SystemKind.QUBIT_QUTRIT: "B45"}


def _write_manifest(out_path: str, command: str, args: argparse.Namespace,
                    inputs: list[str], outputs: list[str], started: float) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {
        "command": command,
        "flags": flags,
        "seeds": {"seed": flags["seed"]} if "seed" in flags else {},
        "inputs": inputs,
        "outputs": outputs,
        "version": __version__,
        "duration_s": round(time.monotonic() - started, 3),
    }
    with open(out_path + ".manifest.json", "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_roc_svg(curve: RocCurve, path: str, title: str = "") -> None:
    """Self-contained SVG: the ROC polyline over a unit box with a chance diagonal."""
    size, margin = 360, 40
    scale = size - 2 * margin

    def sx(v: float) -> float:
        return margin + v * scale

    def sy(v: float) -> float:
        return size - margin - v * scale

    pts = " ".join(f"{sx(f):.2f},{sy(t):.2f}" for f, t in zip(curve.fpr, curve.tpr))
    label = f"{title} AUC={curve.auc:.4f}".strip()
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="{margin}" y="{margin}" width="{scale}" height="{scale}" '
        'fill="white" stroke="black" stroke-width="1"/>',
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(1):.2f}" y2="{sy(1):.2f}" '
        'stroke="gray" stroke-dasharray="4 4" stroke-width="1"/>',
        f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>',
        f'<text x="{size / 2:.0f}" y="{size - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">FPR</text>',
        f'<text x="12" y="{size / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 12 {size / 2:.0f})">TPR</text>',
        f'<text x="{sx(0.97):.2f}" y="{sy(0.03):.2f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="12">{label}</text>',
        "</svg>",
    ]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(body) + "\n")


def cmd_gen(args: argparse.Namespace) -> int:
    started = time.monotonic()
    kind = SystemKind(args.kind)
    preset = preset_by_name(kind, args.preset)
    ds = generate(kind, preset, args.n, args.seed, balanced=not args.unbalanced)
    save(ds, args.out)
    _write_manifest(args.out, "gen", args, [], [args.out, args.out + ".meta"], started)
    print(f"wrote {args.out}: {ds.count} records, {preset.b} features, "
          f"prevalence {ds.prevalence:.4f}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    started = time.monotonic()
    train_ds = load(args.train)
    val_ds = load(args.val)
    if train_ds.preset != val_ds.preset:
        print(f"error: preset mismatch: train has {train_ds.preset.name} "
              f"({train_ds.kind.value}), validation has {val_ds.preset.name} "
              f"({val_ds.kind.value})", file=sys.stderr)
        return 1
    cfg = TrainConfig(learning_rate=args.lr, batch_size=args.batch_size,
                      max_epochs=args.max_epochs, patience=args.patience,
                      seed=args.seed)
    model = init_mlp(train_ds.features.shape[1], cfg)
    print("epoch  train_mse     val_mse")

    def report(epoch: int, train_mse: float, val_mse: float) -> None:
        print(f"{epoch:5d}  {train_mse:.6e}  {val_mse:.6e}")

    result = train(model, train_ds, val_ds, cfg, on_epoch=report)
    save_model(result.model, args.out)
    _write_manifest(args.out, "train", args, [args.train, args.val], [args.out], started)
    print(f"best epoch {result.best_epoch} of {result.epochs_run}, "
          f"val_mse {result.best_val_mse:.6e}, wrote {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    started = time.monotonic()
    model = load_model(args.model)
    test_ds = load(args.test)
    scores = predict_negativity(model, test_ds.features)
    curve = roc_curve(scores, test_ds.labels)
    write_roc(curve, args.out)
    outputs = [args.out]
    if args.svg:
        write_roc_svg(curve, args.svg, title=test_ds.preset.name)
        outputs.append(args.svg)
    _write_manifest(args.out, "eval", args, [args.model, args.test], outputs, started)
    print(f"AUC={curve.auc:.6f} TPR@FPR0.10={tpr_at_fpr(curve, 0.10):.6f} "
          f"TPR@FPR0={tpr_at_fpr(curve, 0.0):.6f}")
    return 0


def cmd_baselines(args: argparse.Namespace) -> int:
    kind = SystemKind(args.kind)
    if args.witness:
        witnesses = [Witness(args.witness)]
    elif kind is SystemKind.TWO_QUBIT:
        witnesses = [Witness.NEGATIVITY, Witness.CHSH, Witness.FEF]
    else:
        witnesses = [Witness.NEGATIVITY]
    if kind is not SystemKind.TWO_QUBIT and any(w is not Witness.NEGATIVITY for w in witnesses):
        print("error: chsh and fef baselines are defined for two-qubit states only",
              file=sys.stderr)
        return 2
    preset = preset_by_name(kind, "B1")
    ds = generate(kind, preset, args.n, args.seed)
    print("witness     sensitivity  fpr")
    for witness in witnesses:
        sensitivity, fpr = baseline_rates(ds, witness)
        print(f"{witness.value:<11s} {sensitivity:11.4f}  {fpr:.4f}")
        if fpr != 0.0:
            print(f"error: the {witness.value} witness flagged separable states "
                  f"(FPR {fpr})", file=sys.stderr)
            return 1
    return 0


def run_sweep(kind: SystemKind, preset_names: list[str], sizes: tuple[int, int, int],
              seed: int, out_dir: str, cfg: TrainConfig | None = None,
              svg: bool = False, log=None) -> list[dict]:
    """Train and evaluate one model per preset on shared splits.

    One master dataset is generated at the kind's largest preset and every
    requested preset is a column projection of it, so all models see the
    same states. Returns one summary row per preset; files land in out_dir.
    """
    if not preset_names:
        raise ValueError("preset list is empty")
    presets = [preset_by_name(kind, name) for name in preset_names]
    total = sum(sizes)
    if min(sizes) < 1:
        raise ValueError("all three split sizes must be positive")
    master = preset_by_name(kind, _MASTER_PRESET[kind])
    ds = generate(kind, master, total, seed)
    fractions = (sizes[0] / total, sizes[1] / total, sizes[2] / total)
    train_ds, val_ds, test_ds = split(ds, fractions)
    os.makedirs(out_dir, exist_ok=True)
    rows: list[dict] = []
    for preset in presets:
        tr = restrict(train_ds, preset)
        va = restrict(val_ds, preset)
        te = restrict(test_ds, preset)
        preset_cfg = cfg if cfg is not None else TrainConfig(seed=seed)
        model = init_mlp(preset.b, preset_cfg)
        result = train(model, tr, va, preset_cfg)
        scores = predict_negativity(result.model, te.features)
        curve = roc_curve(scores, te.labels)
        stem = os.path.join(out_dir, f"{kind.value}-{preset.name}")
        model_path = stem + ".mlp.json"
        roc_path = stem + ".roc.csv"
        save_model(result.model, model_path)
        write_roc(curve, roc_path)
        if svg:
            write_roc_svg(curve, stem + ".svg", title=preset.name)
        rows.append({
            "preset": preset.name,
            "b": preset.b,
            "auc": curve.auc,
            "tpr_at_fpr10": tpr_at_fpr(curve, 0.10),
            "tpr_at_fpr0": tpr_at_fpr(curve, 0.0),
            "epochs": result.epochs_run,
            "model": model_path,
            "roc": roc_path,
        })
        if log is not None:
            log(f"{preset.name}: B={preset.b} auc={curve.auc:.4f} "
                f"tpr@fpr0.10={rows[-1]['tpr_at_fpr10']:.4f} epochs={result.epochs_run}")
        _write_summary(out_dir, rows)
    return rows


def _write_summary(out_dir: str, rows: list[dict]) -> None:
    path = os.path.join(out_dir, "summary.csv")
    with open(path, "w", newline="\n") as fh:
        fh.write("preset,b,auc,tpr_at_fpr10,tpr_at_fpr0,epochs\n")
        for r in rows:
            fh.write(f"{r['preset']},{r['b']},{r['auc']!r},"
                     f"{r['tpr_at_fpr10']!r},{r['tpr_at_fpr0']!r},{r['epochs']}\n")


def cmd_sweep(args: argparse.Namespace) -> int:
    started = time.monotonic()
    kind = SystemKind(args.kind)
    rows = run_sweep(kind, args.presets, tuple(args.sizes), args.seed,
                     args.out_dir, svg=args.svg, log=print)
    summary = os.path.join(args.out_dir, "summary.csv")
    outputs = [summary] + [r["model"] for r in rows] + [r["roc"] for r in rows]
    _write_manifest(summary, "sweep", args, [], outputs, started)
    print(f"wrote {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cewlab",
        description="Collective entanglement witness laboratory: sample states, "
                    "train the regressor, compare against analytic baselines.")
    parser.add_argument("--version", action="version", version=f"cewlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled feature dataset")
    p.add_argument("--kind", choices=_KIND_NAMES, required=True)
    p.add_argument("--preset", required=True, help="measurement preset name, e.g. B10")
    p.add_argument("--n", type=int, required=True, help="record count (even unless --unbalanced)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unbalanced", action="store_true",
                   help="keep the sampler's natural class prevalence")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train the negativity regressor")
    p.add_argument("--train", required=True, help="training dataset CSV")
    p.add_argument("--val", required=True, help="validation dataset CSV")
    p.add_argument("--out", required=True, help="output model path (.mlp.json)")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="write the ROC of a model on a test dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, help="test dataset CSV")
    p.add_argument("--out", required=True, help="output ROC table path")
    p.add_argument("--svg", help="also render the curve to this SVG path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baselines", help="sensitivity/FPR of the analytic witnesses")
    p.add_argument("--kind", choices=_KIND_NAMES, required=True)
    p.add_argument("--witness", choices=[w.value for w in Witness],
                   help="restrict to one witness (default: all for the kind)")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("sweep", help="train/evaluate one model per preset on shared splits")
    p.add_argument("--kind", choices=_KIND_NAMES, required=True)
    p.add_argument("--presets", nargs="+", required=True, help="preset names, e.g. B1 B3 B5")
    p.add_argument("--sizes", nargs=3, type=int, default=[40000, 10000, 10000],
                   metavar=("TRAIN", "VAL", "TEST"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", action="store_true", help="also render one SVG per curve")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UnknownPreset as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CewlabError, OSError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())

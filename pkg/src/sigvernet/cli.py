"""Command line interface.

Exit codes: 0 success, 1 signature rejected by `verify`, 2 usage error,
3 data or model error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import evaluation, mlp, syndata
from .errors import SigverError
from .features import Layout, extract_features, format_feature_csv
from .preprocess import (
    CANON_HEIGHT,
    CANON_WIDTH,
    GRID_COLS,
    GRID_ROWS,
    aspect_ratio,
    binarize,
    crop_to_content,
    deskew,
    estimate_skew,
    median_filter3,
    otsu_threshold,
    resize_nn,
    thin,
)
from .raster import load_pgm, save_pgm, to_gray

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_DATA = 3


def _even_int(text: str) -> int:
    value = int(text)
    if value < 2 or value % 2 != 0:
        raise argparse.ArgumentTypeError(f"must be an even integer >= 2, got {text}")
    return value


def _parse_sizes(text: str):
    """Accept start:stop:step (inclusive) or a comma list of sizes."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("size range must be start:stop:step")
        try:
            start, stop, step = (int(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad size range {text!r}") from None
        if step < 1 or start < 1 or stop < start:
            raise argparse.ArgumentTypeError(f"bad size range {text!r}")
        return list(range(start, stop + 1, step))
    try:
        sizes = [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def _parse_methods(text: str):
    try:
        return [Layout.from_tag(t.strip()) for t in text.split(",") if t.strip()]
    except SigverError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sigvernet",
        description="offline signature verification: synthesize, preprocess, train, verify, evaluate",
    )
    p.add_argument(
        "--seed", dest="global_seed", type=int, default=0,
        help="fallback seed for seeded subcommands",
    )
    p.add_argument("--quiet", action="store_true", help="suppress progress chatter")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic signature dataset")
    sp.add_argument("--signers", type=int, default=10)
    sp.add_argument("--genuine", type=int, default=110)
    sp.add_argument("--forgery", type=int, default=110)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out-dir", required=True)

    sp = sub.add_parser("preprocess", help="run the pipeline and dump every stage")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out-dir", required=True)

    sp = sub.add_parser("features", help="extract a scaled feature vector to CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--layout", choices=[l.value for l in Layout], required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("train", help="train a verification model for one signer")
    sp.add_argument("--data", required=True, help="dataset manifest")
    sp.add_argument("--layout", choices=[l.value for l in Layout], required=True)
    sp.add_argument("--n-train", type=_even_int, required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--signer", default=None, help="signer id (default: first in manifest)")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("verify", help="classify one signature image")
    sp.add_argument("--model", required=True)
    sp.add_argument("--in", dest="input", required=True)

    sp = sub.add_parser("evaluate", help="score a model on a signer's listed samples")
    sp.add_argument("--model", required=True)
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--signer", required=True)

    sp = sub.add_parser("sweep", help="compare layouts across training sizes")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--signer", required=True)
    sp.add_argument("--methods", type=_parse_methods, default=list(Layout))
    sp.add_argument("--sizes", type=_parse_sizes, default=list(evaluation.DEFAULT_SIZES))
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", required=True, help="CSV report path")
    sp.add_argument("--figures", default=None, help="also render charts into this directory")

    return p


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _cmd_synth(args) -> int:
    manifest = syndata.gen_dataset(
        n_signers=args.signers,
        n_genuine=args.genuine,
        n_forgery=args.forgery,
        seed=_effective_seed(args),
        out_dir=args.out_dir,
    )
    _say(args, f"wrote {args.signers} signers to {manifest}")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gray = load_pgm(args.input)

    binary = binarize(gray, otsu_threshold(gray))
    save_pgm(to_gray(binary), out_dir / "01_binary.pgm")
    denoised = median_filter3(binary)
    save_pgm(to_gray(denoised), out_dir / "02_denoised.pgm")
    skeleton = thin(denoised)
    save_pgm(to_gray(skeleton), out_dir / "03_thinned.pgm")
    if skeleton.ink_count() >= 2:
        straight = deskew(skeleton, estimate_skew(skeleton))
    else:
        straight = skeleton
    save_pgm(to_gray(straight), out_dir / "04_deskewed.pgm")
    cropped = crop_to_content(straight)
    save_pgm(to_gray(cropped), out_dir / "05_cropped.pgm")
    aspect = aspect_ratio(cropped)
    resized = resize_nn(cropped, CANON_WIDTH, CANON_HEIGHT)

    # burn the segment borders into the canonical raster for inspection
    gridded = to_gray(resized).pixels.copy()
    for gx in range(1, GRID_COLS):
        x = gx * (CANON_WIDTH // GRID_COLS)
        gridded[:, x] = np.minimum(gridded[:, x], 128)
    for gy in range(1, GRID_ROWS):
        y = gy * (CANON_HEIGHT // GRID_ROWS)
        gridded[y, :] = np.minimum(gridded[y, :], 128)
    from .raster import GrayRaster

    save_pgm(GrayRaster(gridded), out_dir / "06_segmented.pgm")
    (out_dir / "aspect.txt").write_text(f"{aspect:.6f}\n", encoding="ascii")
    _say(args, f"wrote 6 stage images and aspect.txt to {out_dir}")
    return EXIT_OK


def _cmd_features(args) -> int:
    layout = Layout.from_tag(args.layout)
    vector = extract_features(load_pgm(args.input), layout)
    Path(args.out).write_text(format_feature_csv(vector), encoding="ascii")
    _say(args, f"wrote {vector.values.size} features to {args.out}")
    return EXIT_OK


def _effective_seed(args) -> int:
    own = getattr(args, "seed", None)
    return own if own is not None else args.global_seed


def _cmd_train(args) -> int:
    manifest = evaluation.load_manifest(args.data)
    signer_id = args.signer if args.signer is not None else manifest.signer_ids()[0]
    seed = _effective_seed(args)
    layout = Layout.from_tag(args.layout)
    split = evaluation.SplitSpec(n_train=args.n_train, seed=seed)
    train_samples, _ = evaluation.make_split(manifest, signer_id, split)

    cache = evaluation._FeatureCache()
    batch = [
        (cache.vector(s.path, layout), mlp.GENUINE_TARGET if s.genuine else mlp.FORGERY_TARGET)
        for s in train_samples
    ]
    model = mlp.init([layout.size, 16, 16, 1], seed=seed, layout=layout)
    result = mlp.train(model, batch)
    mlp.save_model(result.model, args.out)
    final = result.history[-1].mse if result.history else float("nan")
    _say(
        args,
        f"trained {layout.value} model for {signer_id}: {len(result.history)} epochs, "
        f"mse {final:.6f}, {result.stop_reason.value}, saved to {args.out}",
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    model = mlp.load_model(args.model)
    vector = extract_features(load_pgm(args.input), model.layout)
    score, _ = mlp.forward(model, vector)
    decision = mlp.Decision.GENUINE if score > model.threshold else mlp.Decision.FORGERY
    print(f"{decision.name} {score:.6f}")
    return EXIT_OK if decision is mlp.Decision.GENUINE else EXIT_REJECTED


def _cmd_evaluate(args) -> int:
    model = mlp.load_model(args.model)
    manifest = evaluation.load_manifest(args.manifest)
    signer = manifest.signer(args.signer)
    cache = evaluation._FeatureCache()
    test_set = [(cache.vector(p, model.layout), True) for p in signer.genuine] + [
        (cache.vector(p, model.layout), False) for p in signer.forgery
    ]
    report = evaluation.evaluate(model, test_set)
    print("accuracy_pct,far_pct,frr_pct,n_genuine,n_forgery")
    print(
        f"{report.accuracy_pct:.2f},{report.far_pct:.2f},{report.frr_pct:.2f},"
        f"{len(signer.genuine)},{len(signer.forgery)}"
    )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    manifest = evaluation.load_manifest(args.manifest)
    rows = evaluation.sweep(
        manifest,
        args.signer,
        methods=args.methods,
        sizes=args.sizes,
        seed=_effective_seed(args),
    )
    evaluation.write_csv(rows, args.out)
    _say(args, f"wrote {len(rows)} rows to {args.out}")
    if args.figures:
        from .plots import render_sweep_figures

        written = render_sweep_figures(rows, args.figures)
        _say(args, f"rendered {len(written)} charts to {args.figures}")
    return EXIT_OK


_HANDLERS = {
    "synth": _cmd_synth,
    "preprocess": _cmd_preprocess,
    "features": _cmd_features,
    "train": _cmd_train,
    "verify": _cmd_verify,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
}


def run(argv) -> int:
    """Parse argv (no program name) and execute; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except (SigverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))

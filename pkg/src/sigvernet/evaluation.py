"""Dataset manifests, train/test splitting and classifier evaluation.

The protocol mirrors a per-signer verification experiment: train one
network per signer on a balanced sample of genuine and forged signatures
and score it on 50 unseen samples of each class. FRR is the percentage of
genuine test signatures rejected, FAR the percentage of forgeries
accepted. The sweep repeats that over training sizes and feature layouts
and reports one CSV row per cell.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import (
    DuplicatePathError,
    EmptyTestSetError,
    InsufficientSamplesError,
    MalformedManifestError,
    MissingFileError,
    SingleClassTestSetError,
    UnknownSignerError,
)
from .features import FeatureVector, Layout, assemble_from_grid, scale
from .mlp import (
    Decision,
    FORGERY_TARGET,
    GENUINE_TARGET,
    MlpModel,
    TrainConfig,
    classify,
    init,
    train,
)
from .preprocess import preprocess_pipeline
from .raster import load_pgm

DEFAULT_SIZES = tuple(range(10, 101, 10))
CSV_HEADER = "method,n_train,accuracy_pct,far_pct,frr_pct,train_seconds"


@dataclass(frozen=True)
class SignerSet:
    signer_id: str
    genuine: tuple
    forgery: tuple


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    signers: tuple

    def signer(self, signer_id: str) -> SignerSet:
        for s in self.signers:
            if s.signer_id == signer_id:
                return s
        raise UnknownSignerError(f"no signer {signer_id!r} in manifest")

    def signer_ids(self) -> list:
        return [s.signer_id for s in self.signers]


def load_manifest(path) -> DatasetManifest:
    """Parse a manifest of `signer/genuine/forgery` lines.

    Paths are resolved relative to the manifest's directory; every listed
    file must exist and may appear only once. Each signer needs at least
    one sample of each class.
    """
    path = Path(path)
    root = path.parent
    signers: list = []
    current = None
    seen_ids: set = set()
    seen_paths: set = set()

    def close_current():
        if current is None:
            return
        if not current["genuine"] or not current["forgery"]:
            raise MalformedManifestError(
                f"signer {current['id']!r} needs at least one genuine and one forgery"
            )
        signers.append(
            SignerSet(
                signer_id=current["id"],
                genuine=tuple(current["genuine"]),
                forgery=tuple(current["forgery"]),
            )
        )

    for lineno, raw in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise MalformedManifestError(f"line {lineno}: expected '<keyword> <value>'")
        keyword, value = parts[0], parts[1].strip()
        if keyword == "signer":
            close_current()
            if value in seen_ids:
                raise MalformedManifestError(f"line {lineno}: duplicate signer {value!r}")
            seen_ids.add(value)
            current = {"id": value, "genuine": [], "forgery": []}
        elif keyword in ("genuine", "forgery"):
            if current is None:
                raise MalformedManifestError(
                    f"line {lineno}: {keyword} before any signer line"
                )
            sample = (root / value).resolve()
            if sample in seen_paths:
                raise DuplicatePathError(f"line {lineno}: {value} listed twice")
            seen_paths.add(sample)
            if not sample.is_file():
                raise MissingFileError(f"line {lineno}: no such file {value}")
            current[keyword].append(sample)
        else:
            raise MalformedManifestError(f"line {lineno}: unknown keyword {keyword!r}")
    close_current()
    if not signers:
        raise MalformedManifestError("manifest lists no signers")
    return DatasetManifest(root=root, signers=tuple(signers))


@dataclass(frozen=True)
class SplitSpec:
    """How to cut one signer's samples into train and test sets."""

    n_train: int                 # total training samples, half per class
    seed: int
    n_test_genuine: int = 50
    n_test_forgery: int = 50


@dataclass(frozen=True)
class Sample:
    path: Path
    genuine: bool


def make_split(manifest: DatasetManifest, signer_id: str, spec: SplitSpec):
    """Deterministic shuffled split; train and test never share a file."""
    if spec.n_train < 2 or spec.n_train % 2 != 0:
        raise ValueError(f"n_train must be an even number >= 2, got {spec.n_train}")
    signer = manifest.signer(signer_id)
    half = spec.n_train // 2
    need_g = half + spec.n_test_genuine
    need_f = half + spec.n_test_forgery
    if len(signer.genuine) < need_g or len(signer.forgery) < need_f:
        raise InsufficientSamplesError(
            f"signer {signer_id!r} has {len(signer.genuine)}+{len(signer.forgery)} samples, "
            f"needs {need_g}+{need_f}"
        )
    rng = np.random.default_rng(spec.seed)
    g = [signer.genuine[i] for i in rng.permutation(len(signer.genuine))]
    f = [signer.forgery[i] for i in rng.permutation(len(signer.forgery))]
    train_set = [Sample(p, True) for p in g[:half]] + [Sample(p, False) for p in f[:half]]
    test_set = [Sample(p, True) for p in g[half:need_g]] + [
        Sample(p, False) for p in f[half:need_f]
    ]
    return train_set, test_set


@dataclass(frozen=True)
class MetricsReport:
    method: str
    n_train: int
    accuracy_pct: float
    far_pct: float
    frr_pct: float
    train_seconds: float


def evaluate(model: MlpModel, test_set) -> MetricsReport:
    """Score labeled feature vectors; test_set holds (vector, genuine) pairs."""
    if len(test_set) == 0:
        raise EmptyTestSetError("no test samples")
    n_gen = sum(1 for _, is_gen in test_set if is_gen)
    n_forg = len(test_set) - n_gen
    if n_gen == 0 or n_forg == 0:
        raise SingleClassTestSetError(
            f"test set has {n_gen} genuine and {n_forg} forgeries; need both classes"
        )
    false_rejects = 0
    false_accepts = 0
    for vector, is_genuine in test_set:
        decision = classify(model, vector)
        if is_genuine and decision is Decision.FORGERY:
            false_rejects += 1
        elif not is_genuine and decision is Decision.GENUINE:
            false_accepts += 1
    far = 100.0 * false_accepts / n_forg
    frr = 100.0 * false_rejects / n_gen
    correct = len(test_set) - false_accepts - false_rejects
    accuracy = 100.0 * correct / len(test_set)
    method = model.layout.value if model.layout is not None else "custom"
    return MetricsReport(
        method=method,
        n_train=0,
        accuracy_pct=accuracy,
        far_pct=far,
        frr_pct=frr,
        train_seconds=0.0,
    )


def _cell_seed(seed: int, method: str, size: int, role: str) -> int:
    digest = hashlib.sha256(f"sigvernet-sweep/{seed}/{method}/{size}/{role}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


class _FeatureCache:
    """Runs the preprocessing pipeline once per image path."""

    def __init__(self):
        self._parts: dict = {}

    def vector(self, path: Path, layout: Layout) -> FeatureVector:
        key = Path(path)
        if key not in self._parts:
            self._parts[key] = preprocess_pipeline(load_pgm(key))
        grid, aspect = self._parts[key]
        return scale(assemble_from_grid(layout, grid, aspect))


def _labeled_vectors(samples, layout: Layout, cache: _FeatureCache):
    return [(cache.vector(s.path, layout), s.genuine) for s in samples]


def sweep(
    manifest: DatasetManifest,
    signer_id: str,
    methods,
    sizes=DEFAULT_SIZES,
    seed: int = 0,
    n_test: int = 50,
    config: TrainConfig = TrainConfig(),
):
    """Train and score one cell per (method, training size); returns reports.

    Every cell derives its own split and init seeds from the top-level
    seed, so a sweep is reproducible end to end while cells stay
    statistically independent.
    """
    rows = []
    cache = _FeatureCache()
    for layout in methods:
        for size in sizes:
            split_spec = SplitSpec(
                n_train=size,
                seed=_cell_seed(seed, layout.value, size, "split"),
                n_test_genuine=n_test,
                n_test_forgery=n_test,
            )
            train_samples, test_samples = make_split(manifest, signer_id, split_spec)
            train_batch = [
                (vec, GENUINE_TARGET if is_gen else FORGERY_TARGET)
                for vec, is_gen in _labeled_vectors(train_samples, layout, cache)
            ]
            model = init(
                [layout.size, 16, 16, 1],
                seed=_cell_seed(seed, layout.value, size, "init"),
                layout=layout,
            )
            started = time.perf_counter()
            result = train(model, train_batch, config)
            elapsed = time.perf_counter() - started
            report = evaluate(result.model, _labeled_vectors(test_samples, layout, cache))
            rows.append(replace(report, n_train=size, train_seconds=elapsed))
    return rows


def format_csv(rows) -> str:
    """Render metric rows as the delimited report."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.method},{r.n_train},{r.accuracy_pct:.2f},{r.far_pct:.2f},"
            f"{r.frr_pct:.2f},{r.train_seconds:.3f}"
        )
    return "\n".join(lines) + "\n"


def write_csv(rows, path) -> None:
    Path(path).write_text(format_csv(rows), encoding="ascii")

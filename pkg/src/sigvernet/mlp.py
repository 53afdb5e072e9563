"""Small fully connected network with a tansig activation everywhere.

Training is full-batch gradient descent with momentum and an adaptive
learning rate: each epoch proposes one step; a step that worsens the mean
squared error beyond a small tolerance is rolled back and the rate is cut,
otherwise it is kept and the rate grows whenever the error improved.
Targets are +1 for genuine and -1 for forgery; an output strictly above
the decision threshold classifies as genuine.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    BadDimsError,
    CorruptModelError,
    EmptyBatchError,
    LayoutMismatchError,
    NonFiniteLossError,
    VersionMismatchError,
)
from .features import FeatureVector, Layout

MODEL_MAGIC = "SIGVERNET-MODEL"
MODEL_VERSION = "v1"

GENUINE_TARGET = 1.0
FORGERY_TARGET = -1.0


class Decision(Enum):
    GENUINE = "genuine"
    FORGERY = "forgery"


def tansig(v):
    """Hyperbolic tangent sigmoid, 2 / (1 + exp(-2v)) - 1."""
    return np.tanh(v)


@dataclass
class MlpModel:
    """Weights and biases of the layer chain; weights[k] has shape (out, in)."""

    weights: list
    biases: list
    layout: Layout | None = None
    threshold: float = 0.0

    @property
    def dims(self) -> list:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self) -> "MlpModel":
        return MlpModel(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            layout=self.layout,
            threshold=self.threshold,
        )


def init(dims, seed: int, layout: Layout | None = None) -> MlpModel:
    """Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer."""
    dims = [int(d) for d in dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise BadDimsError(f"invalid layer dims {dims}")
    if layout is not None and dims[0] != layout.size:
        raise BadDimsError(
            f"{layout.value} layout feeds {layout.size} inputs, dims say {dims[0]}"
        )
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpModel(weights=weights, biases=biases, layout=layout)


def _check_input(model: MlpModel, x: FeatureVector) -> None:
    if x.values.size != model.dims[0]:
        raise LayoutMismatchError(
            f"model takes {model.dims[0]} inputs, vector has {x.values.size}"
        )
    if model.layout is not None and x.layout is not None and x.layout is not model.layout:
        raise LayoutMismatchError(
            f"model expects {model.layout.value} features, got {x.layout.value}"
        )


def forward(model: MlpModel, x: FeatureVector):
    """Network output and the per-layer activations (input first)."""
    _check_input(model, x)
    activations = [x.values.astype(np.float64)]
    a = activations[0]
    for w, b in zip(model.weights, model.biases):
        a = tansig(w @ a + b)
        activations.append(a)
    return float(a[0]), activations


def classify(model: MlpModel, x: FeatureVector) -> Decision:
    """Genuine only when the output clears the threshold; ties reject."""
    out, _ = forward(model, x)
    return Decision.GENUINE if out > model.threshold else Decision.FORGERY


def _stack_batch(model: MlpModel, batch):
    if len(batch) == 0:
        raise EmptyBatchError("batch has no samples")
    for x, _ in batch:
        _check_input(model, x)
    inputs = np.stack([x.values for x, _ in batch]).astype(np.float64)
    targets = np.array([t for _, t in batch], dtype=np.float64)
    return inputs, targets


def _forward_batch(weights, biases, inputs):
    activations = [inputs]
    a = inputs
    for w, b in zip(weights, biases):
        a = tansig(a @ w.T + b)
        activations.append(a)
    return activations


def _batch_mse(weights, biases, inputs, targets) -> float:
    out = _forward_batch(weights, biases, inputs)[-1][:, 0]
    err = targets - out
    return float(np.mean(err * err))


def mse(model: MlpModel, batch) -> float:
    """Mean of (target - output)^2 over the batch."""
    inputs, targets = _stack_batch(model, batch)
    return _batch_mse(model.weights, model.biases, inputs, targets)


def _batch_gradients(weights, biases, inputs, targets):
    acts = _forward_batch(weights, biases, inputs)
    n = inputs.shape[0]
    out = acts[-1]
    # d mse / d output, folded with the output layer's tansig derivative
    delta = (-2.0 / n) * (targets[:, None] - out) * (1.0 - out * out)
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    for k in range(len(weights) - 1, -1, -1):
        grads_w[k] = delta.T @ acts[k]
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ weights[k]) * (1.0 - acts[k] * acts[k])
    return grads_w, grads_b


def gradients(model: MlpModel, batch):
    """Exact mse gradients for every weight matrix and bias vector."""
    inputs, targets = _stack_batch(model, batch)
    return _batch_gradients(model.weights, model.biases, inputs, targets)


@dataclass(frozen=True)
class TrainConfig:
    lr0: float = 0.01
    momentum: float = 0.9
    lr_inc: float = 1.05
    lr_dec: float = 0.7
    max_perf_inc: float = 1.04
    goal_mse: float = 1e-3
    max_epochs: int = 5000


class StopReason(Enum):
    GOAL_MET = "goal_met"
    MAX_EPOCHS = "max_epochs"


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    mse: float
    lr: float          # rate used for this epoch's candidate step
    accepted: bool


@dataclass
class TrainResult:
    model: MlpModel
    history: list = field(default_factory=list)
    stop_reason: StopReason = StopReason.MAX_EPOCHS
    train_seconds: float = 0.0


def train(model: MlpModel, batch, config: TrainConfig = TrainConfig()) -> TrainResult:
    """Variable-learning-rate momentum descent on the full batch.

    Per epoch: step = momentum * previous_step + (1 - momentum) * lr * (-grad).
    A candidate whose mse exceeds the old mse by more than max_perf_inc is
    rejected (parameters restored, step memory zeroed, lr cut by lr_dec);
    otherwise it is kept, and lr grows by lr_inc when the mse improved.
    Stops when mse reaches goal_mse or after max_epochs.
    """
    inputs, targets = _stack_batch(model, batch)
    weights = [w.astype(np.float64).copy() for w in model.weights]
    biases = [b.astype(np.float64).copy() for b in model.biases]
    step_w = [np.zeros_like(w) for w in weights]
    step_b = [np.zeros_like(b) for b in biases]
    lr = config.lr0
    history: list = []
    started = time.perf_counter()

    def snapshot() -> MlpModel:
        return MlpModel(
            weights=[w.copy() for w in weights],
            biases=[b.copy() for b in biases],
            layout=model.layout,
            threshold=model.threshold,
        )

    current = _batch_mse(weights, biases, inputs, targets)
    if not np.isfinite(current):
        raise NonFiniteLossError("initial mse is not finite", model=model.copy())

    stop = StopReason.MAX_EPOCHS
    for epoch in range(1, config.max_epochs + 1):
        grads_w, grads_b = _batch_gradients(weights, biases, inputs, targets)
        kick = (1.0 - config.momentum) * lr
        cand_step_w = [config.momentum * s - kick * g for s, g in zip(step_w, grads_w)]
        cand_step_b = [config.momentum * s - kick * g for s, g in zip(step_b, grads_b)]
        cand_w = [w + s for w, s in zip(weights, cand_step_w)]
        cand_b = [b + s for b, s in zip(biases, cand_step_b)]
        new = _batch_mse(cand_w, cand_b, inputs, targets)
        if not np.isfinite(new):
            raise NonFiniteLossError(
                f"mse became non-finite at epoch {epoch}",
                model=snapshot(),
                history=history,
            )
        lr_used = lr
        if new > current * config.max_perf_inc:
            # roll back and forget the momentum
            step_w = [np.zeros_like(w) for w in weights]
            step_b = [np.zeros_like(b) for b in biases]
            lr *= config.lr_dec
            history.append(EpochRecord(epoch, current, lr_used, False))
        else:
            if new < current:
                lr *= config.lr_inc
            weights, biases = cand_w, cand_b
            step_w, step_b = cand_step_w, cand_step_b
            current = new
            history.append(EpochRecord(epoch, current, lr_used, True))
        if current <= config.goal_mse:
            stop = StopReason.GOAL_MET
            break

    return TrainResult(
        model=snapshot(),
        history=history,
        stop_reason=stop,
        train_seconds=time.perf_counter() - started,
    )


def _fmt_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_model(model: MlpModel, path) -> None:
    """Write the model as line-oriented text; floats keep full precision."""
    if model.layout is None:
        raise ValueError("only layout-tagged models can be saved")
    dims = model.dims
    if len(dims) != 4 or dims[-1] != 1:
        raise CorruptModelError(f"persistable models need dims [n, h1, h2, 1], got {dims}")
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"layout {model.layout.value}",
        "dims " + " ".join(str(d) for d in dims),
        f"threshold {model.threshold!r}",
    ]
    for w, b in zip(model.weights, model.biases):
        lines.append(f"W {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(_fmt_row(row))
        lines.append(f"b {b.shape[0]}")
        lines.append(_fmt_row(b))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


class _LineReader:
    def __init__(self, text: str):
        self.lines = [ln.strip() for ln in text.splitlines()]
        self.pos = 0

    def next(self) -> str:
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            if line:
                return line
        raise CorruptModelError("model file ended early")

    def exhausted(self) -> bool:
        return all(not ln for ln in self.lines[self.pos :])


def _parse_floats(line: str, count: int) -> np.ndarray:
    parts = line.split()
    if len(parts) != count:
        raise CorruptModelError(f"expected {count} numbers, found {len(parts)}")
    try:
        return np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise CorruptModelError(f"bad number in model file: {exc}") from None


def load_model(path) -> MlpModel:
    """Read a model file written by save_model."""
    with open(path, "r", encoding="ascii") as fh:
        reader = _LineReader(fh.read())

    head = reader.next().split()
    if len(head) != 2 or head[0] != MODEL_MAGIC:
        raise CorruptModelError("not a sigvernet model file")
    if head[1] != MODEL_VERSION:
        raise VersionMismatchError(f"unsupported model version {head[1]!r}")

    layout_line = reader.next().split()
    if len(layout_line) != 2 or layout_line[0] != "layout":
        raise CorruptModelError("missing layout line")
    layout = Layout.from_tag(layout_line[1])

    dims_line = reader.next().split()
    if dims_line[0] != "dims" or len(dims_line) != 5:
        raise CorruptModelError("dims line must list 4 layer sizes")
    try:
        dims = [int(p) for p in dims_line[1:]]
    except ValueError:
        raise CorruptModelError("dims line must list integers") from None
    if any(d < 1 for d in dims) or dims[-1] != 1 or dims[0] != layout.size:
        raise CorruptModelError(f"dims {dims} invalid for layout {layout.value}")

    thr_line = reader.next().split()
    if len(thr_line) != 2 or thr_line[0] != "threshold":
        raise CorruptModelError("missing threshold line")
    try:
        threshold = float(thr_line[1])
    except ValueError:
        raise CorruptModelError("threshold is not a number") from None

    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w_head = reader.next().split()
        if w_head != ["W", str(fan_out), str(fan_in)]:
            raise CorruptModelError(f"expected 'W {fan_out} {fan_in}', got {' '.join(w_head)!r}")
        rows = [_parse_floats(reader.next(), fan_in) for _ in range(fan_out)]
        weights.append(np.stack(rows))
        b_head = reader.next().split()
        if b_head != ["b", str(fan_out)]:
            raise CorruptModelError(f"expected 'b {fan_out}', got {' '.join(b_head)!r}")
        biases.append(_parse_floats(reader.next(), fan_out))

    if not reader.exhausted():
        raise CorruptModelError("trailing data after the last layer")
    return MlpModel(weights=weights, biases=biases, layout=layout, threshold=threshold)

"""Comparison charts rendered from sweep reports.

One PNG per metric, training-set size on the x axis and one line per
feature layout, written next to (or wherever requested alongside) the
CSV report.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_PANELS = (
    ("accuracy_pct", "accuracy (%)", "accuracy.png"),
    ("far_pct", "false acceptance rate (%)", "far.png"),
    ("frr_pct", "false rejection rate (%)", "frr.png"),
    ("train_seconds", "training time (s)", "train_time.png"),
)

_STYLES = ("o-", "s--", "^:")


def render_sweep_figures(rows, out_dir) -> list:
    """Write the four metric charts; returns the created file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    methods = []
    for r in rows:
        if r.method not in methods:
            methods.append(r.method)

    written = []
    for attr, label, filename in _PANELS:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for i, method in enumerate(methods):
            cells = sorted(
                (r for r in rows if r.method == method), key=lambda r: r.n_train
            )
            ax.plot(
                [r.n_train for r in cells],
                [getattr(r, attr) for r in cells],
                _STYLES[i % len(_STYLES)],
                label=method,
                markersize=4,
            )
        ax.set_xlabel("training samples")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        target = out_dir / filename
        fig.savefig(target, dpi=150)
        plt.close(fig)
        written.append(target)
    return written

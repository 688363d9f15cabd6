"""Figure rendering for run, sweep, fit, and bound outputs.

Every renderer writes PNGs next to the delimited files it reads, using
the Agg backend so headless runs work. Figures are a convenience layer:
the CSVs stay the canonical record and determinism guarantees cover only
them, not PNG bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _read_csv(path: Path) -> dict:
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for ln in lines[1:]:
        for h, cell in zip(header, ln.split(",")):
            cols[h].append(float(cell) if cell else np.nan)
    return {h: np.asarray(v) for h, v in cols.items()}


def _logy_if_positive(ax, *series) -> None:
    stacked = np.concatenate([np.asarray(s, dtype=float) for s in series])
    finite = stacked[np.isfinite(stacked)]
    if finite.size and np.all(finite > 0):
        ax.set_yscale("log")


def render_run(out_dir: Union[str, Path]) -> list:
    """Loss, step-size, and norm panels for one run's log.csv."""
    out = Path(out_dir)
    log = _read_csv(out / "log.csv")
    if log["step"].size == 0:
        return []
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(log["step"], log["loss_at_x"], label="loss at x (model point)")
    ax.plot(log["step"], log["loss_at_y"], label="loss at y (query point)", alpha=0.6)
    _logy_if_positive(ax, log["loss_at_x"], log["loss_at_y"])
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.legend()
    ax.set_title("training loss")
    fig.tight_layout()
    path = out / "loss.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    axes[0].plot(log["step"], log["alpha_t"], label="alpha (effective step)")
    axes[0].plot(log["step"], log["eta_t"], label="eta (scale-free)", alpha=0.6)
    axes[0].set_xlabel("step")
    axes[0].legend()
    axes[0].set_title("step sizes")
    axes[1].plot(log["step"], log["c_t"], label="averaging weight c")
    axes[1].plot(log["step"], log["beta_tilde"], label="beta tilde", alpha=0.6)
    axes[1].set_xlabel("step")
    axes[1].legend()
    axes[1].set_title("averaging")
    fig.tight_layout()
    path = out / "diagnostics.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for col in ("norm_x", "norm_y", "norm_z"):
        ax.plot(log["step"], log[col], label=col)
    ratio_ok = np.all(log["norm_z"] > 0)
    if ratio_ok:
        ax.plot(
            log["step"],
            log["grad_l2"] / log["norm_z"],
            label="grad_l2 / norm_z",
            linestyle="--",
        )
    ax.set_xlabel("step")
    ax.legend()
    ax.set_title("parameter and gradient norms")
    fig.tight_layout()
    path = out / "norms.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def render_sweep(out_dir: Union[str, Path], members: Sequence[str]) -> list:
    """Overlay of member loss-at-x curves, labeled by member slug."""
    out = Path(out_dir)
    fig, ax = plt.subplots(figsize=(8, 5))
    any_curve = False
    all_vals = []
    for slug in members:
        log_path = out / slug / "log.csv"
        if not log_path.is_file():
            continue
        log = _read_csv(log_path)
        if log["step"].size == 0:
            continue
        ax.plot(log["step"], log["loss_at_x"], label=slug)
        all_vals.append(log["loss_at_x"])
        any_curve = True
    if not any_curve:
        plt.close(fig)
        return []
    _logy_if_positive(ax, *all_vals)
    ax.set_xlabel("step")
    ax.set_ylabel("loss at x")
    ax.legend(fontsize=7)
    ax.set_title("sweep comparison")
    fig.tight_layout()
    path = out / "sweep.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def render_fit(
    out_dir: Union[str, Path],
    steps: np.ndarray,
    values: np.ndarray,
    pred_steps: np.ndarray,
    predicted: np.ndarray,
    fit,
) -> list:
    """Observed series with the fitted curve and its window shaded."""
    out = Path(out_dir)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(steps, values, label="observed", lw=1.0)
    ax.plot(pred_steps, predicted, label="a/sqrt(t+b) + c fit", lw=1.5)
    ax.axvspan(fit.window[0], fit.window[1], color="0.85", label="fit window")
    if fit.c > 0:
        ax.axhline(fit.c, color="0.4", linestyle=":", label=f"asymptote c = {fit.c:.4g}")
    _logy_if_positive(ax, values, predicted)
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    ax.legend()
    ax.set_title("inverse-sqrt loss fit")
    fig.tight_layout()
    path = out / "fit.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def render_bound(out_dir: Union[str, Path], rows: Sequence[tuple]) -> list:
    """Schedule multiplier and the anytime loss bound against steps."""
    out = Path(out_dir)
    data = np.asarray(rows, dtype=float)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    axes[0].plot(data[:, 0], data[:, 1])
    axes[0].set_xlabel("step")
    axes[0].set_ylabel("multiplier")
    axes[0].set_title("schedule")
    axes[1].plot(data[:, 0], data[:, 2])
    _logy_if_positive(axes[1], data[:, 2])
    axes[1].set_xlabel("step")
    axes[1].set_ylabel("bound")
    axes[1].set_title("anytime loss bound")
    fig.tight_layout()
    path = out / "bound.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]

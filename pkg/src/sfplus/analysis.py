"""Post-hoc analysis of run logs.

Loss curves from averaged-iterate methods track a/sqrt(t + b) + c
remarkably well; fitting that model on an early window predicts late
training, and the asymptote c estimates the best achievable loss. The
fit is deterministic: a coarse log-spaced grid over b with a closed-form
linear solve for (a, c) at each candidate, then damped Gauss-Newton from
the best grid point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ConfigInvalid, FitDiverged, MissingColumn


@dataclass(frozen=True)
class CurveFit:
    """Fitted parameters of loss(t) = a/sqrt(t + b) + c over a window."""

    a: float
    b: float
    c: float
    rms_residual: float
    r_squared: float
    window: tuple[int, int]

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "window": list(self.window),
            "rms_residual": self.rms_residual,
            "r_squared": self.r_squared,
            "f_star_estimate": self.c,
        }


def inverse_sqrt_model(
    t: Union[float, np.ndarray], a: float, b: float, c: float
) -> Union[float, np.ndarray]:
    return a / np.sqrt(np.asarray(t, dtype=np.float64) + b) + c


def _linear_solve(t: np.ndarray, y: np.ndarray, b: float) -> tuple[float, float, float]:
    """Least-squares (a, c) for fixed b, returning (a, c, sse)."""
    col = 1.0 / np.sqrt(t + b)
    design = np.column_stack([col, np.ones_like(col)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = design @ coef - y
    return float(coef[0]), float(coef[1]), float(resid @ resid)


def _sse(t: np.ndarray, y: np.ndarray, a: float, b: float, c: float) -> float:
    r = a / np.sqrt(t + b) + c - y
    return float(r @ r)


def fit_inverse_sqrt(
    steps: Sequence[float],
    values: Sequence[float],
    window: tuple[float, float] = (0.25, 1.0),
    max_iter: int = 100,
) -> CurveFit:
    """Fit a/sqrt(t+b) + c to the loss series restricted to a window.

    window is a (lo, hi) fraction pair of the final step: (0.25, 1.0)
    fits the last 75% of the run, (0.05, 0.15) the early prediction
    window. Needs at least 10 points in the window and positive losses.
    Raises FitDiverged (with .best holding the grid solution) if the
    refinement cannot stay in the region where t + b > 0.
    """
    t_all = np.asarray(steps, dtype=np.float64).ravel()
    y_all = np.asarray(values, dtype=np.float64).ravel()
    if t_all.shape != y_all.shape or t_all.size == 0:
        raise ConfigInvalid("steps and values must be equal-length nonempty series")
    lo, hi = window
    if not (0.0 <= lo < hi <= 1.0):
        raise ConfigInvalid(f"window fractions must satisfy 0 <= lo < hi <= 1, got {window}")
    horizon = float(t_all.max())
    mask = (t_all >= lo * horizon) & (t_all <= hi * horizon)
    t, y = t_all[mask], y_all[mask]
    if t.size < 10:
        raise ConfigInvalid(
            f"fit window [{lo}, {hi}] holds {t.size} points; at least 10 required"
        )
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise ConfigInvalid("loss values in the fit window must be positive and finite")
    win = (int(t.min()), int(t.max()))

    # Stage 1: log-spaced grid over b, linear solve for (a, c).
    grid = np.concatenate(([0.0], np.logspace(-2.0, 7.0, 181)))
    grid = grid[t.min() + grid > 0.0]
    best_b, best_a, best_c, best_sse = None, None, None, np.inf
    for b in grid:
        a, c, sse = _linear_solve(t, y, float(b))
        if sse < best_sse:
            best_b, best_a, best_c, best_sse = float(b), a, c, sse
    best_grid = CurveFit(
        a=best_a,
        b=best_b,
        c=best_c,
        rms_residual=float(np.sqrt(best_sse / t.size)),
        r_squared=_r_squared(y, best_sse),
        window=win,
    )

    # Stage 2: damped Gauss-Newton on (a, b, c).
    a, b, c = best_a, best_b, best_c
    sse = best_sse
    feasible_eps = 1e-9
    for _ in range(max_iter):
        root = np.sqrt(t + b)
        resid = a / root + c - y
        J = np.column_stack([1.0 / root, -0.5 * a / root**3, np.ones_like(root)])
        delta, *_ = np.linalg.lstsq(J, -resid, rcond=None)
        if not np.all(np.isfinite(delta)):
            raise FitDiverged(
                "curve-fit refinement produced non-finite step", best=best_grid
            )
        scale = 1.0
        improved = False
        for _ in range(40):
            a2, b2, c2 = a + scale * delta[0], b + scale * delta[1], c + scale * delta[2]
            if t.min() + b2 > feasible_eps:
                sse2 = _sse(t, y, a2, b2, c2)
                if sse2 < sse:
                    a, b, c, sse = a2, b2, c2, sse2
                    improved = True
                    break
            scale *= 0.5
        if not improved:
            break
        if sse <= 1e-30 or abs(delta[0]) + abs(delta[1]) + abs(delta[2]) < 1e-12:
            break
    if not np.all(np.isfinite([a, b, c])) or t.min() + b <= 0.0:
        raise FitDiverged(
            "curve-fit refinement left the feasible region", best=best_grid
        )

    return CurveFit(
        a=float(a),
        b=float(b),
        c=float(c),
        rms_residual=float(np.sqrt(sse / t.size)),
        r_squared=_r_squared(y, sse),
        window=win,
    )


def _r_squared(y: np.ndarray, sse: float) -> float:
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        return 1.0
    return 1.0 - sse / sst


def extrapolate(
    fit: CurveFit, horizon: Union[float, Sequence[float]]
) -> Union[float, np.ndarray]:
    """Evaluate the fitted model at future steps.

    fit.c is the predicted asymptote (the best-loss estimate); as the
    horizon doubles far in the tail, the excess loss above c shrinks by
    1/sqrt(2).
    """
    t = np.asarray(horizon, dtype=np.float64)
    if np.any(t + fit.b <= 0.0):
        raise ConfigInvalid("horizon must satisfy t + b > 0")
    out = inverse_sqrt_model(t, fit.a, fit.b, fit.c)
    return float(out) if np.ndim(horizon) == 0 else out


def ema_smooth(values: Sequence[float], beta: float = 0.9) -> np.ndarray:
    """Bias-corrected trailing EMA; deterministic loss-curve smoothing."""
    if not 0.0 <= beta < 1.0:
        raise ConfigInvalid("smoothing beta must lie in [0, 1)")
    y = np.asarray(values, dtype=np.float64).ravel()
    out = np.empty_like(y)
    acc = 0.0
    for i, v in enumerate(y, start=1):
        acc = beta * acc + (1.0 - beta) * v
        out[i - 1] = acc / (1.0 - beta**i)
    return out


NORM_COLUMNS = ("grad_l2", "norm_x", "norm_y", "norm_z")
_REQUIRED = NORM_COLUMNS + ("step", "grad_l1", "alpha_t")


def norm_diagnostics(log: Mapping[str, Sequence[float]], n_windows: int = 10) -> dict:
    """Windowed means and least-squares slopes of the norm trajectories.

    Splits the log into n_windows equal contiguous windows and reports,
    for each of ||g||, ||x||, ||y||, ||z||, the gradient-to-weight ratio
    ||g||/||z||, and the effective-rate proxy alpha_t*||g||_1: the window
    mean and the per-step slope. Slopes of constant series are exactly 0.
    """
    for col in _REQUIRED:
        if col not in log:
            raise MissingColumn(f"log lacks required column {col!r}")
    step = np.asarray(log["step"], dtype=np.float64)
    n = step.size
    if n == 0:
        raise ConfigInvalid("empty log")
    n_windows = max(1, min(n_windows, n))
    series = {col: np.asarray(log[col], dtype=np.float64) for col in NORM_COLUMNS}
    series["grad_to_weight"] = np.divide(
        series["grad_l2"],
        series["norm_z"],
        out=np.zeros(n),
        where=series["norm_z"] != 0.0,
    )
    series["effective_lr"] = np.asarray(log["alpha_t"], dtype=np.float64) * np.asarray(
        log["grad_l1"], dtype=np.float64
    )

    edges = np.linspace(0, n, n_windows + 1).astype(int)
    windows = [(int(step[s]), int(step[e - 1])) for s, e in zip(edges, edges[1:]) if e > s]
    out = {"windows": windows, "series": {}}
    for name, vals in series.items():
        means, slopes = [], []
        for s, e in zip(edges, edges[1:]):
            if e <= s:
                continue
            seg_t, seg_v = step[s:e], vals[s:e]
            means.append(float(seg_v.mean()))
            if e - s < 2 or np.all(seg_v == seg_v[0]):
                slopes.append(0.0)
            else:
                slopes.append(float(np.polyfit(seg_t, seg_v, 1)[0]))
        out["series"][name] = {"mean": means, "slope": slopes}
    return out

"""Baseline optimizers and schedules, plus numeric bound evaluators.

Three Adam variants distinguished only by their decay coefficient

    adamw       w -= lr * adam_ratio + lr * wd * w
    adamc       w -= lr * adam_ratio + (lr^2 / lr_max) * wd * w
    adamc-full  w -= lr * adam_ratio + lr^2 * wd * w

where lr follows a schedule (constant / linear decay / WSD / cosine) and
lr_max is the running maximum of realized rates. The module also
evaluates the anytime loss bound that predicts schedule-shaped loss
curves, and the closed-form weights that minimize the averaged-iterate
bound for known gradient norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import ConfigInvalid, NonFiniteParameter
from .sfcore import clip_gradient

SCHEDULE_KINDS = ("constant", "linear-decay", "wsd", "cosine")


@dataclass(frozen=True)
class Schedule:
    """Learning-rate schedule over a fixed horizon.

    All kinds share the linear warmup ramp t/warmup_steps. linear-decay
    then falls straight to 0 at total_steps; wsd holds the peak and
    anneals linearly to 0 over the trailing anneal_fraction of the run;
    cosine lands on min_ratio * peak_lr.
    """

    kind: str
    total_steps: int
    warmup_steps: int = 0
    peak_lr: float = 1.0
    anneal_fraction: float = 0.10
    min_ratio: float = 0.1

    def validate(self) -> "Schedule":
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigInvalid(
                f"unknown schedule kind {self.kind!r}; expected one of {SCHEDULE_KINDS}"
            )
        if self.total_steps < 1:
            raise ConfigInvalid("schedule total_steps must be >= 1")
        if not 0 <= self.warmup_steps <= self.total_steps:
            raise ConfigInvalid("warmup_steps must lie in [0, total_steps]")
        if self.peak_lr <= 0:
            raise ConfigInvalid("peak_lr must be positive")
        if not 0.0 < self.anneal_fraction <= 1.0:
            raise ConfigInvalid("anneal_fraction must lie in (0, 1]")
        if not 0.0 <= self.min_ratio <= 1.0:
            raise ConfigInvalid("min_ratio must lie in [0, 1]")
        return self


def schedule_multiplier(s: Schedule, t: int) -> float:
    """Multiplier in [0, 1] at step t (1-based, t <= total_steps)."""
    if not 1 <= t <= s.total_steps:
        raise ConfigInvalid(f"step {t} outside schedule horizon 1..{s.total_steps}")
    if s.warmup_steps > 0 and t <= s.warmup_steps:
        return t / s.warmup_steps
    T, w = s.total_steps, s.warmup_steps
    if s.kind == "constant":
        return 1.0
    if s.kind == "linear-decay":
        return (T - t) / (T - w)
    if s.kind == "wsd":
        anneal_start = T - round(s.anneal_fraction * T)
        if t <= anneal_start:
            return 1.0
        return (T - t) / (T - anneal_start)
    # cosine; endpoints exact because cos(0) = 1 and cos(pi) = -1 exactly
    progress = (t - w) / (T - w)
    return s.min_ratio + (1.0 - s.min_ratio) * 0.5 * (1.0 + math.cos(math.pi * progress))


def schedule_value(s: Schedule, t: int) -> float:
    """Learning rate at step t: peak_lr times the multiplier."""
    return s.peak_lr * schedule_multiplier(s, t)


def schedule_multipliers(s: Schedule, through: Optional[int] = None) -> np.ndarray:
    """Multipliers for steps 1..through (default the full horizon)."""
    T = s.total_steps if through is None else through
    return np.array([schedule_multiplier(s, t) for t in range(1, T + 1)])


def bound_grid_multipliers(s: Schedule, T: Optional[int] = None) -> np.ndarray:
    """Multipliers for bound evaluation: the same schedule shape sampled
    on a horizon of T+1 so decay-to-zero kinds stay positive through step
    T. The bound divides by suffix sums of the multipliers, which a zero
    terminal value would send to infinity at the horizon.
    """
    T = s.total_steps if T is None else T
    stretched = replace(s, total_steps=T + 1)
    return schedule_multipliers(stretched, through=T)


@dataclass(frozen=True)
class BoundInput:
    """Inputs of the anytime loss bound.

    multipliers are the per-step schedule values eta_1..eta_T relative to
    the peak; grad_sq is E||g_i||^2, either one scalar (flat norms) or a
    full sequence; D estimates the initial distance to the solution.
    """

    multipliers: np.ndarray
    peak: float
    D: float
    grad_sq: Union[float, np.ndarray] = 1.0

    def validate(self) -> "BoundInput":
        eta = np.asarray(self.multipliers, dtype=np.float64)
        if eta.ndim != 1 or eta.size == 0:
            raise ConfigInvalid("multipliers must be a nonempty 1-D sequence")
        if np.any(eta < 0) or np.any(eta > 1) or not np.all(np.isfinite(eta)):
            raise ConfigInvalid("multipliers must lie in [0, 1]")
        if self.peak <= 0 or self.D <= 0:
            raise ConfigInvalid("peak and D must be positive")
        g2 = np.asarray(self.grad_sq, dtype=np.float64)
        if np.any(g2 <= 0) or not np.all(np.isfinite(g2)):
            raise ConfigInvalid("grad_sq entries must be positive and finite")
        if g2.ndim == 1 and g2.size != eta.size:
            raise ConfigInvalid("grad_sq sequence length must match multipliers")
        return self


def _grad_sq_array(inp: BoundInput) -> np.ndarray:
    g2 = np.asarray(inp.grad_sq, dtype=np.float64)
    if g2.ndim == 0:
        return np.full(len(inp.multipliers), float(g2))
    return g2


def anytime_bound(inp: BoundInput, t: int) -> float:
    """Loss bound at step t for an averaged-iterate method under the
    given schedule.

    bound(t) = (D^2 + gamma^2 sum_{i<=t} eta_i^2 G_i^2) / (2 gamma etabar_t)
             + (gamma/2) sum_{k=1}^{t-1} (eta_k / sum_{i=k+1}^t eta_i)
               * (sum_{i=k}^t eta_i^2 G_i^2) / (sum_{i=k}^t eta_i)

    with etabar_t the prefix sum of multipliers. Invariant under the
    rescaling eta -> eta/s, gamma -> s*gamma.
    """
    inp.validate()
    eta_all = np.asarray(inp.multipliers, dtype=np.float64)
    if not 1 <= t <= eta_all.size:
        raise ConfigInvalid(f"bound step {t} outside 1..{eta_all.size}")
    eta = eta_all[:t]
    g2 = _grad_sq_array(inp)[:t]
    gamma = inp.peak

    P1 = np.concatenate(([0.0], np.cumsum(eta)))  # P1[j] = sum_{i<=j} eta_i
    P2 = np.concatenate(([0.0], np.cumsum(eta * eta * g2)))
    if P1[t] == 0.0:
        raise ConfigInvalid("bound undefined: schedule multipliers sum to zero")

    term1 = (inp.D**2 + gamma**2 * P2[t]) / (2.0 * gamma * P1[t])
    if t == 1:
        return float(term1)

    k = np.arange(1, t)
    suffix_from_next = P1[t] - P1[k]  # sum_{i=k+1}^t eta_i
    suffix_from_k = P1[t] - P1[k - 1]  # sum_{i=k}^t eta_i
    if np.any(suffix_from_next == 0.0):
        raise ConfigInvalid(
            "bound undefined where trailing multipliers vanish; sample "
            "decay-to-zero schedules with bound_grid_multipliers"
        )
    sq_suffix = P2[t] - P2[k - 1]  # sum_{i=k}^t eta_i^2 G_i^2
    term2 = 0.5 * gamma * float(
        np.sum(eta[k - 1] / suffix_from_next * (sq_suffix / suffix_from_k))
    )
    return float(term1 + term2)


def bound_curve(inp: BoundInput) -> np.ndarray:
    """anytime_bound evaluated at every step 1..T (O(T^2) total)."""
    return np.array([anytime_bound(inp, t) for t in range(1, len(inp.multipliers) + 1)])


def weight_objective(weights: np.ndarray, grad_sq: np.ndarray, D: float) -> float:
    """Averaged-iterate bound objective (D^2 + sum w_i^2 G_i^2) / (2 sum w_i)."""
    w = np.asarray(weights, dtype=np.float64)
    g2 = np.asarray(grad_sq, dtype=np.float64)
    return float((D * D + np.sum(w * w * g2)) / (2.0 * np.sum(w)))


def optimal_weights(grad_sq_norms: np.ndarray, D: float = 1.0) -> np.ndarray:
    """Per-step weights minimizing weight_objective on the simplex.

    The minimizer is proportional to the inverse squared gradient norms;
    D shifts the objective value but not the optimal direction.
    """
    g2 = np.asarray(grad_sq_norms, dtype=np.float64)
    if g2.size == 0 or np.any(g2 <= 0) or not np.all(np.isfinite(g2)):
        raise ConfigInvalid("gradient squared norms must be positive and finite")
    w = 1.0 / g2
    return w / np.sum(w)


# ------------------------------------------------------------ optimizers

BASELINE_MODES = ("adamw", "adamc", "adamc-full")


@dataclass(frozen=True)
class BaselineConfig:
    mode: str
    schedule: Schedule
    weight_decay: float = 0.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    epsilon: float = 1e-8
    clip_norm: Optional[float] = None

    def validate(self) -> "BaselineConfig":
        if self.mode not in BASELINE_MODES:
            raise ConfigInvalid(
                f"unknown baseline mode {self.mode!r}; expected one of {BASELINE_MODES}"
            )
        self.schedule.validate()
        if self.weight_decay < 0:
            raise ConfigInvalid("weight_decay must be nonnegative")
        for name in ("adam_beta1", "adam_beta2"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ConfigInvalid(f"{name} must lie in [0, 1)")
        if self.epsilon <= 0:
            raise ConfigInvalid("epsilon must be positive")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ConfigInvalid("clip_norm must be positive when set")
        return self


class BaselineDiagnostics(NamedTuple):
    t: int
    lr: float
    grad_l1: float
    grad_l2: float
    norm_w: float


class BaselineAdam:
    """Scheduled Adam with one of the three decay couplings.

    Exposes the same gradient_point/model_point/step surface as the
    schedule-free optimizer so the run loop is oblivious to which family
    it is driving (here both points are just the current parameters).
    """

    def __init__(self, theta0: np.ndarray, cfg: BaselineConfig):
        self.cfg = cfg.validate()
        self.w = np.array(theta0, dtype=np.float64, copy=True).ravel()
        if not np.all(np.isfinite(self.w)):
            raise ConfigInvalid("initial parameters must be finite")
        self.m = np.zeros_like(self.w)
        self.v = np.zeros_like(self.w)
        self.t = 0
        self.lr_max = 0.0

    def gradient_point(self) -> np.ndarray:
        return self.w

    def model_point(self) -> np.ndarray:
        return self.w

    def step(self, g: np.ndarray) -> BaselineDiagnostics:
        cfg = self.cfg
        s = self.t + 1
        g = np.asarray(g, dtype=np.float64).ravel()
        if g.shape != self.w.shape:
            raise ConfigInvalid(
                f"gradient dimension {g.shape[0]} != parameter dimension {self.w.shape[0]}"
            )
        if not np.all(np.isfinite(g)):
            raise NonFiniteParameter(f"non-finite gradient at step {s}")
        g = clip_gradient(g, cfg.clip_norm)

        lr = schedule_value(cfg.schedule, s)
        self.lr_max = max(self.lr_max, lr)
        if cfg.mode == "adamw":
            decay = lr * cfg.weight_decay
        elif cfg.mode == "adamc":
            decay = lr * lr / self.lr_max * cfg.weight_decay
        else:  # adamc-full
            decay = lr * lr * cfg.weight_decay

        self.m = cfg.adam_beta1 * self.m + (1.0 - cfg.adam_beta1) * g
        self.v = cfg.adam_beta2 * self.v + (1.0 - cfg.adam_beta2) * (g * g)
        m_hat = self.m / (1.0 - cfg.adam_beta1**s)
        v_hat = self.v / (1.0 - cfg.adam_beta2**s)
        # Both the ratio step and the decay read the pre-step parameters.
        self.w = self.w - lr * (m_hat / (np.sqrt(v_hat) + cfg.epsilon)) - decay * self.w
        if not np.all(np.isfinite(self.w)):
            raise NonFiniteParameter(f"parameters became non-finite at step {s}")
        self.t = s
        return BaselineDiagnostics(
            t=s,
            lr=lr,
            grad_l1=float(np.sum(np.abs(g))),
            grad_l2=float(np.linalg.norm(g)),
            norm_w=float(np.linalg.norm(self.w)),
        )

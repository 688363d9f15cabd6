"""Schedule-free optimizer core.

Maintains three coupled sequences over a flat parameter vector: the base
iterates z (which take the actual gradient steps), their online weighted
average x (the model you evaluate and ship), and the gradient query point
y, an interpolation between the two. Step sizes come either from a Polyak
rule driven by the loss value at y, or from a fixed base rate, optionally
rescaled by a running estimate of the gradient L1 norm. Weight decay is
fully decoupled: the decay term is scaled by the squared effective step
size, which keeps the gradient-to-weight norm ratio independent of the
learning rate at steady state.

All arithmetic is float64. One `SfState` instance per run; `sf_step`
mutates it in place and returns per-step diagnostics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigInvalid, DenominatorZero, NonFiniteParameter

# E|N(0,1)| = sqrt(2/pi); the reciprocal converts an L1 norm into the
# sum-of-squares scale used by the Polyak denominator.
L1_TO_L2_FACTOR = math.sqrt(math.pi / 2.0)


@dataclass
class HyperConfig:
    """Every knob of the update rule.

    ``base_lr=None`` selects the Polyak step size. With ``base_lr`` set,
    ``l1_scaling=True`` divides it by the bias-corrected gradient L1 EMA
    (same denominator the Polyak rule uses); otherwise the rate is used
    as-is. The warmup multiplier ramps 1/warmup_steps -> 1 and multiplies
    whichever scalar is in effect.
    """

    warmup_steps: int = 0
    base_lr: Optional[float] = None
    l1_scaling: bool = False
    weight_decay: float = 0.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    epsilon: float = 1e-8
    r: float = 1.0
    p: float = 2.0
    c_warmup: int = 0
    sf_beta: float = 0.9
    sf_beta_max: float = 0.965
    anneal_steps: int = 0
    polyak_ema: float = 0.9
    f_star: float = 0.0
    numerator_ema: Optional[float] = None
    refinement_C: Optional[float] = None
    clip_norm: Optional[float] = None

    def validate(self) -> "HyperConfig":
        def bad(msg: str) -> ConfigInvalid:
            return ConfigInvalid(f"invalid hyperparameters: {msg}")

        if self.warmup_steps < 0 or self.c_warmup < 0 or self.anneal_steps < 0:
            raise bad("step counts must be nonnegative")
        if self.base_lr is not None and self.base_lr <= 0:
            raise bad("base_lr must be positive when set")
        if self.l1_scaling and self.base_lr is None:
            raise bad("l1_scaling requires a fixed base_lr")
        if self.weight_decay < 0:
            raise bad("weight_decay must be nonnegative")
        for name in ("adam_beta1", "adam_beta2", "polyak_ema"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise bad(f"{name} must lie in [0, 1)")
        if self.epsilon <= 0:
            raise bad("epsilon must be positive")
        if self.r < 0 or self.p < 0:
            raise bad("averaging powers r and p must be nonnegative")
        # sf_beta = 0 is the pure-z endpoint (no averaging feedback into y)
        # and must stay legal; 1 would freeze y at x forever.
        for name in ("sf_beta", "sf_beta_max"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise bad(f"{name} must lie in [0, 1)")
        if self.anneal_steps > 0 and self.sf_beta > self.sf_beta_max:
            raise bad("sf_beta must not exceed sf_beta_max when annealing")
        if self.numerator_ema is not None and not 0.0 <= self.numerator_ema < 1.0:
            raise bad("numerator_ema must lie in [0, 1) when set")
        if self.refinement_C is not None and self.refinement_C <= 0:
            raise bad("refinement_C must be positive when set")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise bad("clip_norm must be positive when set")
        return self


@dataclass
class SfState:
    """Mutable per-run optimizer state.

    ``t`` counts completed steps. ``beta_last`` caches the interpolation
    coefficient used to form the current query point, so y never needs to
    be stored. ``e`` is the gradient L1 EMA (Polyak denominator before
    bias correction), ``ne`` the optional numerator EMA, ``W`` the running
    averaging weight sum, ``gamma_max`` the largest effective step size
    seen so far (seeded with epsilon so the averaging weights are nonzero
    before the first real step).
    """

    z: np.ndarray
    x: np.ndarray
    m: np.ndarray
    v: np.ndarray
    e: float = 0.0
    ne: float = 0.0
    W: float = 0.0
    gamma_max: float = 0.0
    t: int = 0
    beta_last: float = 0.0


class StepDiagnostics(NamedTuple):
    """Scalar record of one step, in the order the quantities are formed."""

    t: int
    tau: float
    beta_tilde: float
    loss_at_y: float
    grad_l1: float
    grad_l2: float
    inner_correction: float
    eta: float
    alpha: float
    c: float
    w: float
    gamma_max: float
    norm_x: float
    norm_y: float
    norm_z: float


class PolyakResult(NamedTuple):
    eta: float
    e_next: float
    ne_next: float
    l1: float
    inner_correction: float
    numerator: float


def init_state(theta0: np.ndarray, cfg: HyperConfig) -> SfState:
    """Start a run at theta0 with x = z = theta0 and zeroed moments."""
    z = np.array(theta0, dtype=np.float64, copy=True).ravel()
    if not np.all(np.isfinite(z)):
        raise ConfigInvalid("initial parameters must be finite")
    return SfState(
        z=z,
        x=z.copy(),
        m=np.zeros_like(z),
        v=np.zeros_like(z),
        gamma_max=cfg.epsilon,
        beta_last=cfg.sf_beta,
    )


def anneal_beta(cfg: HyperConfig, t: int) -> float:
    """Interpolation coefficient for step t, annealed log-linearly.

    Runs (1 - beta) from (1 - sf_beta) down to (1 - sf_beta_max)
    geometrically over anneal_steps, then holds. Disabled (constant
    sf_beta) when anneal_steps = 0.
    """
    if cfg.anneal_steps <= 0:
        return cfg.sf_beta
    tau = min(t / cfg.anneal_steps, 1.0)
    # Exact at the endpoints; the exp/log round trip would be a ulp off.
    if tau == 0.0:
        return cfg.sf_beta
    if tau == 1.0:
        return cfg.sf_beta_max
    # la + tau*(lb - la) rather than (1-tau)*la + tau*lb: this form is
    # monotone in tau even in floating point. The clamp pins rounding
    # overshoot back into the closed interval between the endpoints.
    la = math.log1p(-cfg.sf_beta)
    lb = math.log1p(-cfg.sf_beta_max)
    val = 1.0 - math.exp(la + tau * (lb - la))
    return min(max(val, cfg.sf_beta), cfg.sf_beta_max)


def anneal_tau(cfg: HyperConfig, t: int) -> float:
    """Anneal progress in [0, 1]; 0 when annealing is disabled."""
    if cfg.anneal_steps <= 0:
        return 0.0
    return min(t / cfg.anneal_steps, 1.0)


def warmup_multiplier(cfg: HyperConfig, t: int) -> float:
    """Linear multiplicative warmup: t/warmup_steps capped at 1."""
    if cfg.warmup_steps <= 0:
        return 1.0
    return min(t / cfg.warmup_steps, 1.0)


def clip_gradient(g: np.ndarray, clip_norm: Optional[float]) -> np.ndarray:
    """Scale g down to global L2 norm clip_norm if it exceeds it."""
    if clip_norm is None:
        return g
    norm = float(np.linalg.norm(g))
    if norm > clip_norm:
        return g * (clip_norm / norm)
    return g


def l1_denominator_pair(
    g: np.ndarray, v: np.ndarray, epsilon: float = 1e-8
) -> tuple[float, float]:
    """Exact and L1-approximated step-size denominators, side by side.

    exact = sum_i g_i^2 / sqrt(v_i) (zero v entries guarded by epsilon),
    approx = sqrt(pi/2) * ||g||_1. The two agree in expectation when g is
    Gaussian with per-coordinate variance v.
    """
    g = np.asarray(g, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    denom = np.sqrt(v)
    denom[denom == 0.0] = epsilon
    exact = float(np.sum(g * g / denom))
    approx = L1_TO_L2_FACTOR * float(np.sum(np.abs(g)))
    return exact, approx


def polyak_scalar(
    cfg: HyperConfig,
    state: SfState,
    F_t: float,
    g: np.ndarray,
    z_minus_x: np.ndarray,
    beta_tilde: float,
) -> PolyakResult:
    """Polyak step-size scalar for the step currently being taken.

    numerator = F_t - f_star + beta_tilde * <g, z - x>; the inner-product
    term converts the loss measured at the query point into an estimate of
    the loss at z, which is the quantity the base iterates actually
    control. Denominator is the bias-corrected EMA of sqrt(pi/2)*||g||_1.
    Optionally the numerator is EMA-smoothed too (same bias correction)
    before the clamp at zero. Does not mutate state; the caller commits
    e_next / ne_next.
    """
    s = state.t + 1
    l1 = float(np.sum(np.abs(g)))
    inner = beta_tilde * float(np.dot(g, z_minus_x))
    e_next = cfg.polyak_ema * state.e + (1.0 - cfg.polyak_ema) * l1 * L1_TO_L2_FACTOR
    e_hat = e_next / (1.0 - cfg.polyak_ema**s)
    numerator = F_t - cfg.f_star + inner
    ne_next = state.ne
    if cfg.numerator_ema is not None:
        b = cfg.numerator_ema
        ne_next = b * state.ne + (1.0 - b) * numerator
        numerator = ne_next / (1.0 - b**s)
    if e_hat == 0.0:
        raise DenominatorZero("gradient L1 EMA is zero (zero gradient at step 1)")
    eta = max(0.0, numerator) / e_hat
    return PolyakResult(eta, e_next, ne_next, l1, inner, numerator)


def averaging_coeff(
    cfg: HyperConfig, state: SfState, alpha_t: float
) -> tuple[float, float]:
    """Averaging coefficient c_t and raw weight w_t for the current step.

    Called mid-step: gamma_max has already absorbed alpha_t but t has not
    advanced. During c-warmup, c = 1 and the weight sum W is left alone,
    so warmup iterates carry no weight in the final average. With
    refinement_C set, c follows the closed form (1 - beta_tilde) * C /
    (t + 1) clamped to 1. Otherwise w_t = t^r * gamma_max^p accumulates
    into W and c = w_t / W. Mutates state.W in the accumulating branch
    only.
    """
    s = state.t + 1
    if s <= cfg.c_warmup:
        return 1.0, 0.0
    if cfg.refinement_C is not None:
        beta_tilde = anneal_beta(cfg, s)
        c = min(1.0, (1.0 - beta_tilde) * cfg.refinement_C / (s + 1))
        return c, 0.0
    try:
        w = float(s) ** cfg.r * state.gamma_max**cfg.p
    except OverflowError:
        # gamma_max this large means the iterates are blowing up; report it
        # as divergence rather than crashing mid-step.
        raise NonFiniteParameter(f"averaging weight overflowed at step {s}") from None
    state.W += w
    return w / state.W, w


def eval_point(state: SfState) -> np.ndarray:
    """The query point y where the next gradient must be evaluated.

    Mathematically a convex combination of x and z; the clip enforces the
    coordinate-wise bounds exactly against rounding overshoot (at most one
    ulp, so it never moves the point materially).
    """
    b = state.beta_last
    y = b * state.x + (1.0 - b) * state.z
    return np.clip(y, np.minimum(state.x, state.z), np.maximum(state.x, state.z))


def model_point(state: SfState) -> np.ndarray:
    """The averaged iterate x: the point to evaluate, report, and ship."""
    return state.x


def sf_step(
    state: SfState, cfg: HyperConfig, g: np.ndarray, F_t: float
) -> tuple[SfState, StepDiagnostics]:
    """Advance one step given the gradient and loss measured at eval_point.

    Order of operations: clip, anneal the interpolation coefficient, form
    the step-size scalar, update gamma_max, pick the averaging
    coefficient, apply weight decay at the old query point, take the
    moment-corrected ratio step on z, fold z into the average x, cache
    the coefficient defining the new query point.
    """
    s = state.t + 1
    g = np.asarray(g, dtype=np.float64).ravel()
    if g.shape != state.z.shape:
        raise ConfigInvalid(
            f"gradient dimension {g.shape[0]} != parameter dimension {state.z.shape[0]}"
        )
    if not np.all(np.isfinite(g)) or not math.isfinite(F_t):
        raise NonFiniteParameter(f"non-finite gradient or loss at step {s}")
    g = clip_gradient(g, cfg.clip_norm)

    tau = anneal_tau(cfg, s)
    beta_tilde = anneal_beta(cfg, s)
    # Same point the caller evaluated g and F at.
    y_prev = eval_point(state)
    gamma_t = warmup_multiplier(cfg, s)

    z_minus_x = state.z - state.x
    l1 = float(np.sum(np.abs(g)))
    inner = beta_tilde * float(np.dot(g, z_minus_x))
    # The L1 EMA advances in every mode so diagnostics stay comparable;
    # only the Polyak and l1_scaling modes consume it.
    e_next = cfg.polyak_ema * state.e + (1.0 - cfg.polyak_ema) * l1 * L1_TO_L2_FACTOR
    e_hat = e_next / (1.0 - cfg.polyak_ema**s)

    if cfg.base_lr is None:
        try:
            pr = polyak_scalar(cfg, state, F_t, g, z_minus_x, beta_tilde)
            eta, state.ne = pr.eta, pr.ne_next
        except DenominatorZero:
            warnings.warn("zero gradient at step 1; taking a zero-length step")
            eta = 0.0
    elif cfg.l1_scaling:
        if e_hat == 0.0:
            warnings.warn("zero gradient at step 1; taking a zero-length step")
            eta = 0.0
        else:
            eta = cfg.base_lr / e_hat
    else:
        eta = cfg.base_lr
    state.e = e_next

    alpha = gamma_t * eta
    state.gamma_max = max(alpha, state.gamma_max)
    c, w = averaging_coeff(cfg, state, alpha)

    if cfg.weight_decay > 0.0:
        state.z -= (alpha * alpha * cfg.weight_decay) * y_prev
    state.m = cfg.adam_beta1 * state.m + (1.0 - cfg.adam_beta1) * g
    state.v = cfg.adam_beta2 * state.v + (1.0 - cfg.adam_beta2) * (g * g)
    m_hat = state.m / (1.0 - cfg.adam_beta1**s)
    v_hat = state.v / (1.0 - cfg.adam_beta2**s)
    state.z -= alpha * (m_hat / (np.sqrt(v_hat) + cfg.epsilon))

    if c == 1.0:
        state.x = state.z.copy()
    else:
        state.x = (1.0 - c) * state.x + c * state.z

    if not np.all(np.isfinite(state.z)) or not np.all(np.isfinite(state.x)):
        raise NonFiniteParameter(f"parameters became non-finite at step {s}")

    state.beta_last = beta_tilde
    state.t = s
    y_new = beta_tilde * state.x + (1.0 - beta_tilde) * state.z
    diag = StepDiagnostics(
        t=s,
        tau=tau,
        beta_tilde=beta_tilde,
        loss_at_y=F_t,
        grad_l1=l1,
        grad_l2=float(np.linalg.norm(g)),
        inner_correction=inner,
        eta=eta,
        alpha=alpha,
        c=c,
        w=w,
        gamma_max=state.gamma_max,
        norm_x=float(np.linalg.norm(state.x)),
        norm_y=float(np.linalg.norm(y_new)),
        norm_z=float(np.linalg.norm(state.z)),
    )
    return state, diag


class ScheduleFreePlus:
    """Convenience wrapper tying a config to a state.

    >>> opt = ScheduleFreePlus(theta0, HyperConfig())
    >>> g, F = oracle(opt.gradient_point())
    >>> opt.step(g, F)
    """

    def __init__(self, theta0: np.ndarray, cfg: HyperConfig):
        self.cfg = cfg.validate()
        self.state = init_state(theta0, cfg)

    def gradient_point(self) -> np.ndarray:
        return eval_point(self.state)

    def model_point(self) -> np.ndarray:
        return model_point(self.state)

    def step(self, g: np.ndarray, F_t: float) -> StepDiagnostics:
        _, diag = sf_step(self.state, self.cfg, g, F_t)
        return diag

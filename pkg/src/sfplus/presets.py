"""Named run and sweep configurations.

Each run preset is a complete config mapping: problem, optimizer, step
counts, logging cadence, and seed. The tpp-suffixed presets transcribe
published training recipes (warmup length, beta annealing endpoints, the
averaging time power r, decay strength) onto desk-scale problems and step
counts. Sweep presets wrap a base run config with a cartesian grid of
dotted-key overrides.

Accessors deep-copy so callers can mutate freely.
"""

import copy

from .errors import ConfigInvalid

PRESETS: dict = {
    # Generic starting point: Polyak step size, no decay, short warmups.
    # On a deterministic strongly-convex quadratic this reaches 1e-6 of
    # the initial loss well inside 5000 steps.
    "default": {
        "problem": {
            "kind": "quadratic",
            "params": {"d": 100, "condition_number": 100.0, "noise_std": 0.1},
            "seed": 0,
        },
        "optimizer": {
            "kind": "sfplus",
            "warmup_steps": 50,
            "c_warmup": 100,
            "sf_beta": 0.9,
            "adam_beta1": 0.9,
            "adam_beta2": 0.999,
            "r": 1.0,
            "p": 2.0,
            "weight_decay": 0.0,
        },
        "total_steps": 5000,
        "batch_size": 1,
        "log_every": 10,
        "eval_every": 10,
        "seed": 1,
    },
    # Long-run recipe: warmup 400, beta annealed 0.8 -> 0.965 over the
    # whole run, r = 1, strong fully-decoupled decay, clipping at 1.
    "sfplus-1000tpp": {
        "problem": {
            "kind": "normalized_mlp",
            "params": {"width": 32, "depth": 2, "d_in": 8, "n_samples": 256},
            "seed": 0,
        },
        "optimizer": {
            "kind": "sfplus",
            "warmup_steps": 400,
            "c_warmup": 800,
            "sf_beta": 0.8,
            "sf_beta_max": 0.965,
            "anneal_steps": 4000,
            "r": 1.0,
            "p": 2.0,
            "weight_decay": 20.0,
            "clip_norm": 1.0,
        },
        "total_steps": 4000,
        "batch_size": 32,
        "log_every": 10,
        "eval_every": 10,
        "seed": 1,
    },
    # Short-run recipe: fixed beta 0.9 (annealing off), flat time
    # weighting r = 0, milder decay.
    "sfplus-100tpp": {
        "problem": {
            "kind": "normalized_mlp",
            "params": {"width": 32, "depth": 2, "d_in": 8, "n_samples": 256},
            "seed": 0,
        },
        "optimizer": {
            "kind": "sfplus",
            "warmup_steps": 400,
            "c_warmup": 800,
            "sf_beta": 0.9,
            "r": 0.0,
            "p": 2.0,
            "weight_decay": 5.0,
            "clip_norm": 1.0,
        },
        "total_steps": 3000,
        "batch_size": 32,
        "log_every": 10,
        "eval_every": 10,
        "seed": 1,
    },
    # Polyak step size on the L1 valley; the matched fixed-rate runs live
    # in the polyak-vs-grid sweep.
    "polyak-valley": {
        "problem": {"kind": "nonsmooth_valley", "params": {"d": 50}, "seed": 0},
        "optimizer": {
            "kind": "sfplus",
            "warmup_steps": 781,
            "c_warmup": 781,
            "sf_beta": 0.9,
            "r": 1.0,
            "p": 2.0,
            "weight_decay": 0.0,
        },
        "total_steps": 20000,
        "batch_size": None,
        "log_every": 20,
        "eval_every": 20,
        "seed": 1,
    },
    # Same valley run with a fixed rate rescaled by the gradient L1 EMA;
    # base_lr is the knob the grid search multiplies.
    "l1-valley": {
        "problem": {"kind": "nonsmooth_valley", "params": {"d": 50}, "seed": 0},
        "optimizer": {
            "kind": "sf",
            "base_lr": 1.0,
            "l1_scaling": True,
            "warmup_steps": 781,
            "c_warmup": 781,
            "sf_beta": 0.9,
            "r": 1.0,
            "p": 2.0,
            "weight_decay": 0.0,
        },
        "total_steps": 20000,
        "batch_size": None,
        "log_every": 20,
        "eval_every": 20,
        "seed": 1,
    },
    # Averaging-delay demo: c pinned to 1 for twice the lr warmup. Runs
    # with c_warmup 0 drag the early descent iterates along in the
    # average and land at a worse final loss; the delayed run shows the
    # characteristic transient hump just after averaging begins. f_star
    # is a precomputed lower bound on this problem instance's optimum
    # (L-BFGS full-batch value 0.40157), which the Polyak numerator
    # needs because the loss floor here is far from zero.
    "c-warmup-demo": {
        "problem": {
            "kind": "logistic_synthetic",
            "params": {"d": 50, "n_samples": 512},
            "seed": 0,
        },
        "optimizer": {
            "kind": "sfplus",
            "warmup_steps": 100,
            "c_warmup": 200,
            "sf_beta": 0.9,
            "r": 0.0,
            "p": 2.0,
            "weight_decay": 0.0,
            "f_star": 0.4015,
        },
        "total_steps": 400,
        "batch_size": 64,
        # Per-step cadence: the averaging-onset transient is a few steps
        # wide and coarser sampling blunts it.
        "log_every": 1,
        "eval_every": 1,
        "seed": 3,
    },
    # Long fixed-rate valley run whose training loss settles onto an
    # oscillation floor; the early-window curve fit extrapolates the
    # rest of the run closely. beta1 = 0 keeps the floor fluctuations
    # small enough for a tight prediction.
    "valley-fit": {
        "problem": {"kind": "nonsmooth_valley", "params": {"d": 50}, "seed": 0},
        "optimizer": {
            "kind": "sf",
            "base_lr": 0.005,
            "warmup_steps": 250,
            "c_warmup": 500,
            "sf_beta": 0.9,
            "adam_beta1": 0.0,
            "r": 1.0,
            "p": 2.0,
            "weight_decay": 0.0,
        },
        "total_steps": 50000,
        "batch_size": None,
        "log_every": 10,
        "eval_every": 50,
        "seed": 1,
    },
    # Fully-decoupled decay steady state: minibatch noise keeps the
    # gradient-to-weight ratio pinned near sqrt(2*lambda). beta1 = 0 and a
    # large epsilon keep the update proportional to the raw gradient,
    # which is the regime the ratio prediction describes.
    "steady-state": {
        "problem": {
            "kind": "normalized_mlp",
            "params": {"width": 64, "depth": 2, "d_in": 8, "n_samples": 256},
            "seed": 0,
        },
        "optimizer": {
            "kind": "adamc-full",
            "weight_decay": 5.0,
            "adam_beta1": 0.0,
            "adam_beta2": 0.999,
            "epsilon": 1.0,
        },
        "schedule": {"kind": "constant", "peak_lr": 0.02, "warmup_steps": 100},
        "total_steps": 10000,
        "batch_size": 32,
        "log_every": 10,
        "eval_every": 100,
        "seed": 1,
    },
}

SWEEPS: dict = {
    # Fixed-rate grid the Polyak run is compared against.
    "polyak-vs-grid": {
        "base": "l1-valley",
        "axes": {"optimizer.base_lr": [0.5, 1.0, 2.0, 4.0]},
    },
    # Momentum widens the stable step-size range under gradient noise:
    # without it the training loss blows past its starting value around
    # base_lr 12.8 on this problem, with it the same rates stay tame.
    "momentum-stability": {
        "base": {
            "problem": {
                "kind": "quadratic",
                "params": {"d": 20, "condition_number": 10.0, "noise_std": 1.0},
                "seed": 0,
            },
            "optimizer": {
                "kind": "sf",
                "base_lr": 0.05,
                "warmup_steps": 20,
                "c_warmup": 40,
                "sf_beta": 0.9,
                "weight_decay": 0.0,
            },
            "total_steps": 2000,
            "batch_size": 1,
            "log_every": 10,
            "eval_every": 10,
            "seed": 3,
        },
        "axes": {
            "optimizer.adam_beta1": [0.0, 0.9],
            "optimizer.base_lr": [1.6, 6.4, 12.8, 25.6],
        },
    },
}


def get_preset(name: str) -> dict:
    """Return a deep copy of the named run preset."""
    if name not in PRESETS:
        raise ConfigInvalid(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return copy.deepcopy(PRESETS[name])


def get_sweep(name: str) -> dict:
    """Return a deep copy of the named sweep preset."""
    if name not in SWEEPS:
        raise ConfigInvalid(
            f"unknown sweep preset {name!r}; available: {', '.join(sorted(SWEEPS))}"
        )
    return copy.deepcopy(SWEEPS[name])


def describe_presets() -> list:
    """Rows for `presets list`: (name, kind, one-line summary)."""
    rows = []
    for name, cfg in sorted(PRESETS.items()):
        opt = cfg["optimizer"]["kind"]
        prob = cfg["problem"]["kind"]
        rows.append((name, "run", f"{opt} on {prob}, {cfg['total_steps']} steps"))
    for name, sweep in sorted(SWEEPS.items()):
        base = sweep["base"] if isinstance(sweep["base"], str) else "inline config"
        axes = ", ".join(sweep["axes"])
        rows.append((name, "sweep", f"base {base}; axes: {axes}"))
    return rows

"""Run execution, sweeps, and the file-format layer behind the CLI.

A run config is a plain nested mapping (YAML on disk). The loop asks the
optimizer for its gradient query point, draws a per-step minibatch seeded
by (run seed, step), steps, and logs a fixed-schema CSV row every
log_every steps. The model-point loss is a full-batch evaluation refreshed
every eval_every steps and carried forward between refreshes so every row
has a value.

All floats in CSVs are written with 17 significant digits; summaries are
JSON. Given (config, seed), every emitted byte is reproducible except the
wallclock column, which the normalize_wallclock flag pins to zero.
"""

from __future__ import annotations

import copy
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from .analysis import ema_smooth, extrapolate, fit_inverse_sqrt
from .baselines import (
    BaselineAdam,
    BaselineConfig,
    BoundInput,
    Schedule,
    anytime_bound,
    bound_grid_multipliers,
)
from .errors import ConfigInvalid, Diverged, MissingColumn, OutputUnwritable
from .problems import make_problem
from .presets import get_preset, get_sweep
from .sfcore import HyperConfig, ScheduleFreePlus

CSV_COLUMNS = (
    "step",
    "loss_at_x",
    "loss_at_y",
    "grad_l1",
    "grad_l2",
    "eta_t",
    "alpha_t",
    "c_t",
    "beta_tilde",
    "norm_x",
    "norm_y",
    "norm_z",
    "wallclock_ms",
)

SF_KINDS = ("sfplus", "sf")
BASELINE_KINDS = ("adamw", "adamc", "adamc-full")

_RUN_KEYS = {
    "name",
    "problem",
    "optimizer",
    "schedule",
    "total_steps",
    "batch_size",
    "log_every",
    "eval_every",
    "seed",
    "out",
    "normalize_wallclock",
    "plots",
}


def fmt(value: float) -> str:
    """CSV float formatting: 17 significant digits round-trip exactly."""
    return format(float(value), ".17g")


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


# ------------------------------------------------------------- config


def load_config(source: Union[str, Path]) -> dict:
    """Load a run config from a YAML file path or a preset name."""
    path = Path(source)
    if path.is_file():
        try:
            loaded = yaml.safe_load(path.read_text())
        except yaml.YAMLError as ex:
            raise ConfigInvalid(f"could not parse {path}: {ex}") from ex
        if not isinstance(loaded, dict):
            raise ConfigInvalid(f"{path} must contain a mapping")
        return loaded
    return get_preset(str(source))


def _set_path(cfg: dict, dotted: str, value) -> None:
    parts = [p for p in dotted.strip().split(".") if p]
    if not parts:
        raise ConfigInvalid(f"override key {dotted!r} is empty")
    node = cfg
    for part in parts[:-1]:
        nxt = node.get(part)
        if nxt is None:
            nxt = node[part] = {}
        if not isinstance(nxt, dict):
            raise ConfigInvalid(f"override {dotted!r} descends into non-mapping")
        node = nxt
    node[parts[-1]] = value


def apply_overrides(cfg: dict, overrides: list) -> dict:
    """Apply repeated --set key=value entries with dotted paths.

    Values parse as YAML scalars, so `--set optimizer.base_lr=0.5` yields
    a float and `--set batch_size=null` clears a field.
    """
    out = copy.deepcopy(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigInvalid(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as ex:
            raise ConfigInvalid(f"override value {raw!r} is not valid YAML: {ex}")
        _set_path(out, key, value)
    return out


def _require(cfg: dict, key: str, types, where: str):
    if key not in cfg:
        raise ConfigInvalid(f"{where}: missing required field '{key}'")
    val = cfg[key]
    tt = types if isinstance(types, tuple) else (types,)
    if not isinstance(val, tt) or (isinstance(val, bool) and bool not in tt):
        raise ConfigInvalid(f"{where}: field '{key}' has wrong type")
    return val


def build_run(cfg: dict):
    """Validate a run config; return (problem, optimizer, normalized cfg)."""
    unknown = set(cfg) - _RUN_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown run config fields: {', '.join(sorted(unknown))}")

    prob_spec = _require(cfg, "problem", dict, "run config")
    p_unknown = set(prob_spec) - {"kind", "params", "seed"}
    if p_unknown:
        raise ConfigInvalid(f"problem: unknown fields: {', '.join(sorted(p_unknown))}")
    kind = _require(prob_spec, "kind", str, "problem")
    params = prob_spec.get("params") or {}
    if not isinstance(params, dict):
        raise ConfigInvalid("problem: 'params' must be a mapping")
    prob_seed = prob_spec.get("seed", 0)
    if kind in ("logistic_synthetic", "normalized_mlp"):
        params = {**params, "seed": prob_seed}
    problem = make_problem(kind, **params)

    total_steps = _require(cfg, "total_steps", int, "run config")
    if total_steps < 1:
        raise ConfigInvalid("total_steps must be >= 1")
    for key, default in (("log_every", 10), ("eval_every", 10)):
        v = cfg.setdefault(key, default)
        if not isinstance(v, int) or v < 1:
            raise ConfigInvalid(f"{key} must be a positive integer")
    batch = cfg.setdefault("batch_size", None)
    if batch is not None and (not isinstance(batch, int) or batch < 1):
        raise ConfigInvalid("batch_size must be null or a positive integer")
    if batch is not None and problem.n_samples is not None and batch > problem.n_samples:
        raise ConfigInvalid(
            f"batch_size {batch} exceeds the problem's {problem.n_samples} samples"
        )
    seed = cfg.setdefault("seed", 0)
    if not isinstance(seed, int):
        raise ConfigInvalid("seed must be an integer")
    cfg.setdefault("normalize_wallclock", False)
    cfg.setdefault("plots", True)

    opt_spec = dict(_require(cfg, "optimizer", dict, "run config"))
    opt_kind = opt_spec.pop("kind", None)
    if opt_kind in SF_KINDS:
        if cfg.get("schedule") is not None:
            raise ConfigInvalid(
                "schedule applies to baseline optimizers; schedule-free kinds "
                "take their knobs under 'optimizer'"
            )
        if opt_kind == "sf" and opt_spec.get("base_lr") is None:
            raise ConfigInvalid("optimizer kind 'sf' requires base_lr")
        hyper_fields = set(HyperConfig.__dataclass_fields__)
        bad = set(opt_spec) - hyper_fields
        if bad:
            raise ConfigInvalid(f"optimizer: unknown fields: {', '.join(sorted(bad))}")
        try:
            hyper = HyperConfig(**opt_spec).validate()
        except TypeError as ex:
            raise ConfigInvalid(f"optimizer: {ex}") from None
        if total_steps < hyper.warmup_steps:
            raise ConfigInvalid("total_steps must cover optimizer warmup_steps")
        optimizer = ScheduleFreePlus(problem.init_point(prob_seed), hyper)
    elif opt_kind in BASELINE_KINDS:
        sched_spec = dict(cfg.get("schedule") or {"kind": "constant"})
        if "kind" not in sched_spec:
            raise ConfigInvalid("schedule requires a 'kind'")
        sched_fields = set(Schedule.__dataclass_fields__)
        bad = set(sched_spec) - sched_fields
        if bad:
            raise ConfigInvalid(f"schedule: unknown fields: {', '.join(sorted(bad))}")
        sched_spec.setdefault("total_steps", total_steps)
        try:
            schedule = Schedule(**sched_spec).validate()
        except TypeError as ex:
            raise ConfigInvalid(f"schedule: {ex}") from None
        if total_steps < schedule.warmup_steps:
            raise ConfigInvalid("total_steps must cover schedule warmup_steps")
        base_fields = set(BaselineConfig.__dataclass_fields__) - {"mode", "schedule"}
        bad = set(opt_spec) - base_fields
        if bad:
            raise ConfigInvalid(f"optimizer: unknown fields: {', '.join(sorted(bad))}")
        try:
            bcfg = BaselineConfig(mode=opt_kind, schedule=schedule, **opt_spec).validate()
        except TypeError as ex:
            raise ConfigInvalid(f"optimizer: {ex}") from None
        optimizer = BaselineAdam(problem.init_point(prob_seed), bcfg)
    else:
        raise ConfigInvalid(
            f"optimizer kind must be one of {SF_KINDS + BASELINE_KINDS}, "
            f"got {opt_kind!r}"
        )
    cfg["optimizer"] = {"kind": opt_kind, **opt_spec}
    return problem, optimizer, cfg


def _sf_row(diag, loss_x, wall):
    return (
        diag.t,
        loss_x,
        diag.loss_at_y,
        diag.grad_l1,
        diag.grad_l2,
        diag.eta,
        diag.alpha,
        diag.c,
        diag.beta_tilde,
        diag.norm_x,
        diag.norm_y,
        diag.norm_z,
        wall,
    )


def _baseline_row(diag, loss_x, loss_y, peak_lr, wall):
    mult = diag.lr / peak_lr if peak_lr > 0 else 0.0
    return (
        diag.t,
        loss_x,
        loss_y,
        diag.grad_l1,
        diag.grad_l2,
        mult,
        diag.lr,
        1.0,
        0.0,
        diag.norm_w,
        diag.norm_w,
        diag.norm_w,
        wall,
    )


def run(cfg: dict, out_dir: Union[str, Path], quiet: bool = False) -> dict:
    """Execute one run; write log.csv and summary.json under out_dir."""
    cfg = copy.deepcopy(cfg)
    problem, optimizer, cfg = build_run(cfg)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        log_path = out / "log.csv"
        fh = log_path.open("w")
    except OSError as ex:
        raise OutputUnwritable(f"cannot write to {out}: {ex}") from ex

    total = cfg["total_steps"]
    log_every = cfg["log_every"]
    eval_every = cfg["eval_every"]
    batch = cfg["batch_size"]
    seed = cfg["seed"]
    normalize = cfg["normalize_wallclock"]
    is_sf = isinstance(optimizer, ScheduleFreePlus)
    peak_lr = 1.0 if is_sf else optimizer.cfg.schedule.peak_lr

    initial_loss, _ = problem.oracle(optimizer.model_point())
    start = time.perf_counter()
    diverged = False
    divergence_message = None
    loss_x = initial_loss
    last_F = initial_loss
    steps_done = 0
    last_diag = None

    with fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for t in range(1, total + 1):
            y = optimizer.gradient_point()
            try:
                F, g = problem.oracle(y, seed=[seed, t], batch_size=batch)
                diag = optimizer.step(g, F) if is_sf else optimizer.step(g)
            except Diverged as ex:
                diverged = True
                divergence_message = str(ex)
                break
            steps_done = t
            last_diag = diag
            last_F = F
            if t % eval_every == 0 or t == total:
                loss_x, _ = problem.oracle(optimizer.model_point())
            if t % log_every == 0 or t == total:
                wall = 0.0 if normalize else (time.perf_counter() - start) * 1e3
                row = (
                    _sf_row(diag, loss_x, wall)
                    if is_sf
                    else _baseline_row(diag, loss_x, F, peak_lr, wall)
                )
                fh.write(",".join([str(row[0])] + [fmt(v) for v in row[1:]]) + "\n")
                fh.flush()

    final_x = optimizer.model_point()
    try:
        final_loss_x, _ = problem.oracle(final_x)
    except Exception:
        final_loss_x = float("nan")
    norm_z = (
        float(np.linalg.norm(optimizer.state.z))
        if is_sf
        else float(np.linalg.norm(optimizer.w))
    )
    summary = {
        "name": cfg.get("name"),
        "problem": problem.name,
        "optimizer": cfg["optimizer"]["kind"],
        "total_steps": total,
        "steps_completed": steps_done,
        "diverged": diverged,
        "divergence_message": divergence_message,
        "initial_loss": _json_safe(float(initial_loss)),
        "final_loss_x": _json_safe(float(final_loss_x)),
        "final_loss_y": _json_safe(float(last_F)),
        "terminal_norms": {
            "grad_to_weight": _json_safe(
                last_diag.grad_l2 / norm_z
                if last_diag is not None and norm_z > 0
                else None
            ),
            "norm_x": _json_safe(float(np.linalg.norm(final_x))),
            "norm_z": _json_safe(norm_z),
        },
        "seed": seed,
        "wallclock_ms": 0.0
        if normalize
        else (time.perf_counter() - start) * 1e3,
        "config": cfg,
        "log": str(out / "log.csv"),
    }
    _write_json(out / "summary.json", summary)
    if cfg["plots"]:
        from . import plots

        plots.render_run(out)
    if not quiet:
        print(_run_line(summary))
    return summary


def _run_line(summary: dict) -> str:
    state = "diverged" if summary["diverged"] else "ok"
    fx = summary["final_loss_x"]
    fx_text = "nan" if fx is None else f"{fx:.6g}"
    return (
        f"[{state}] {summary['problem']} / {summary['optimizer']}: "
        f"{summary['steps_completed']}/{summary['total_steps']} steps, "
        f"final loss at x = {fx_text}"
    )


def _write_json(path: Path, payload: dict) -> None:
    try:
        path.write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n")
    except OSError as ex:
        raise OutputUnwritable(f"cannot write {path}: {ex}") from ex
    except ValueError as ex:
        raise OutputUnwritable(f"non-serializable summary for {path}: {ex}") from ex


# -------------------------------------------------------------- sweep


def load_sweep(source: Union[str, Path]) -> dict:
    """Load a sweep spec from a YAML file path or a sweep preset name."""
    path = Path(source)
    if path.is_file():
        try:
            loaded = yaml.safe_load(path.read_text())
        except yaml.YAMLError as ex:
            raise ConfigInvalid(f"could not parse {path}: {ex}") from ex
        if not isinstance(loaded, dict):
            raise ConfigInvalid(f"{path} must contain a mapping")
        return loaded
    return get_sweep(str(source))


def expand_sweep(sweep: dict) -> list:
    """Expand a sweep spec into (slug, run config) members.

    The spec has a `base` (run config mapping or preset name) and `axes`:
    dotted override paths mapped to value lists. Members are the cartesian
    product, enumerated with axis keys in sorted order so the member order
    is independent of spec-file key order.
    """
    unknown = set(sweep) - {"name", "base", "axes", "plots"}
    if unknown:
        raise ConfigInvalid(f"unknown sweep fields: {', '.join(sorted(unknown))}")
    base = sweep.get("base")
    if isinstance(base, str):
        base = get_preset(base)
    if not isinstance(base, dict):
        raise ConfigInvalid("sweep 'base' must be a run config mapping or preset name")
    axes = sweep.get("axes")
    if not isinstance(axes, dict) or not axes:
        raise ConfigInvalid("sweep 'axes' must be a non-empty mapping of value lists")
    keys = sorted(axes)
    for k in keys:
        if not isinstance(axes[k], list) or not axes[k]:
            raise ConfigInvalid(f"sweep axis {k!r} must be a non-empty list")

    members = []
    for idx, values in enumerate(itertools.product(*(axes[k] for k in keys))):
        cfg = copy.deepcopy(base)
        # Members never render plots; the sweep-level comparison plot covers them.
        cfg["plots"] = False
        parts = []
        for key, value in zip(keys, values):
            _set_path(cfg, key, value)
            parts.append(f"{key.split('.')[-1]}={value}")
        slug = f"{idx:03d}-" + "-".join(parts).replace("/", "_")
        cfg["name"] = slug
        members.append((slug, cfg))
    return members


def _sweep_worker(args):
    """Module-level worker so ProcessPoolExecutor can pickle it."""
    slug, cfg, out_dir = args
    try:
        summary = run(cfg, out_dir, quiet=True)
        return slug, summary, None
    except Exception as ex:  # shared-nothing: a member failure is data
        return slug, None, f"{type(ex).__name__}: {ex}"


def sweep(
    spec: dict,
    out_dir: Union[str, Path],
    parallelism: int = 1,
    quiet: bool = False,
) -> dict:
    """Run every sweep member under out_dir/<slug>/ and rank the results.

    Member failures (config errors, divergence-adjacent crashes) are
    captured in the table instead of aborting the sweep. With
    parallelism == 1 members run in-process sequentially and produce CSVs
    byte-identical to any parallel execution.
    """
    members = expand_sweep(spec)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as ex:
        raise OutputUnwritable(f"cannot create {out}: {ex}") from ex

    jobs = [(slug, cfg, out / slug) for slug, cfg in members]
    if parallelism <= 1:
        results = [_sweep_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_sweep_worker, jobs))

    rows = []
    for slug, summary, error in results:
        if error is not None:
            rows.append(
                {"member": slug, "status": "error", "final_loss_x": None,
                 "diverged": None, "detail": error}
            )
        else:
            rows.append(
                {
                    "member": slug,
                    "status": "diverged" if summary["diverged"] else "ok",
                    "final_loss_x": summary["final_loss_x"],
                    "diverged": summary["diverged"],
                    "detail": "",
                }
            )

    def rank_key(row):
        bad = row["status"] != "ok" or row["final_loss_x"] is None
        return (bad, row["final_loss_x"] if not bad else 0.0, row["member"])

    ranked = sorted(rows, key=rank_key)
    table = {"name": spec.get("name"), "members": ranked}
    _write_json(out / "sweep_summary.json", table)
    try:
        with (out / "sweep_table.csv").open("w") as fh:
            fh.write("rank,member,status,final_loss_x,detail\n")
            for rank, row in enumerate(ranked, start=1):
                fx = "" if row["final_loss_x"] is None else fmt(row["final_loss_x"])
                fh.write(
                    f"{rank},{row['member']},{row['status']},{fx},"
                    f"\"{row['detail']}\"\n"
                )
    except OSError as ex:
        raise OutputUnwritable(f"cannot write sweep table: {ex}") from ex
    if spec.get("plots", True):
        from . import plots

        plots.render_sweep(out, [r["member"] for r in ranked])
    if not quiet:
        for rank, row in enumerate(ranked, start=1):
            fx = row["final_loss_x"]
            fx_text = "-" if fx is None else f"{fx:.6g}"
            print(f"{rank:3d}  {row['member']:<40s} {row['status']:<9s} {fx_text}")
    return table


# ----------------------------------------------------- fit / bound


def read_log_column(path: Union[str, Path], column: str):
    """Read (step, column) arrays from a run log CSV."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as ex:
        raise OutputUnwritable(f"cannot read {path}: {ex}") from ex
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MissingColumn(f"{path} is empty")
    header = lines[0].split(",")
    if "step" not in header or column not in header:
        raise MissingColumn(f"{path} has no '{column}' column")
    si, ci = header.index("step"), header.index(column)
    steps, values = [], []
    for ln in lines[1:]:
        cells = ln.split(",")
        steps.append(float(cells[si]))
        values.append(float(cells[ci]))
    return np.asarray(steps), np.asarray(values)


def fit_cmd(
    log: Union[str, Path],
    out_dir: Union[str, Path],
    column: str = "loss_at_x",
    window: tuple = (0.25, 1.0),
    horizon: Optional[int] = None,
    smooth: Optional[float] = None,
    quiet: bool = False,
) -> dict:
    """Fit a / sqrt(t + b) + c to a logged loss column.

    Writes fit.json (parameters, window, residuals, the f* estimate c)
    and fit_prediction.csv with the fitted curve tabulated over the log's
    steps and, when a horizon extends past the log, beyond it at the same
    stride. Optional EMA smoothing is applied before fitting.
    """
    steps, values = read_log_column(log, column)
    if smooth is not None:
        values = ema_smooth(values, smooth)
    fit = fit_inverse_sqrt(steps, values, window=window)

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as ex:
        raise OutputUnwritable(f"cannot create {out}: {ex}") from ex

    report = dict(fit.as_dict())
    report.update(
        {
            "column": column,
            "smooth": smooth,
            "log": str(log),
            "horizon": horizon,
            "f_star_estimate": fit.c,
        }
    )
    _write_json(out / "fit.json", report)

    pred_steps = steps
    if horizon is not None:
        if horizon <= steps[-1]:
            raise ConfigInvalid("prediction horizon must exceed the last logged step")
        stride = max(int(steps[-1] - steps[-2]), 1) if len(steps) > 1 else 1
        extra = np.arange(steps[-1] + stride, horizon + 1, stride, dtype=float)
        pred_steps = np.concatenate([steps, extra])
    # The model is undefined where t + b <= 0 (b can be negative); early
    # logged steps outside its domain are omitted from the table.
    pred_steps = pred_steps[pred_steps + fit.b > 0.0]
    predicted = extrapolate(fit, pred_steps)
    actual = {int(s): v for s, v in zip(steps, values)}
    try:
        with (out / "fit_prediction.csv").open("w") as fh:
            fh.write("step,actual,predicted\n")
            for s, p in zip(pred_steps, predicted):
                a = actual.get(int(s))
                fh.write(
                    f"{int(s)},{'' if a is None else fmt(a)},{fmt(p)}\n"
                )
    except OSError as ex:
        raise OutputUnwritable(f"cannot write prediction CSV: {ex}") from ex
    from . import plots

    plots.render_fit(out, steps, values, pred_steps, predicted, fit)
    if not quiet:
        print(
            f"fit over steps [{fit.window[0]}, {fit.window[1]}]: "
            f"a={fit.a:.6g} b={fit.b:.6g} c={fit.c:.6g} "
            f"(f* estimate {fit.c:.6g}, rms residual {fit.rms_residual:.3g})"
        )
    return report


def bound_cmd(
    cfg: dict,
    out_dir: Union[str, Path],
    quiet: bool = False,
) -> dict:
    """Tabulate the schedule's regret-style loss bound per step.

    Config fields: schedule (mapping), D, G, and optional samples to
    subsample long schedules. Writes bound.csv with the multiplier and
    the anytime bound at each sampled step count.
    """
    unknown = set(cfg) - {"schedule", "D", "G", "samples"}
    if unknown:
        raise ConfigInvalid(f"unknown bound fields: {', '.join(sorted(unknown))}")
    sched_spec = dict(cfg.get("schedule") or {})
    if not sched_spec:
        raise ConfigInvalid("bound config requires a 'schedule' mapping")
    sched_fields = set(Schedule.__dataclass_fields__)
    bad = set(sched_spec) - sched_fields
    if bad:
        raise ConfigInvalid(f"schedule: unknown fields: {', '.join(sorted(bad))}")
    if "total_steps" not in sched_spec:
        raise ConfigInvalid("bound schedule requires total_steps")
    schedule = Schedule(**sched_spec).validate()
    D = cfg.get("D", 1.0)
    G = cfg.get("G", 1.0)
    for label, v in (("D", D), ("G", G)):
        if not isinstance(v, (int, float)) or v <= 0:
            raise ConfigInvalid(f"bound field '{label}' must be positive")

    T = schedule.total_steps
    samples = cfg.get("samples")
    if samples is None:
        ts = np.arange(1, T + 1)
    else:
        if not isinstance(samples, int) or samples < 2:
            raise ConfigInvalid("samples must be an integer >= 2")
        ts = np.unique(np.linspace(1, T, samples).astype(int))

    mults = bound_grid_multipliers(schedule)
    inp = BoundInput(
        multipliers=mults, peak=schedule.peak_lr, D=float(D), grad_sq=float(G) ** 2
    ).validate()

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows = []
        with (out / "bound.csv").open("w") as fh:
            fh.write("step,multiplier,bound\n")
            for t in ts:
                bound = anytime_bound(inp, int(t))
                m_t = float(mults[int(t) - 1])
                rows.append((int(t), m_t, bound))
                fh.write(f"{int(t)},{fmt(m_t)},{fmt(bound)}\n")
    except OSError as ex:
        raise OutputUnwritable(f"cannot write bound CSV: {ex}") from ex
    from . import plots

    plots.render_bound(out, rows)
    final = rows[-1][2]
    if not quiet:
        print(
            f"bound over {T} steps: final {final:.6g} "
            f"(D={float(D):.6g}, G={float(G):.6g})"
        )
    return {"schedule": sched_spec, "D": D, "G": G, "final_bound": final}

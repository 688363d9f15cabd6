"""Synthetic gradient-oracle problems.

Every problem exposes oracle(params, seed, batch_size) -> (loss, grad)
and init_point(seed), deterministic given their arguments. batch_size
None means the exact full-batch (or noise-free) oracle. Problems with a
known optimal value carry f_star so Polyak step sizes have a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from .errors import BatchTooLarge, ConfigInvalid

SeedLike = Union[int, Sequence[int]]

# Guard for RMS norms of exactly-zero activations; negligible against any
# real activation scale so scale invariance holds to machine precision.
_RMS_GUARD = 1e-30


@dataclass(frozen=True)
class Problem:
    """A stochastic first-order oracle over a flat parameter vector."""

    name: str
    dim: int
    f_star: Optional[float] = None
    minimizer: Optional[np.ndarray] = None
    n_samples: Optional[int] = None
    blocks: tuple = ()
    oracle_fn: Callable = None
    init_fn: Callable = None

    def oracle(
        self,
        params: np.ndarray,
        seed: SeedLike = 0,
        batch_size: Optional[int] = None,
    ) -> tuple[float, np.ndarray]:
        params = np.asarray(params, dtype=np.float64).ravel()
        if params.shape[0] != self.dim:
            raise ConfigInvalid(
                f"{self.name}: parameter dimension {params.shape[0]} != {self.dim}"
            )
        if batch_size is not None:
            if batch_size < 1:
                raise ConfigInvalid(f"{self.name}: batch_size must be >= 1")
            if self.n_samples is not None and batch_size > self.n_samples:
                raise BatchTooLarge(
                    f"{self.name}: batch_size {batch_size} exceeds the "
                    f"sample pool of {self.n_samples}"
                )
        return self.oracle_fn(params, seed, batch_size)

    def init_point(self, seed: SeedLike = 0) -> np.ndarray:
        return self.init_fn(seed)

    def block_norms(self, vec: np.ndarray) -> np.ndarray:
        """L2 norm of vec restricted to each scale-invariant block."""
        vec = np.asarray(vec, dtype=np.float64).ravel()
        return np.array([float(np.linalg.norm(vec[b])) for b in self.blocks])


def quadratic(
    d: int, condition_number: float = 1.0, noise_std: float = 0.0
) -> Problem:
    """f(w) = 1/2 w'Aw with log-spaced spectrum in [1, condition_number].

    The stochastic gradient adds N(0, noise_std^2/batch_size) per
    coordinate, the classic noisy-quadratic model where averaging a batch
    of b samples shrinks the noise by sqrt(b). batch_size None (or
    noise_std 0) gives the exact gradient. The loss value itself is
    exact; only the gradient is noisy.
    """
    if d < 1:
        raise ConfigInvalid("quadratic: d must be >= 1")
    if condition_number < 1:
        raise ConfigInvalid("quadratic: condition_number must be >= 1")
    if noise_std < 0:
        raise ConfigInvalid("quadratic: noise_std must be nonnegative")
    eigs = np.logspace(0.0, math.log10(condition_number), d) if condition_number > 1 else np.ones(d)

    def oracle_fn(w, seed, batch_size):
        loss = 0.5 * float(w @ (eigs * w))
        grad = eigs * w
        if noise_std > 0.0 and batch_size is not None:
            rng = np.random.default_rng(seed)
            grad = grad + rng.standard_normal(d) * (noise_std / math.sqrt(batch_size))
        return loss, grad

    def init_fn(seed):
        return np.random.default_rng(seed).standard_normal(d)

    return Problem(
        name=f"quadratic(d={d},cond={condition_number:g},noise={noise_std:g})",
        dim=d,
        f_star=0.0,
        minimizer=np.zeros(d),
        oracle_fn=oracle_fn,
        init_fn=init_fn,
    )


def nonsmooth_valley(d: int) -> Problem:
    """f(w) = ||w||_1 with the sign subgradient (0 at kinks).

    Nonsmooth, sqrt(d)-Lipschitz in L2, minimized at 0 with value 0; the
    canonical setting where averaged first-order methods pay the 1/sqrt(t)
    worst-case rate.
    """
    if d < 1:
        raise ConfigInvalid("nonsmooth_valley: d must be >= 1")

    def oracle_fn(w, seed, batch_size):
        return float(np.sum(np.abs(w))), np.sign(w)

    def init_fn(seed):
        rng = np.random.default_rng(seed)
        return rng.uniform(1.0, 3.0, size=d) * rng.choice([-1.0, 1.0], size=d)

    return Problem(
        name=f"nonsmooth_valley(d={d})",
        dim=d,
        f_star=0.0,
        minimizer=np.zeros(d),
        oracle_fn=oracle_fn,
        init_fn=init_fn,
    )


def logistic_synthetic(d: int, n_samples: int = 512, seed: int = 0) -> Problem:
    """Binary logistic regression on fixed Gaussian data.

    Labels come from a planted unit separator with 10% flipped, so the
    problem is non-separable and has a finite minimizer. Batches sample
    rows without replacement per oracle seed; batch_size None uses every
    row. The starting point is a random direction at radius 8, far enough
    from the minimizer that a run has a real descent phase.
    """
    if d < 1 or n_samples < 1:
        raise ConfigInvalid("logistic_synthetic: d and n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, d))
    w_star = rng.standard_normal(d)
    w_star /= np.linalg.norm(w_star)
    y = np.sign(X @ w_star)
    y[y == 0] = 1.0
    flip = rng.random(n_samples) < 0.10
    y[flip] *= -1.0

    def oracle_fn(w, oseed, batch_size):
        if batch_size is None:
            Xb, yb = X, y
        else:
            idx = np.random.default_rng(oseed).choice(
                n_samples, size=batch_size, replace=False
            )
            Xb, yb = X[idx], y[idx]
        margins = yb * (Xb @ w)
        loss = float(np.mean(np.logaddexp(0.0, -margins)))
        # d/dw mean log(1+exp(-y x.w)) = -mean(y sigma(-m) x)
        coef = -yb * expit(-margins)
        grad = (coef @ Xb) / len(yb)
        return loss, grad

    def init_fn(iseed):
        w0 = np.random.default_rng(iseed).standard_normal(d)
        return w0 * (8.0 / np.linalg.norm(w0))

    return Problem(
        name=f"logistic_synthetic(d={d},n={n_samples})",
        dim=d,
        n_samples=n_samples,
        oracle_fn=oracle_fn,
        init_fn=init_fn,
    )


def normalized_mlp(
    width: int = 32,
    depth: int = 2,
    seed: int = 0,
    d_in: int = 8,
    n_samples: int = 256,
) -> Problem:
    """Tiny regression MLP whose hidden blocks are exactly scale-invariant.

    Each hidden layer is tanh(rmsnorm(W h)): multiplying any weight matrix
    by c > 0 cancels in the normalization, so the loss depends only on
    the direction of each block and gradients are orthogonal to their
    block (<g_b, w_b> = 0). The readout vector is fixed (not trained) to
    keep every trainable parameter scale-invariant. Data, targets, and
    readout are frozen at construction; batches sample rows without
    replacement.

    All weight matrices are trainable: W_1 is width x d_in, the remaining
    depth-1 are width x width, flattened in layer order.
    """
    if width < 1 or depth < 1 or d_in < 1 or n_samples < 1:
        raise ConfigInvalid("normalized_mlp: width, depth, d_in, n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_samples, d_in))
    targets = rng.standard_normal(n_samples)
    readout = rng.standard_normal(width)
    readout /= np.linalg.norm(readout)

    shapes = [(width, d_in)] + [(width, width)] * (depth - 1)
    sizes = [a * b for a, b in shapes]
    dim = int(np.sum(sizes))
    if dim > 100_000:
        raise ConfigInvalid("normalized_mlp: too many parameters for desk scale")
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    blocks = tuple(slice(int(offsets[i]), int(offsets[i + 1])) for i in range(depth))

    def unpack(w):
        return [w[blocks[i]].reshape(shapes[i]) for i in range(depth)]

    def forward_backward(w, Xb, tb):
        Ws = unpack(w)
        B = Xb.shape[0]
        h = Xb
        acts, rhos, hiddens = [], [], [Xb]
        for W in Ws:
            a = h @ W.T
            rho = np.sqrt(np.mean(a * a, axis=1, keepdims=True) + _RMS_GUARD)
            h = np.tanh(a / rho)
            acts.append(a)
            rhos.append(rho)
            hiddens.append(h)
        resid = h @ readout - tb
        loss = 0.5 * float(np.mean(resid * resid))
        # Backward pass. For u = dL/d(a/rho), the rmsnorm pullback is
        # da = u/rho - a <u, a> / (n rho^3) with n the row width.
        dh = (resid[:, None] / B) * readout[None, :]
        grads = [None] * depth
        for l in range(depth - 1, -1, -1):
            a, rho = acts[l], rhos[l]
            dr = dh * (1.0 - hiddens[l + 1] * hiddens[l + 1])
            inner = np.sum(dr * a, axis=1, keepdims=True)
            da = dr / rho - a * (inner / (a.shape[1] * rho**3))
            grads[l] = da.T @ hiddens[l]
            dh = da @ Ws[l]
        return loss, np.concatenate([gmat.ravel() for gmat in grads])

    def oracle_fn(w, oseed, batch_size):
        if batch_size is None:
            Xb, tb = X, targets
        else:
            idx = np.random.default_rng(oseed).choice(
                n_samples, size=batch_size, replace=False
            )
            Xb, tb = X[idx], targets[idx]
        return forward_backward(w, Xb, tb)

    def init_fn(iseed):
        # Unit Frobenius norm per block: scale is meaningless under the
        # normalization, so pick the canonical representative.
        irng = np.random.default_rng(iseed)
        parts = []
        for a, b in shapes:
            blk = irng.standard_normal(a * b)
            parts.append(blk / np.linalg.norm(blk))
        return np.concatenate(parts)

    return Problem(
        name=f"normalized_mlp(width={width},depth={depth})",
        dim=dim,
        n_samples=n_samples,
        blocks=blocks,
        oracle_fn=oracle_fn,
        init_fn=init_fn,
    )


PROBLEM_KINDS = {
    "quadratic": quadratic,
    "nonsmooth_valley": nonsmooth_valley,
    "logistic_synthetic": logistic_synthetic,
    "normalized_mlp": normalized_mlp,
}


def make_problem(kind: str, **params) -> Problem:
    """Build a problem by registry name; unknown names raise ConfigInvalid."""
    if kind not in PROBLEM_KINDS:
        raise ConfigInvalid(
            f"unknown problem kind {kind!r}; expected one of {sorted(PROBLEM_KINDS)}"
        )
    try:
        return PROBLEM_KINDS[kind](**params)
    except TypeError as exc:
        raise ConfigInvalid(f"bad parameters for problem {kind!r}: {exc}") from None

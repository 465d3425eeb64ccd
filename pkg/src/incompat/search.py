"""Seeded multi-start descent shared by the entropic and distance searches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SearchConfig:
    """Budget and seed for restart searches.

    Restart ``r`` draws from ``default_rng([seed, r])`` so results do not
    depend on how restarts are scheduled.
    """

    restarts: int = 64
    max_iters: int = 500
    seed: int = 42
    tol: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def rng(self, index: int, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream, index])


def _inner(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Real inner product Re<a, b> per batch row."""
    axes = tuple(range(1, a.ndim))
    return np.sum((a.conj() * b).real, axis=axes)


def sphere_tangent(x: np.ndarray, G: np.ndarray) -> np.ndarray:
    shape = (-1,) + (1,) * (x.ndim - 1)
    return G - _inner(x, G).reshape(shape) * x


def unit_normalize(x: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, x.ndim))
    return x / np.sqrt(np.sum(np.abs(x) ** 2, axis=axes, keepdims=True))


Objective = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def batched_descent(
    x0: np.ndarray,
    fun: Objective,
    *,
    tangent: Callable[[np.ndarray, np.ndarray], np.ndarray] = sphere_tangent,
    retract: Callable[[np.ndarray], np.ndarray] = unit_normalize,
    max_iters: int = 500,
    tol: float = 1e-10,
    step0: float = 0.5,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize ``fun`` from each row of ``x0`` by projected gradient with Armijo backtracking.

    ``fun`` maps a batch of points to ``(values, gradients)`` where the
    gradient is the real gradient packed as a complex array (``df = Re<G, dx>``).
    A row stops once an accepted step improves its value by less than ``tol``.
    Returns the final points and values; values never exceed the starting ones.
    """
    x = retract(np.array(x0, dtype=complex))
    f, G = fun(x)
    R = x.shape[0]
    shape = (-1,) + (1,) * (x.ndim - 1)
    eta = np.full(R, step0)
    active = np.ones(R, dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        xa, fa = x[idx], f[idx]
        Gt = tangent(xa, G[idx])
        gnorm2 = _inner(Gt, Gt)
        flat = gnorm2 < 1e-24
        trial_eta = eta[idx].copy()
        accepted = flat.copy()
        x_new, f_new, G_new = xa.copy(), fa.copy(), G[idx].copy()
        pending = ~accepted
        for _ in range(60):
            if not pending.any():
                break
            p = np.flatnonzero(pending)
            xt = retract(xa[p] - trial_eta[p].reshape(shape) * Gt[p])
            ft, Gtr = fun(xt)
            ok = ft <= fa[p] - 1e-4 * trial_eta[p] * gnorm2[p]
            good = p[ok]
            x_new[good], f_new[good], G_new[good] = xt[ok], ft[ok], Gtr[ok]
            accepted[good] = True
            pending[good] = False
            trial_eta[p[~ok]] *= 0.5
        improvement = fa - f_new
        x[idx], f[idx], G[idx] = x_new, f_new, G_new
        eta[idx] = np.minimum(trial_eta * 2.0, 1e3)
        done = flat | ~accepted | (improvement < tol)
        active[idx[done]] = False
    return x, f


def random_pure_batch(config: SearchConfig, d: int, stream: int = 0) -> np.ndarray:
    """One Haar-random pure state per restart, seeded by restart index."""
    rows = []
    for r in range(config.restarts):
        rng = config.rng(r, stream)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        rows.append(v / np.linalg.norm(v))
    return np.array(rows)

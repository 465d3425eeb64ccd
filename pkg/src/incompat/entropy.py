"""Measurement statistics, classical distances and Renyi/Tsallis entropies.

Logarithms are base 2 throughout.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatch, InvalidOrder, InvalidState, LengthMismatch
from .linalg import Observable, overlap_matrix

CLAMP_TOL = 1e-12


def as_prob_dist(p) -> np.ndarray:
    """Validate a probability vector, clamping round-off negatives and renormalizing."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise InvalidState("empty probability vector")
    if p.min() < -CLAMP_TOL:
        raise InvalidState(f"negative probability {p.min()!r}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > 1e-10:
        raise InvalidState(f"probabilities sum to {total!r}")
    return p / total


def _density(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex)


def measure_dist(B: Observable, rho) -> np.ndarray:
    """Outcome distribution ``p(j) = <b_j|rho|b_j>`` of measuring ``B`` on ``rho``."""
    rho = _density(rho)
    if rho.shape != (B.dim, B.dim):
        raise DimensionMismatch(f"state of shape {rho.shape} vs observable of dim {B.dim}")
    p = np.einsum("ij,ik,kj->j", B.basis.conj(), rho, B.basis).real
    return as_prob_dist(p)


def successive_dist(A: Observable, B: Observable, rho) -> np.ndarray:
    """Distribution of ``B`` outcomes after a non-selective ``A`` measurement."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    return as_prob_dist(overlap_matrix(A, B).T @ measure_dist(A, rho))


def shannon(p) -> float:
    p = as_prob_dist(p)
    nz = p[p > 0]
    return float(abs(-np.sum(nz * np.log2(nz))))


def _power_sum(p: np.ndarray, alpha: float) -> float:
    nz = p[p > 0]  # 0**alpha = 0 for alpha > 0
    return float(np.sum(nz**alpha))


def tsallis(p, alpha: float) -> float:
    """Tsallis entropy ``(sum p^alpha - 1) / (1 - alpha)``; ``alpha = 2`` is the linear entropy."""
    if alpha <= 0:
        raise InvalidOrder(f"entropy order must be positive, got {alpha!r}")
    p = as_prob_dist(p)
    if alpha == 1:
        return shannon(p) * np.log(2)  # natural-log Shannon is the alpha -> 1 limit
    return float((_power_sum(p, alpha) - 1.0) / (1.0 - alpha))


def renyi(p, alpha: float) -> float:
    """Renyi entropy ``log2(sum p^alpha) / (1 - alpha)``; ``alpha = 2`` is the collision entropy."""
    if alpha <= 0:
        raise InvalidOrder(f"entropy order must be positive, got {alpha!r}")
    p = as_prob_dist(p)
    if alpha == 1:
        return shannon(p)
    value = float(np.log2(_power_sum(p, alpha)) / (1.0 - alpha))
    return abs(value) if value == 0 else value


def _pair(P, Q) -> tuple[np.ndarray, np.ndarray]:
    P = np.asarray(P, dtype=float).ravel()
    Q = np.asarray(Q, dtype=float).ravel()
    if P.shape != Q.shape:
        raise LengthMismatch(f"lengths {P.size} and {Q.size} differ")
    return np.clip(P, 0, None), np.clip(Q, 0, None)


def l1_distance(P, Q) -> float:
    P, Q = _pair(P, Q)
    return float(0.5 * np.sum(np.abs(P - Q)))


def fidelity_classical(P, Q) -> float:
    """Bhattacharyya coefficient ``sum sqrt(p_i q_i)``."""
    P, Q = _pair(P, Q)
    return float(min(1.0, np.sum(np.sqrt(P * Q))))


def linf_distance(P, Q) -> float:
    P, Q = _pair(P, Q)
    return float(np.max(np.abs(P - Q)))

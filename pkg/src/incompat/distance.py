"""Disturbance-based incompatibility: how much an intervening measurement of A
changes the statistics of B, maximized over states.

Three classical distances are supported: ``"1"`` (L1), ``"F"`` (one minus
squared Bhattacharyya fidelity) and ``"inf"`` (Chebyshev).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import fidelity_classical, l1_distance, linf_distance
from .exceptions import DimensionMismatch, InvalidSubspaceDim
from .families import detect_family
from .linalg import DensityMatrix, Observable, as_bloch, overlap_matrix
from .search import SearchConfig, batched_descent

ALPHAS = ("1", "F", "inf")
SMOOTHING = 1e-12
ROUNDOFF = 1e-15


@dataclass(frozen=True)
class DirectionalResult:
    value: float
    maximizer: DensityMatrix
    alpha: str
    method: str  # "closed_form" or "restart_search"

    @property
    def rank_one(self) -> bool:
        return self.maximizer.rank() == 1


def normalize_alpha(alpha) -> str:
    key = str(alpha).lower().replace("q_", "").replace("∞", "inf")
    key = {"1": "1", "l1": "1", "one": "1", "f": "F", "fidelity": "F", "inf": "inf", "infinity": "inf", "linf": "inf"}.get(key)
    if key is None:
        raise ValueError(f"unknown distance {alpha!r}; expected one of {ALPHAS}")
    return key


def distributions(A: Observable, B: Observable, rho) -> tuple[np.ndarray, np.ndarray]:
    """``(p, q)``: B statistics without and with a preceding A measurement."""
    rho = np.asarray(rho, dtype=complex)
    p = np.einsum("ij,ik,kj->j", B.basis.conj(), rho, B.basis).real
    pa = np.einsum("ij,ik,kj->j", A.basis.conj(), rho, A.basis).real
    q = overlap_matrix(A, B).T @ pa
    # round-off of order 1e-17 would otherwise add ~1e-8 to the fidelity through the square root
    p = np.where(p < ROUNDOFF, 0.0, p)
    q = np.where(q < ROUNDOFF, 0.0, q)
    return p, q


def disturbance(A: Observable, B: Observable, rho, alpha="F") -> float:
    """Distance between the B statistics with and without an intervening A measurement on ``rho``."""
    alpha = normalize_alpha(alpha)
    p, q = distributions(A, B, rho)
    if alpha == "1":
        return l1_distance(q, p)
    if alpha == "inf":
        return linf_distance(q, p)
    return float(max(0.0, 1.0 - fidelity_classical(q, p) ** 2))


def _objective(A: Observable, B: Observable, alpha: str):
    """Negated smoothed distance as a function of the batch of factors L."""
    O = overlap_matrix(A, B)
    Ab, Bb = A.basis, B.basis
    d = A.dim
    eye = np.eye(d)

    def fun(L):
        t = np.sum(np.abs(L) ** 2, axis=(1, 2))
        rho = L @ np.conj(np.swapaxes(L, 1, 2)) / t[:, None, None]
        p = np.einsum("ij,rik,kj->rj", Bb.conj(), rho, Bb).real
        pa = np.einsum("ij,rik,kj->rj", Ab.conj(), rho, Ab).real
        q = pa @ O
        if alpha == "F":
            sp, sq = np.sqrt(np.clip(p, 0, None) + SMOOTHING), np.sqrt(np.clip(q, 0, None) + SMOOTHING)
            fid = np.sum(sp * sq, axis=1)
            val = 1.0 - fid**2
            gp = -fid[:, None] * sq / sp
            gq = -fid[:, None] * sp / sq
        elif alpha == "1":
            diff = q - p
            smooth = np.sqrt(diff**2 + SMOOTHING**2)
            val = 0.5 * np.sum(smooth, axis=1)
            gq = 0.5 * diff / smooth
            gp = -gq
        else:
            diff = q - p
            k = np.argmax(np.abs(diff), axis=1)
            rows = np.arange(len(k))
            val = np.abs(diff[rows, k])
            gq = np.zeros_like(diff)
            gq[rows, k] = np.sign(diff[rows, k])
            gp = -gq
        ga = gq @ O.T
        W = np.einsum("ij,rj,kj->rik", Bb, gp, Bb.conj()) + np.einsum("ij,rj,kj->rik", Ab, ga, Ab.conj())
        W = -W  # minimize the negated distance
        c = np.einsum("rii->r", W @ rho).real
        G = 2.0 * (W - c[:, None, None] * eye) @ L / t[:, None, None]
        return -val, G

    return fun


def _vertex_polish(A: Observable, B: Observable, alpha: str, psi: np.ndarray, iters: int = 50) -> tuple[float, np.ndarray]:
    """Jump to the top eigenvector of the distance gradient while that improves.

    For the convex L1 and Chebyshev distances each jump is an ascent step.
    """
    best_val = disturbance(A, B, np.outer(psi, psi.conj()), alpha)
    for _ in range(iters):
        W = _gradient_operator(A, B, alpha, np.outer(psi, psi.conj()))
        cand = np.linalg.eigh(W)[1][:, -1]
        val = disturbance(A, B, np.outer(cand, cand.conj()), alpha)
        if val <= best_val + 1e-15:
            break
        best_val, psi = val, cand
    return best_val, psi


def _gradient_operator(A: Observable, B: Observable, alpha: str, rho: np.ndarray) -> np.ndarray:
    """Hermitian operator W with d(distance) = Tr(W d rho) at ``rho``."""
    O = overlap_matrix(A, B)
    p, q = distributions(A, B, rho)
    diff = q - p
    if alpha == "1":
        gq = 0.5 * np.sign(diff)
    elif alpha == "inf":
        k = int(np.argmax(np.abs(diff)))
        gq = np.zeros_like(diff)
        gq[k] = np.sign(diff[k])
    else:
        sp, sq = np.sqrt(p + SMOOTHING), np.sqrt(q + SMOOTHING)
        fid = np.sum(sp * sq)
        return (B.basis * (-fid * sq / sp)) @ B.basis.conj().T + (A.basis * ((-fid * sp / sq) @ O.T)) @ A.basis.conj().T
    gp = -gq
    return (B.basis * gp) @ B.basis.conj().T + (A.basis * (gq @ O.T)) @ A.basis.conj().T


def _starts(A: Observable, B: Observable, config: SearchConfig) -> np.ndarray:
    d = A.dim
    mask = np.tril(np.ones((d, d)))
    starts = []
    for vec in np.hstack([B.basis, A.basis]).T:  # pure warm starts
        L = np.zeros((d, d), dtype=complex)
        L[:, 0] = vec
        starts.append(L)
    for r in range(config.restarts):
        rng = config.rng(r, stream=1)
        if r % 2 == 0:  # pure random start
            L = np.zeros((d, d), dtype=complex)
            L[:, 0] = rng.normal(size=d) + 1j * rng.normal(size=d)
        else:
            L = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) * mask
        starts.append(L / np.linalg.norm(L))
    return np.array(starts)


def _frob_normalize(L: np.ndarray) -> np.ndarray:
    return L / np.sqrt(np.sum(np.abs(L) ** 2, axis=(1, 2), keepdims=True))


def _search(A: Observable, B: Observable, alpha: str, config: SearchConfig) -> tuple[float, np.ndarray]:
    d = A.dim
    mask = np.tril(np.ones((d, d)))
    L0 = _starts(A, B, config)
    L, _ = batched_descent(
        L0,
        _objective(A, B, alpha),
        tangent=lambda x, G: G * mask,
        retract=_frob_normalize,
        max_iters=config.max_iters,
        tol=config.tol,
    )
    best_val, best_rho = -1.0, None
    for cand in np.concatenate([L0, L]):  # starts first: ties keep the earliest
        rho = cand @ cand.conj().T
        rho = rho / np.trace(rho).real
        val = disturbance(A, B, rho, alpha)
        if val > best_val + 1e-15:
            best_val, best_rho = val, rho
    if alpha in ("1", "inf"):
        vals, vecs = np.linalg.eigh(best_rho)
        val, psi = _vertex_polish(A, B, alpha, vecs[:, -1])
        if val > best_val + 1e-15:
            best_val, best_rho = val, np.outer(psi, psi.conj())
    return best_val, best_rho


def _closed_form_directional(A: Observable, B: Observable):
    family = detect_family([A, B])
    if family is None:
        return None
    if family.kind == "qubit":
        value = 0.5 - 0.5 * family.cos_delta**2
        vec = B.basis[:, 1]
    elif family.kind == "mub":
        value = 1.0 - 1.0 / family.dim
        vec = B.basis[:, 0]
    else:
        m = family.dim - family.d_c
        value = 1.0 - 1.0 / m
        O = overlap_matrix(A, B)
        # an eigenvector of B inside the unbiased block (column without a unit entry)
        cols = np.flatnonzero(np.abs(O.max(axis=0) - 1.0) > 1e-9)
        vec = B.basis[:, cols[0] if cols.size else 0]
    return value, np.outer(vec, vec.conj())


def _check_pair(A: Observable, B: Observable):
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")


def q_alpha_directional(A: Observable, B: Observable, alpha="F", config: SearchConfig | None = None, method: str = "auto") -> DirectionalResult:
    """Maximal disturbance of B's statistics by a prior A measurement.

    Closed forms exist for the fidelity distance on qubit, unbiased and
    commuting-subspace pairs; otherwise (or with ``method="search"``) the
    supremum is estimated from below by a seeded restart search over
    density matrices ``rho = L L^dagger / Tr(L L^dagger)``.
    """
    _check_pair(A, B)
    alpha = normalize_alpha(alpha)
    config = config or SearchConfig()
    if method != "search" and alpha == "F":
        closed = _closed_form_directional(A, B)
        if closed is not None:
            value, rho = closed
            return DirectionalResult(float(value), DensityMatrix(rho), alpha, "closed_form")
    if method == "closed_form":
        raise ValueError("no closed form known for this pair and distance")
    value, rho = _search(A, B, alpha, config)
    rho = 0.5 * (rho + rho.conj().T)
    return DirectionalResult(float(value), DensityMatrix(rho / np.trace(rho).real), alpha, "restart_search")


def q_alpha_pair(A: Observable, B: Observable, alpha="F", config: SearchConfig | None = None, method: str = "auto") -> float:
    """``(Q(A->B) + Q(B->A)) / 4``, the two-observable case of the set average."""
    ab = q_alpha_directional(A, B, alpha, config, method).value
    ba = q_alpha_directional(B, A, alpha, config, method).value
    return 0.25 * (ab + ba)


def q_alpha_directional_matrix(observables: Sequence[Observable], alpha="F", config: SearchConfig | None = None, method: str = "auto") -> np.ndarray:
    """Matrix of directional values ``Q(A_i -> A_j)`` with zero diagonal."""
    observables = list(observables)
    if len({o.dim for o in observables}) > 1:
        raise DimensionMismatch("observables have differing dimensions")
    N = len(observables)
    M = np.zeros((N, N))
    for i in range(N):
        for j in range(N):
            if i != j:
                M[i, j] = q_alpha_directional(observables[i], observables[j], alpha, config, method).value
    return M


def q_alpha_set(observables: Sequence[Observable], alpha="F", config: SearchConfig | None = None, method: str = "auto") -> float:
    """Set measure: the directional values summed over ordered pairs, divided by N^2."""
    observables = list(observables)
    if len(observables) < 2:
        raise DimensionMismatch("need at least two observables")
    M = q_alpha_directional_matrix(observables, alpha, config, method)
    return float(M.sum() / len(observables) ** 2)


def qf_qubit_closed(a, b) -> float:
    """Fidelity-based pair measure of two qubit observables, ``(1 - (a.b)^2) / 4``."""
    c = as_bloch(a).dot(as_bloch(b))
    return 0.25 * (1.0 - c * c)


def qf_subspace_closed(d: int, d_c: int) -> float:
    """Fidelity-based pair measure for a pair commuting on ``d_c`` dimensions: ``(1 - 1/(d - d_c)) / 2``."""
    if not 0 <= d_c <= d - 1:
        raise InvalidSubspaceDim(f"need 0 <= d_c <= d - 1, got d={d}, d_c={d_c}")
    return 0.5 * (1.0 - 1.0 / (d - d_c))

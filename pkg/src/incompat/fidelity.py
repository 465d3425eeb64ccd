"""Distinguishability-based incompatibility Q = 1 - F^max.

F^max is the best average fidelity of a measure-and-reprepare strategy on
a uniform ensemble. For rank-one POVM elements ``m_k |chi_k><chi_k|`` it
equals ``(1/d) sup sum_k m_k lambda_max(A(chi_k))`` where ``A`` is the
ensemble's average-projection map.

:func:`fmax_ascent` only ever certifies a lower bound on F^max (an upper
bound on Q). It alternates a linear program that re-weights a pool of
directions under the completeness constraint with direction updates:
damped moves of each element toward its best reconstruction state, plus
new directions priced against the LP dual.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, nnls

from .exceptions import AscentDiverged, InvalidPovm, InvalidSubspaceDim
from .linalg import Ensemble, Observable, as_bloch, bloch_operator, canonical_phase
from .search import SearchConfig

COMPLETENESS_TOL = 1e-8
STALL_WINDOW = 15


@dataclass(frozen=True)
class RankOnePovm:
    """Rank-one POVM ``{m_k |chi_k><chi_k|}``; directions are rows."""

    weights: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        v = np.atleast_2d(np.asarray(self.directions, dtype=complex))
        if w.shape[0] != v.shape[0]:
            raise InvalidPovm("one weight per direction required")
        if np.any(w <= 0):
            raise InvalidPovm("weights must be positive")
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        v = np.vstack([canonical_phase(row) for row in v])
        if v.shape[0] > v.shape[1] ** 2:
            raise InvalidPovm(f"{v.shape[0]} elements exceed the d^2 = {v.shape[1] ** 2} budget")
        for a in (w, v):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "directions", v)
        residual = self.completeness_residual()
        if residual > COMPLETENESS_TOL:
            raise InvalidPovm(f"completeness residual {residual:.3g} exceeds {COMPLETENESS_TOL}")

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self):
        return self.directions.shape[0]

    def elements(self) -> np.ndarray:
        v = self.directions
        return self.weights[:, None, None] * np.einsum("ki,kj->kij", v, v.conj())

    def completeness_residual(self) -> float:
        return float(np.max(np.abs(self.elements().sum(axis=0) - np.eye(self.dim))))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "weights": [float(w) for w in self.weights],
            "directions": [[float(z.real), float(z.imag)] for z in self.directions.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RankOnePovm":
        w = np.asarray(data["weights"], dtype=float)
        pairs = np.asarray(data["directions"], dtype=float)
        vecs = pairs[..., 0] + 1j * pairs[..., 1]
        return cls(w, vecs.reshape(len(w), -1))


@dataclass(frozen=True)
class FidelityResult:
    fmax_lower: float
    povm: RankOnePovm
    reconstructions: np.ndarray  # best re-prepared state per POVM element (rows)
    method: str  # "closed_form" or "ascent"
    history: tuple = field(default=())
    pricing_gap: float = 0.0

    @property
    def q_upper(self) -> float:
        return 1.0 - self.fmax_lower


def _average_map(S: Ensemble, chis: np.ndarray) -> np.ndarray:
    """The average-projection operators for a batch of directions, shape ``(K, d, d)``."""
    V = S.vectors
    n, d = V.shape
    w = np.abs(np.conj(V) @ chis.T) ** 2  # (n, K): |<s|chi_k>|^2
    return (d / n) * np.einsum("si,sk,sj->kij", V, w, V.conj())


def _top_eig(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(M)
    return vals[..., -1], vecs[..., :, -1]


def avg_fidelity_element(S: Ensemble, chi) -> float:
    """Average fidelity ``lambda_max(A(|chi><chi|))`` achieved by one rank-one element."""
    chi = np.asarray(chi, dtype=complex).ravel()
    if chi.shape[0] != S.dim:
        from .exceptions import DimensionMismatch

        raise DimensionMismatch(f"direction of length {chi.shape[0]} vs ensemble dim {S.dim}")
    chi = chi / np.linalg.norm(chi)
    return float(_top_eig(_average_map(S, chi[None, :]))[0][0])


def povm_fidelity(S: Ensemble, povm: RankOnePovm) -> float:
    """``(1/d) sum_k m_k lambda_max(A(chi_k))``: fidelity with optimal re-preparation."""
    vals, _ = _top_eig(_average_map(S, povm.directions))
    return float(povm.weights @ vals / S.dim)


def _completeness_rows(chis: np.ndarray) -> np.ndarray:
    """Linear functionals of ``chi chi^dagger`` whose values fix a Hermitian matrix, shape ``(d^2, K)``."""
    d = chis.shape[1]
    outer = np.einsum("ka,kb->kab", chis, chis.conj())
    iu = np.triu_indices(d)
    iu1 = np.triu_indices(d, 1)
    return np.vstack([outer[:, iu[0], iu[1]].real.T, outer[:, iu1[0], iu1[1]].imag.T])


def _completeness_target(d: int) -> np.ndarray:
    iu = np.triu_indices(d)
    return np.concatenate([(iu[0] == iu[1]).astype(float), np.zeros(d * (d - 1) // 2)])


def _dual_operator(y: np.ndarray, d: int) -> np.ndarray:
    """Hermitian ``Y`` with ``<chi|Y|chi> = -rows(chi) . y``."""
    iu = np.triu_indices(d)
    iu1 = np.triu_indices(d, 1)
    nre = iu[0].size
    Y = np.zeros((d, d), dtype=complex)
    for (a, b), yc in zip(zip(*iu), y[:nre]):
        if a == b:
            Y[a, a] += -yc
        else:
            Y[a, b] += -yc / 2
            Y[b, a] += -yc / 2
    for (a, b), yc in zip(zip(*iu1), y[nre:]):
        # Im(chi_a conj(chi_b)) = <chi|E|chi> with E_ab = i/2, E_ba = -i/2
        Y[a, b] += -yc * 0.5j
        Y[b, a] += yc * 0.5j
    return Y


def _solve_weights(f: np.ndarray, chis: np.ndarray, target: np.ndarray | None = None):
    d = chis.shape[1]
    A_eq = _completeness_rows(chis)
    b_eq = _completeness_target(d) if target is None else target
    res = linprog(-f, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise AscentDiverged(f"weight LP failed: {res.message}")
    m = np.clip(res.x, 0, None)
    support = np.flatnonzero(m > 1e-12)
    # polish the basic solution so completeness holds to round-off
    sol, _ = nnls(A_eq[:, support], b_eq)
    if np.max(np.abs(A_eq[:, support] @ sol - b_eq)) < np.max(np.abs(A_eq @ m - b_eq)):
        m = np.zeros_like(m)
        m[support] = sol
    return m, res.eqlin.marginals


def _complete(m: np.ndarray, chis: np.ndarray):
    """Congruence by ``C^(-1/2)`` so the LP's near-complete weights sum to exactly the identity."""
    C = np.einsum("k,ki,kj->ij", m, chis, chis.conj())
    vals, vecs = np.linalg.eigh(C)
    if vals.min() <= 0:
        raise AscentDiverged("weighted directions do not span the space")
    root = (vecs / np.sqrt(vals)) @ vecs.conj().T
    new = chis @ root.T
    norms = np.sum(np.abs(new) ** 2, axis=1)
    return m * norms, new / np.sqrt(norms)[:, None]


def _price(S: Ensemble, Y: np.ndarray, starts: np.ndarray, sweeps: int = 12):
    """Alternating maximization of ``<chi|A(gamma)|chi> - <chi|Y|chi>`` from each start."""
    chi = starts
    for _ in range(sweeps):
        _, gamma = _top_eig(_average_map(S, chi))
        M = _average_map(S, gamma) - Y[None]
        _, chi = _top_eig(M)
    f, _ = _top_eig(_average_map(S, chi))
    reduced = f - np.einsum("ki,ij,kj->k", chi.conj(), Y, chi).real
    return chi, reduced


def _random_directions(rng: np.random.Generator, k: int, d: int) -> np.ndarray:
    v = rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fmax_ascent(S: Ensemble, config: SearchConfig | None = None) -> FidelityResult:
    """Certified lower bound on the accessible fidelity of ``S``.

    The reported value never decreases across iterations (``history``)
    because the current support always stays in the LP pool. Iteration
    stops once no priced direction improves the LP by more than
    ``config.tol`` (``pricing_gap`` is the last best reduced value).
    """
    config = config or SearchConfig()
    d = S.dim
    rng = config.rng(0, stream=2)
    pool = np.vstack([S.vectors, _random_directions(rng, d * d, d)])
    anchors = np.vstack([np.eye(d), _random_directions(rng, 2 * d, d)])
    inflate = _completeness_rows(anchors[d:]).sum(axis=1) / 2
    pool = np.vstack([pool, anchors])
    n_price = max(4, config.restarts // 8)
    cap = max(60, 6 * d * d)
    target = _completeness_target(d)
    history = []
    gap = np.inf
    for it in range(min(config.max_iters, 300)):
        f, gammas = _top_eig(_average_map(S, pool))
        m, _ = _solve_weights(f, pool)
        history.append(float(m @ f / d))
        # duals of a slightly inflated target are unique, unlike those of the degenerate exact vertex
        eps = min(1e-2, 0.1 * gap)
        _, y = _solve_weights(f, pool, target + eps * inflate)
        Y = _dual_operator(y, d)
        support = m > 0
        starts = np.vstack([pool[support], gammas[support], _random_directions(config.rng(it + 1, stream=2), n_price, d)])
        cands, reduced = _price(S, Y, starts)
        gap = float(reduced.max())
        if gap <= config.tol:
            break
        if len(history) > STALL_WINDOW and history[-1] - history[-1 - STALL_WINDOW] <= max(1e-13, 1e-3 * config.tol):
            break
        # damped move of each element toward its reconstruction state
        sp, sg = pool[support], gammas[support]
        phase = np.exp(-1j * np.angle(np.sum(sp.conj() * sg, axis=1)))[:, None]
        moved = sp + 0.5 * (sg * phase - sp)
        moved /= np.linalg.norm(moved, axis=1, keepdims=True)
        # zero-weight columns stay, ranked by reduced value, so degenerate pivots can still progress
        pool_red = f - np.einsum("ki,ij,kj->k", pool.conj(), Y, pool).real
        order = np.argsort(np.where(support, np.inf, pool_red), kind="stable")[::-1]
        kept = pool[np.sort(order[:cap])]
        # the anchors keep both LPs feasible whatever the pruning
        pool = np.vstack([kept, anchors, cands[reduced > config.tol], moved])
    f, gammas = _top_eig(_average_map(S, pool))
    m, _ = _solve_weights(f, pool)
    keep = m > 0
    try:
        povm = RankOnePovm(*_complete(m[keep], pool[keep]))
    except InvalidPovm as exc:
        raise AscentDiverged(str(exc)) from exc
    value = povm_fidelity(S, povm)
    history.append(value)
    recon = reconstruction_states(S, povm)
    return FidelityResult(value, povm, recon, "ascent", tuple(history), max(gap, 0.0))


def reconstruction_states(S: Ensemble, povm: RankOnePovm) -> np.ndarray:
    """Best re-prepared state for each POVM element (rows)."""
    return _top_eig(_average_map(S, povm.directions))[1]


def _bloch_pair_states(n: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(bloch_operator(n))
    return vecs[:, ::-1].T  # rows: +n, -n


def qubit_optimal_povm(a, b) -> RankOnePovm:
    """Two-outcome projective measurement along ``a + b`` (``a.b >= 0``) or ``a - b``."""
    a, b = as_bloch(a).components, as_bloch(b).components
    n = a + b if a @ b >= 0 else a - b
    n = n / np.linalg.norm(n)
    return RankOnePovm(np.ones(2), _bloch_pair_states(n))


def q_qubit_closed(a, b) -> tuple[float, RankOnePovm]:
    """``Q = (1 - |a.b|) / 4`` for two qubit observables, with the optimal measurement."""
    c = as_bloch(a).dot(as_bloch(b))
    return 0.25 * (1.0 - abs(c)), qubit_optimal_povm(a, b)


def q_mub_closed(N: int, d: int) -> float:
    """``(1 - 1/N)(1 - 1/d)`` for N mutually unbiased bases."""
    return (1.0 - 1.0 / N) * (1.0 - 1.0 / d)


def q_subspace_closed(d: int, d_c: int) -> float:
    """``(1 - (d_c + 1)/d) / 2`` for a pair commuting on ``d_c`` dimensions."""
    if not 0 <= d_c <= d - 1:
        raise InvalidSubspaceDim(f"need 0 <= d_c <= d - 1, got d={d}, d_c={d_c}")
    return 0.5 * (1.0 - (d_c + 1) / d)


def subspace_fmax_composition(d: int, d_c: int) -> float:
    """F^max of the commuting-subspace ensemble assembled block by block."""
    m = d - d_c
    return (d_c * 1.0 + m * (m + 1) / (2 * m)) / d


def fmax_direct_sum(S1, F1: float, n1: int, S2, F2: float, n2: int) -> float:
    """Accessible fidelity of a direct sum: the state-count weighted average of the blocks."""
    return (n1 * F1 + n2 * F2) / (n1 + n2)


def constant_povm_check(S: Ensemble, povm: RankOnePovm, tol: float = 1e-9) -> tuple[bool, float]:
    """Whether every element of ``povm`` attains the same average fidelity on ``S``."""
    vals, _ = _top_eig(_average_map(S, povm.directions))
    spread = float(vals.max() - vals.min())
    return spread <= tol, spread


def q_closed_form(observables: Sequence[Observable]):
    """Closed-form Q with an optimal POVM when the family is recognized, else ``None``."""
    from .families import detect_family
    from .linalg import observable_bloch

    observables = list(observables)
    family = detect_family(observables)
    if family is None:
        return None
    if family.kind == "qubit":
        return q_qubit_closed(*(observable_bloch(o) for o in observables))
    basis = Observable.from_basis(observables[0].basis) if family.kind == "mub" else None
    if family.kind == "mub":
        return q_mub_closed(family.count, family.dim), RankOnePovm(np.ones(family.dim), basis.basis.T)
    return q_subspace_closed(family.dim, family.d_c), None

"""Entropic uncertainty lower bounds for order-2 Tsallis and Renyi entropies.

The standard bounds minimize the average entropy over pure states (the
order-2 entropies are concave, so mixed states never do better). The
successive-measurement bounds have a closed form over the eigenvectors
of the first observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DimensionMismatch
from .families import Family, detect_family
from .linalg import Observable, PureState, bloch_operator, observable_bloch, overlap_matrix
from .search import SearchConfig, batched_descent, random_pure_batch

LN2 = np.log(2.0)


@dataclass(frozen=True)
class EurResult:
    value: float
    minimizer: PureState
    method: str  # "closed_form" or "restart_search"
    entropy_spread: float = 0.0


def _frame(observables: Sequence[Observable]) -> np.ndarray:
    observables = list(observables)
    if not observables:
        raise DimensionMismatch("need at least one observable")
    if len({o.dim for o in observables}) != 1:
        raise DimensionMismatch("observables have differing dimensions")
    return np.stack([o.basis for o in observables])  # (N, d, d), columns are kets


def outcome_probs(frame: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Batch outcome probabilities, shape ``(R, N, d)`` for states ``psi`` of shape ``(R, d)``."""
    amps = np.einsum("nik,ri->rnk", frame.conj(), psi)
    return np.abs(amps) ** 2


def _objective(frame: np.ndarray, kind: str):
    N = frame.shape[0]

    def fun(psi):
        amps = np.einsum("nik,ri->rnk", frame.conj(), psi)
        p = np.abs(amps) ** 2
        s = np.sum(p**2, axis=2)  # (R, N)
        if kind == "t2":
            f = np.mean(1.0 - s, axis=1)
            dfdp = -2.0 * p / N
        else:
            f = np.mean(-np.log2(s), axis=1)
            dfdp = -2.0 * p / (N * LN2 * s[:, :, None])
        # df = sum dfdp * 2 Re(conj(amp) <k| dpsi>)
        G = 2.0 * np.einsum("rnk,rnk,nik->ri", dfdp, amps, frame)
        return f, G

    return fun


def average_entropy(observables: Sequence[Observable], state, kind: str = "t2") -> float:
    """Average T2 (``kind="t2"``) or H2 (``kind="h2"``) entropy of the observables on a pure state."""
    frame = _frame(observables)
    psi = np.asarray(state, dtype=complex).reshape(1, -1)
    psi = psi / np.linalg.norm(psi)
    return float(_objective(frame, kind)(psi)[0][0])


def entropy_spread(observables: Sequence[Observable], state, kind: str = "h2") -> float:
    """Largest difference between the individual entropies on ``state``."""
    frame = _frame(observables)
    psi = np.asarray(state, dtype=complex).reshape(1, -1)
    s = np.sum(outcome_probs(frame, psi / np.linalg.norm(psi)) ** 2, axis=2)[0]
    ent = 1.0 - s if kind == "t2" else -np.log2(s)
    return float(ent.max() - ent.min())


def _search(observables, kind: str, config: SearchConfig) -> tuple[float, np.ndarray]:
    frame = _frame(observables)
    d = frame.shape[1]
    # eigenvectors of every observable are natural candidates (zero entropy for one of them)
    starts = np.vstack([random_pure_batch(config, d), frame.transpose(0, 2, 1).reshape(-1, d)])
    x, f = batched_descent(starts, _objective(frame, kind), max_iters=config.max_iters, tol=config.tol)
    best = int(np.argmin(f))
    return float(f[best]), x[best]


def _bloch_state(r: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(bloch_operator(r))
    return vecs[:, 1]


def _closed_form_t2(family: Family, observables) -> tuple[float, np.ndarray]:
    N, d = family.count, family.dim
    if family.kind == "mub":
        return (1 - 1 / N) * (1 - 1 / d), observables[0].basis[:, 0]
    if family.kind == "qubit":
        return 0.25 * (1 - abs(family.cos_delta)), _qubit_minimizer(observables)
    if family.d_c >= 1:
        return 0.0, observables[0].basis[:, family.common_index]
    return 0.5 * (1 - 1 / d), observables[0].basis[:, 0]  # d_c = 0 is an unbiased pair


def _qubit_minimizer(observables) -> np.ndarray:
    a, b = (observable_bloch(o) for o in observables)
    r = a + b if a @ b >= 0 else a - b
    return _bloch_state(r / np.linalg.norm(r))


def t2_standard(observables: Sequence[Observable], config: SearchConfig | None = None, method: str = "auto") -> EurResult:
    """Minimum over pure states of the average linear entropy.

    ``method`` is ``"auto"`` (closed form when the family is recognized),
    ``"closed_form"`` or ``"search"``.
    """
    config = config or SearchConfig()
    observables = list(observables)
    _frame(observables)
    family = detect_family(observables) if method != "search" else None
    if method == "closed_form" and family is None:
        raise ValueError("no closed form known for these observables")
    if family is not None:
        value, psi = _closed_form_t2(family, observables)
        return EurResult(value, PureState.from_vector(psi), "closed_form", entropy_spread(observables, psi, "t2"))
    if len(observables) == 1:
        psi = observables[0].basis[:, 0]
        return EurResult(0.0, PureState.from_vector(psi), "closed_form")
    value, psi = _search(observables, "t2", config)
    return EurResult(value, PureState.from_vector(psi), "restart_search", entropy_spread(observables, psi, "t2"))


def h2_mub_closed(N: int, d: int) -> float:
    """``-log2((N + d - 1) / (N d))``: a lower bound on the average collision entropy of N MUBs.

    It is attained for ``d = 2`` and for complete sets ``N = d + 1``;
    otherwise the true minimum is strictly larger.
    """
    return float(-np.log2((N + d - 1) / (N * d)))


def _h2_attained(family: Family) -> bool:
    if family.kind == "qubit":
        return True
    if family.kind == "mub":
        return family.dim == 2 or family.count == family.dim + 1
    return family.d_c >= 1


def h2_standard(observables: Sequence[Observable], config: SearchConfig | None = None, method: str = "auto") -> EurResult:
    """Minimum over pure states of the average collision entropy.

    Closed forms are used for qubit pairs, complete MUB sets and pairs
    sharing an eigenvector; everything else is searched.
    """
    config = config or SearchConfig()
    observables = list(observables)
    _frame(observables)
    if len(observables) == 1:
        psi = observables[0].basis[:, 0]
        return EurResult(0.0, PureState.from_vector(psi), "closed_form")
    family = detect_family(observables) if method != "search" else None
    if family is not None and not _h2_attained(family):
        family = None
    if method == "closed_form" and family is None:
        raise ValueError("no closed form known for these observables")
    if family is None:
        value, psi = _search(observables, "h2", config)
        return EurResult(value, PureState.from_vector(psi), "restart_search", entropy_spread(observables, psi))
    if family.kind == "qubit":
        value, psi = float(-np.log2(0.75 + 0.25 * abs(family.cos_delta))), _qubit_minimizer(observables)
    elif family.kind == "mub":
        value = h2_mub_closed(family.count, family.dim)
        _, psi = _search(observables, "h2", config)
    else:
        value, psi = 0.0, observables[0].basis[:, family.common_index]
    return EurResult(value, PureState.from_vector(psi), "closed_form", entropy_spread(observables, psi))


def h2_corollary_bound(observables: Sequence[Observable], config: SearchConfig | None = None, method: str = "auto") -> float:
    """Lower bound ``1 - 2**(-c2)`` on the fidelity measure, with ``c2`` from :func:`h2_standard`.

    The equal-entropy hypothesis is not checked; inspect
    ``h2_standard(...).entropy_spread`` for that.
    """
    return float(1.0 - 2.0 ** (-h2_standard(observables, config, method).value))


def _check_pair(A: Observable, B: Observable):
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")


def t2_successive(A: Observable, B: Observable) -> float:
    """Successive-measurement bound ``t2(A->B) = 1/2 min_i [1 - sum_j |<a_i|b_j>|^4]``."""
    _check_pair(A, B)
    O = overlap_matrix(A, B)
    return float(0.5 * np.min(1.0 - np.sum(O**2, axis=1)))


def t2_succ_avg(A: Observable, B: Observable) -> float:
    """Symmetrized successive bound ``(t2(A->B) + t2(B->A)) / 2``."""
    _check_pair(A, B)
    O = overlap_matrix(A, B)
    ab = 0.5 * np.min(1.0 - np.sum(O**2, axis=1))
    ba = 0.5 * np.min(1.0 - np.sum(O**2, axis=0))
    return float(0.5 * (ab + ba))

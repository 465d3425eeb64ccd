"""scikit-learn style wrappers around the functional API.

``fit`` takes a list of :class:`~incompat.linalg.Observable` (the "data")
and stores results in trailing-underscore attributes, so the estimators
work with ``get_params``/``set_params``/``clone``.
"""

from __future__ import annotations

from typing import Sequence

from sklearn.base import BaseEstimator

from .distance import normalize_alpha, q_alpha_directional_matrix
from .eur import h2_standard, t2_standard, t2_succ_avg
from .exceptions import DimensionMismatch
from .families import detect_family
from .fidelity import fmax_ascent, q_closed_form
from .linalg import Observable, eigenstate_ensemble
from .search import SearchConfig

MEASURES = ("Q", "Q_1", "Q_F", "Q_inf")


def check_observables(observables, min_count: int = 2) -> list[Observable]:
    """Validate a list of observables of one dimension."""
    observables = list(observables)
    if len(observables) < min_count:
        raise DimensionMismatch(f"need at least {min_count} observables, got {len(observables)}")
    for obs in observables:
        if not isinstance(obs, Observable):
            raise TypeError(f"expected Observable, got {type(obs).__name__}")
    if len({o.dim for o in observables}) != 1:
        raise DimensionMismatch("observables have differing dimensions")
    return observables


class _SearchParams(BaseEstimator):
    def _config(self) -> SearchConfig:
        return SearchConfig(restarts=self.restarts, max_iters=self.max_iters, seed=self.seed, tol=self.tol)


class IncompatibilityMeasure(_SearchParams):
    """Incompatibility of a set of observables.

    ``measure="Q"`` is the distinguishability measure (an upper estimate
    ``1 - F_hat`` when no closed form applies); ``"Q_1"``, ``"Q_F"`` and
    ``"Q_inf"`` are disturbance measures averaged over ordered pairs.

    Attributes set by ``fit``: ``value_``, ``method_``, and ``povm_`` (Q)
    or ``directional_`` (disturbance measures).
    """

    def __init__(self, measure: str = "Q", method: str = "auto", restarts: int = 64, max_iters: int = 500, seed: int = 42, tol: float = 1e-10):
        self.measure = measure
        self.method = method
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.tol = tol

    def fit(self, observables: Sequence[Observable], y=None):
        observables = check_observables(observables)
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}; expected one of {MEASURES}")
        config = self._config()
        if self.measure == "Q":
            closed = q_closed_form(observables) if self.method != "search" else None
            if closed is not None and closed[1] is not None:
                self.value_, self.povm_, self.method_ = closed[0], closed[1], "closed_form"
            else:
                res = fmax_ascent(eigenstate_ensemble(observables), config)
                self.value_, self.povm_, self.method_ = res.q_upper, res.povm, "ascent"
                if closed is not None:
                    self.value_, self.method_ = closed[0], "closed_form"
            return self
        alpha = normalize_alpha(self.measure[2:])
        self.directional_ = q_alpha_directional_matrix(observables, alpha, config, self.method)
        self.value_ = float(self.directional_.sum() / len(observables) ** 2)
        closed = alpha == "F" and self.method != "search" and detect_family(observables) is not None
        self.method_ = "closed_form" if closed else "restart_search"
        return self


class EntropicBound(_SearchParams):
    """Minimum average entropy of a set of observables.

    ``kind`` is ``"t2"``, ``"h2"`` or ``"t2_succ"`` (pairs only). Sets
    ``value_``, ``method_`` and ``minimizer_`` (``None`` for ``"t2_succ"``).
    """

    def __init__(self, kind: str = "t2", method: str = "auto", restarts: int = 64, max_iters: int = 500, seed: int = 42, tol: float = 1e-10):
        self.kind = kind
        self.method = method
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.tol = tol

    def fit(self, observables: Sequence[Observable], y=None):
        if self.kind == "t2_succ":
            A, B = check_observables(observables)
            self.value_, self.method_, self.minimizer_ = t2_succ_avg(A, B), "closed_form", None
            return self
        if self.kind not in ("t2", "h2"):
            raise ValueError(f"unknown kind {self.kind!r}")
        solve = t2_standard if self.kind == "t2" else h2_standard
        res = solve(check_observables(observables, min_count=1), self._config(), self.method)
        self.value_, self.method_, self.minimizer_ = res.value, res.method, res.minimizer
        return self

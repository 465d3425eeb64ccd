"""Inequality audits over fixed corpora of observables.

Every row compares the two sides of one inequality ``lhs >= rhs`` on one
instance. Rows in :data:`GATING` are proved facts, so a violation there
signals a bug; the remaining rows document bounds that are known to fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import VARIANTS, qp_qf_lower, sdp_q_lower
from .distance import q_alpha_directional
from .eur import h2_corollary_bound, t2_standard, t2_succ_avg
from .families import detect_family
from .fidelity import fmax_ascent, q_closed_form, subspace_fmax_composition
from .linalg import Observable, eigenstate_ensemble, mub_bases, qubit_observable, random_observable, subspace_pair
from .search import SearchConfig

CORPORA = ("qubit_grid", "mub_set", "subspace_grid", "random")
GATING = {"Q>=t2", "QF>=t2succ", "additivity", "range_Q", "range_QF"}
TIGHT_TOL = 1e-9
EXACT_SLACK = 1e-9
SEARCH_SLACK = 5e-3
RANDOM_PAIRS = 50
RANDOM_DIM = 3


@dataclass(frozen=True)
class AuditRow:
    instance: str
    inequality: str
    lhs: float
    rhs: float
    verdict: str  # "tight", "consistent" or "violated"

    @property
    def gating(self) -> bool:
        return self.inequality in GATING

    def as_dict(self) -> dict:
        return {"instance": self.instance, "inequality": self.inequality, "lhs": self.lhs, "rhs": self.rhs, "verdict": self.verdict}


def _row(instance: str, inequality: str, lhs: float, rhs: float, slack: float) -> AuditRow:
    lhs, rhs = float(lhs), float(rhs)
    if abs(lhs - rhs) <= TIGHT_TOL:
        verdict = "tight"
    elif lhs >= rhs - slack:
        verdict = "consistent"
    else:
        verdict = "violated"
    return AuditRow(instance, inequality, lhs, rhs, verdict)


def _equality_row(instance: str, inequality: str, lhs: float, rhs: float, slack: float) -> AuditRow:
    diff = abs(float(lhs) - float(rhs))
    verdict = "tight" if diff <= TIGHT_TOL else "consistent" if diff <= slack else "violated"
    return AuditRow(instance, inequality, float(lhs), float(rhs), verdict)


def _range_row(instance: str, name: str, value: float, slack: float) -> AuditRow:
    inside = -slack <= value <= 1.0 + slack
    return AuditRow(instance, name, float(value), 0.0, "consistent" if inside else "violated")


def _q_value(observables, config: SearchConfig) -> tuple[float, bool]:
    """Q and whether it is exact; otherwise the ascent's upper estimate."""
    closed = q_closed_form(observables)
    if closed is not None:
        return float(closed[0]), True
    return fmax_ascent(eigenstate_ensemble(observables), config).q_upper, False


def _qf_directional(A, B, config) -> tuple[float, bool]:
    res = q_alpha_directional(A, B, "F", config)
    return res.value, res.method == "closed_form"


def _instance_rows(name: str, observables: list[Observable], config: SearchConfig) -> list[AuditRow]:
    rows = []
    q, q_exact = _q_value(observables, config)
    t2 = t2_standard(observables, config)
    exact = q_exact and t2.method == "closed_form"
    rows.append(_row(name, "Q>=t2", q, t2.value, EXACT_SLACK if exact else SEARCH_SLACK))
    rows.append(_range_row(name, "range_Q", q, EXACT_SLACK))
    rows.append(_row(name, "Q>=h2_bound", q, h2_corollary_bound(observables, config), EXACT_SLACK if q_exact else SEARCH_SLACK))
    sdp = sdp_q_lower(eigenstate_ensemble(observables))
    rows.append(_row(name, "Q>=sdp", q, 1.0 - sdp.bound_value, EXACT_SLACK if q_exact else SEARCH_SLACK))
    if len(observables) == 2:
        A, B = observables
        ab, ab_exact = _qf_directional(A, B, config)
        ba, ba_exact = _qf_directional(B, A, config)
        qf = 0.25 * (ab + ba)
        slack = EXACT_SLACK if ab_exact and ba_exact else SEARCH_SLACK
        rows.append(_row(name, "QF>=t2succ", qf, t2_succ_avg(A, B), slack))
        rows.append(_range_row(name, "range_QF", qf, EXACT_SLACK))
        for variant in VARIANTS:
            report = qp_qf_lower(A, B, variant)
            rows.append(_row(name, f"QF_dir>=qp_{variant}", ab, report.bound_value, EXACT_SLACK if ab_exact else SEARCH_SLACK))
    return rows


def _qubit_grid():
    a = np.array([0.0, 0.0, 1.0])
    for c in np.round(np.linspace(0.0, 1.0, 11), 10):
        b = np.array([np.sqrt(max(0.0, 1.0 - c * c)), 0.0, c])
        yield f"qubit cos={float(c)!r}", [qubit_observable(a), qubit_observable(b)]


def _mub_set():
    for N, d in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (2, 5)]:
        yield f"mub N={N} d={d}", mub_bases(d, N)


def _subspace_grid():
    for d in (3, 4, 5):
        for d_c in range(d):
            yield f"subspace d={d} d_c={d_c}", list(subspace_pair(d, d_c))


def _random(config: SearchConfig):
    rng = np.random.default_rng([config.seed, 7])
    for i in range(RANDOM_PAIRS):
        yield f"random d={RANDOM_DIM} #{i}", [random_observable(rng, RANDOM_DIM), random_observable(rng, RANDOM_DIM)]
    basis = np.eye(RANDOM_DIM)
    yield f"commuting d={RANDOM_DIM}", [Observable(np.arange(RANDOM_DIM, dtype=float), basis), Observable(np.array([2.0, 0.0, 1.0]), basis)]


def run_audit(corpus: str, config: SearchConfig | None = None) -> list[AuditRow]:
    config = config or SearchConfig()
    if corpus not in CORPORA:
        raise ValueError(f"unknown corpus {corpus!r}; expected one of {CORPORA}")
    if corpus == "random":
        instances = _random(config)
    else:
        instances = {"qubit_grid": _qubit_grid, "mub_set": _mub_set, "subspace_grid": _subspace_grid}[corpus]()
    rows = []
    for name, observables in instances:
        rows.extend(_instance_rows(name, observables, config))
        if corpus == "subspace_grid":
            family = detect_family(observables)
            d, d_c = family.dim, family.d_c
            composed = 1.0 - subspace_fmax_composition(d, d_c)
            rows.append(_equality_row(name, "additivity", composed, _q_value(observables, config)[0], EXACT_SLACK))
    return rows


def audit_failed(rows: list[AuditRow]) -> bool:
    return any(r.gating and r.verdict == "violated" for r in rows)

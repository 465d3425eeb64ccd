"""Recognition of observable families that admit closed-form measures.

Detection works on overlap matrices only, at tolerance 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .linalg import Observable, observable_bloch, overlap_matrix

PATTERN_TOL = 1e-9


@dataclass(frozen=True)
class Family:
    kind: str  # "qubit", "mub", "subspace"
    dim: int
    count: int
    cos_delta: float = 0.0
    d_c: int = 0
    common_index: int = -1  # an eigenvector of the first observable shared by the second


def _is_mub(O: np.ndarray) -> bool:
    d = O.shape[0]
    return bool(np.max(np.abs(O - 1.0 / d)) <= PATTERN_TOL)


def subspace_pattern(O: np.ndarray) -> Optional[tuple[int, int]]:
    """Return ``(d_c, common_row)`` if ``O`` matches the commuting-subspace pattern."""
    d = O.shape[0]
    rows = np.flatnonzero(np.abs(O.max(axis=1) - 1.0) <= PATTERN_TOL)
    cols = np.argmax(O[rows], axis=1) if rows.size else np.array([], dtype=int)
    d_c = rows.size
    if d_c == d:
        return d_c - 1, int(rows[0])  # fully commuting pair
    rest_r = np.setdiff1d(np.arange(d), rows)
    rest_c = np.setdiff1d(np.arange(d), cols)
    if rest_r.size != d - d_c or rest_c.size != d - d_c:
        return None
    block = O[np.ix_(rest_r, rest_c)]
    if np.max(np.abs(block - 1.0 / (d - d_c))) > PATTERN_TOL:
        return None
    return d_c, int(rows[0]) if d_c else -1


def detect_family(observables: Sequence[Observable]) -> Optional[Family]:
    """Identify qubit pairs, MUB sets and commuting-subspace pairs."""
    N = len(observables)
    if N < 2:
        return None
    d = observables[0].dim
    if all(_is_mub(overlap_matrix(A, B)) for A, B in combinations(observables, 2)):
        return Family("mub", d, N)
    if N != 2:
        return None
    A, B = observables
    if d == 2:
        c = float(np.clip(observable_bloch(A) @ observable_bloch(B), -1.0, 1.0))
        return Family("qubit", 2, 2, cos_delta=c)
    found = subspace_pattern(overlap_matrix(A, B))
    if found is None:
        return None
    d_c, row = found
    return Family("subspace", d, 2, d_c=d_c, common_index=row)

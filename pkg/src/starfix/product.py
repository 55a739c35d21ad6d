"""Product-space machinery.

An n-tuple U = (x_1, ..., x_n) of points lifts a mapping F: X^n -> X and a
self-map g: X -> X to two self-maps of X^n:

    f_star(U) = (F(U star 1), ..., F(U star n)),  where U star i is U
                projected through row i of the star operation
    big_g(U)  = (g(x_1), ..., g(x_n))

A point with f_star(U) = big_g(U) solves the n-tupled coincidence problem.
X^n carries two metrics, the averaged delta_n and the maximum nabla_n, which
sandwich each other ((1/n) nabla <= delta <= nabla), and the componentwise
order order_leq_n.

Tuples are numpy arrays: shape (n, k) over a VectorSpace, shape (n,) of
point ids over a FiniteSpace. All transformations here are stateless;
concurrent evaluation over disjoint tuples needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .errors import EnumerationBoundError
from .index_algebra import StarOp
from .spaces import FiniteSpace, Space, VectorSpace

__all__ = [
    "as_tuple",
    "InducedMaps",
    "project_star",
    "f_star",
    "big_g",
    "delta_n",
    "nabla_n",
    "order_leq_n",
    "ProjectionMetricReport",
    "lemma6_check",
    "tabulate_induced",
]

EQ_TOL = 1e-12


def as_tuple(space: Space, n: int, U) -> np.ndarray:
    """Normalize U to the array layout for the space; validates length n."""
    if isinstance(space, VectorSpace):
        arr = np.asarray(U, dtype=np.float64)
        if arr.ndim == 1 and space.k == 1:
            arr = arr[:, None]
        if arr.shape != (n, space.k):
            raise ValueError(f"tuple must have shape ({n}, {space.k}), got {arr.shape}")
        return arr
    arr = np.asarray(U, dtype=np.int64)
    if arr.shape != (n,):
        raise ValueError(f"tuple must have shape ({n},), got {arr.shape}")
    if arr.min() < 0 or arr.max() >= space.p:
        raise ValueError(f"point ids must lie in 0..{space.p - 1}")
    return arr


def project_star(U: np.ndarray, star: StarOp, i: int) -> np.ndarray:
    """The projected tuple U star i = (x_{i_1}, ..., x_{i_n}); i is 1-based."""
    if not 1 <= i <= star.n:
        raise IndexError(f"projection index {i} outside 1..{star.n}")
    U = np.asarray(U)
    if U.shape[0] != star.n:
        raise ValueError(f"tuple has {U.shape[0]} slots, star operation has {star.n}")
    return U[star.zero_based[i - 1]]


@dataclass(frozen=True)
class InducedMaps:
    """F, g and a star operation, lifted to self-maps of X^n.

    F takes a stacked argument array of shape (n, k) (or (n,) point ids on a
    finite space) and may accept a leading batch axis; g maps points and may
    batch likewise.
    """

    F: Callable
    g: Callable
    star: StarOp

    def f_star(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U)
        return np.stack(
            [self.F(U[row]) for row in self.star.zero_based], axis=0
        )

    def big_g(self, U: np.ndarray) -> np.ndarray:
        return self.g(np.asarray(U))


def f_star(maps: InducedMaps, U) -> np.ndarray:
    return maps.f_star(np.asarray(U))


def big_g(maps: InducedMaps, U) -> np.ndarray:
    return maps.big_g(np.asarray(U))


def _paired(U, V) -> tuple[np.ndarray, np.ndarray]:
    U, V = np.asarray(U), np.asarray(V)
    if U.shape != V.shape:
        raise ValueError(f"tuple shapes differ: {U.shape} vs {V.shape}")
    return U, V


def delta_n(U, V, d: Callable) -> float:
    """Averaged product metric: (1/n) of the summed slotwise distances."""
    U, V = _paired(U, V)
    return float(np.mean([d(x, y) for x, y in zip(U, V)]))


def nabla_n(U, V, d: Callable) -> float:
    """Maximum product metric: the largest slotwise distance."""
    U, V = _paired(U, V)
    return float(np.max([d(x, y) for x, y in zip(U, V)]))


def order_leq_n(U, V, leq: Callable) -> bool:
    """Componentwise tuple order: every slot of U below the slot of V."""
    U, V = _paired(U, V)
    return all(leq(x, y) for x, y in zip(U, V))


@dataclass(frozen=True)
class ProjectionMetricReport:
    """Per-projection comparison of slot distances against the two metrics.

    For each i, sum_matches[i] says whether the averaged distance over the
    projected slots equals delta on the g-images, max_matches[i] the same
    for the maximum, and max_bounded[i] whether the projected maximum stays
    below nabla. The equalities are guaranteed for permuted operations; the
    bound holds for every operation.
    """

    delta: float
    nabla: float
    per_i_avg: tuple
    per_i_max: tuple
    sum_matches: tuple
    max_matches: tuple
    max_bounded: tuple

    @property
    def all_equal(self) -> bool:
        return all(self.sum_matches) and all(self.max_matches)

    @property
    def all_bounded(self) -> bool:
        return all(self.max_bounded)


def lemma6_check(U, V, g: Callable, star: StarOp, d: Callable, tol: float = EQ_TOL) -> ProjectionMetricReport:
    U, V = _paired(U, V)
    gU = np.stack([np.asarray(g(x)) for x in U])
    gV = np.stack([np.asarray(g(y)) for y in V])
    slot_d = np.array([d(x, y) for x, y in zip(gU, gV)], dtype=np.float64)
    delta = float(np.mean(slot_d))
    nabla = float(np.max(slot_d))
    rows = star.zero_based
    per_avg = tuple(float(np.mean(slot_d[row])) for row in rows)
    per_max = tuple(float(np.max(slot_d[row])) for row in rows)
    return ProjectionMetricReport(
        delta=delta,
        nabla=nabla,
        per_i_avg=per_avg,
        per_i_max=per_max,
        sum_matches=tuple(abs(a - delta) <= tol for a in per_avg),
        max_matches=tuple(abs(m - nabla) <= tol for m in per_max),
        max_bounded=tuple(m <= nabla + tol for m in per_max),
    )


def tabulate_induced(
    space: FiniteSpace,
    f_table: np.ndarray,
    g_table: np.ndarray,
    star: StarOp,
    bound: int = 10**6,
) -> tuple[np.ndarray, np.ndarray]:
    """Materialize f_star and big_g as code-indexed tables on a finite space.

    Returns (fstar_codes, bigg_codes): arrays of length p**n where entry c
    is the packed code of the image tuple. This is the table route used to
    cross-check the per-slot enumeration route.
    """
    p, n = space.p, star.n
    f_flat = np.ascontiguousarray(np.asarray(f_table, np.int64).reshape(-1))
    g_tab = np.ascontiguousarray(np.asarray(g_table, np.int64))
    if f_flat.shape[0] != p**n:
        raise ValueError(f"F table must have {p**n} entries, got {f_flat.shape[0]}")
    if g_tab.shape != (p,):
        raise ValueError(f"g table must have {p} entries, got {g_tab.shape}")
    if p**n > bound:
        raise EnumerationBoundError(p**n, bound, "tabulation")
    rows0 = np.ascontiguousarray(star.zero_based)
    return (
        _kernels.fstar_codes(f_flat, rows0, p, n),
        _kernels.bigg_codes(g_tab, p, n),
    )

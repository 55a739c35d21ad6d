"""Concrete ordered metric spaces.

Two carriers are supported. VectorSpace is R^k with componentwise order and
a choice of euclidean, max, or sum metric; it is where the iterative solver
lives. FiniteSpace tabulates a distance matrix and an order relation over p
points (ids 0..p-1); everything on it can be checked exhaustively, which is
what makes exact oracles possible.

Order comparisons on R^k are exact, with no epsilon: a tolerance-padded
order would not be transitive, so it would not be a partial order at all.
Metric axioms on R^k are only ever spot-checked by sampling; FiniteSpace
gets full validation.

Both space types are immutable after construction and safe for concurrent
reads. Random generation takes explicit seeds so concurrent samplers never
share state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

__all__ = [
    "METRIC_KINDS",
    "VectorSpace",
    "FiniteSpace",
    "Space",
    "Violation",
    "validate_finite_space",
    "comparable",
    "random_comparable_pair",
    "chain_space",
    "parse_finite_space_text",
    "read_finite_space_file",
    "format_finite_space",
]

METRIC_KINDS = ("euclidean", "max", "sum")


@dataclass(frozen=True)
class VectorSpace:
    """R^k under componentwise order; points are float arrays of shape (k,)."""

    k: int
    metric_kind: str = "euclidean"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("dimension must be at least 1")
        if self.metric_kind not in METRIC_KINDS:
            raise ValueError(
                f"metric_kind must be one of {METRIC_KINDS}, got {self.metric_kind!r}"
            )

    @property
    def kind(self) -> str:
        return "vector"

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape != (self.k,):
            raise ValueError(f"point must have {self.k} components, got {x.shape}")
        return x

    def metric(self, x, y) -> float:
        return float(self.metric_batch(self.point(x), self.point(y)))

    def metric_batch(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Distance along the last axis; leading axes broadcast."""
        diff = np.abs(np.asarray(x, np.float64) - np.asarray(y, np.float64))
        if self.metric_kind == "euclidean":
            return np.sqrt(np.sum(diff * diff, axis=-1))
        if self.metric_kind == "max":
            return np.max(diff, axis=-1)
        return np.sum(diff, axis=-1)

    def leq(self, x, y) -> bool:
        return bool(np.all(self.point(x) <= self.point(y)))

    def leq_batch(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.all(np.asarray(x) <= np.asarray(y), axis=-1)


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Tabulated space over point ids 0..p-1.

    dist is a p x p float matrix, leq_table a p x p boolean matrix with
    leq_table[a, b] meaning a is below b. Construction only checks shapes;
    run validate_finite_space to audit the axioms.
    """

    dist: np.ndarray
    leq_table: np.ndarray

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=np.float64)
        leq = np.asarray(self.leq_table, dtype=bool)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise ValueError(f"distance matrix must be square, got {dist.shape}")
        if leq.shape != dist.shape:
            raise ValueError(
                f"order matrix shape {leq.shape} does not match distance {dist.shape}"
            )
        if dist.shape[0] < 1:
            raise ValueError("a space needs at least one point")
        dist.setflags(write=False)
        leq.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "leq_table", leq)

    @property
    def kind(self) -> str:
        return "finite"

    @property
    def p(self) -> int:
        return self.dist.shape[0]

    def point(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.p:
            raise ValueError(f"point id {x} outside 0..{self.p - 1}")
        return x

    def metric(self, x, y) -> float:
        return float(self.dist[self.point(x), self.point(y)])

    def metric_batch(self, x, y) -> np.ndarray:
        return self.dist[np.asarray(x, np.int64), np.asarray(y, np.int64)]

    def leq(self, x, y) -> bool:
        return bool(self.leq_table[self.point(x), self.point(y)])

    def leq_batch(self, x, y) -> np.ndarray:
        return self.leq_table[np.asarray(x, np.int64), np.asarray(y, np.int64)]


Space = Union[VectorSpace, FiniteSpace]


@dataclass(frozen=True)
class Violation:
    """One broken axiom: which one, and the point ids that witness it."""

    axiom: str
    witness: tuple
    detail: str = field(default="", compare=False)


def _first_true(mask: np.ndarray):
    idx = np.argwhere(mask)
    return None if idx.size == 0 else tuple(int(v) for v in idx[0])


def validate_finite_space(space: FiniteSpace) -> list[Violation]:
    """Audit all metric and order axioms; an empty list means valid.

    Violations are content, not failures: every broken axiom is reported
    with a witness, one representative witness per axiom kind per pair.
    """
    d, leq, p = space.dist, space.leq_table, space.p
    out: list[Violation] = []

    for i, j in np.argwhere(d < 0):
        out.append(Violation("nonnegative", (int(i), int(j)), f"d={d[i, j]}"))
    for (i,) in np.argwhere(np.diag(d) != 0):
        out.append(Violation("identity", (int(i), int(i)), f"d(x,x)={d[i, i]}"))
    off = ~np.eye(p, dtype=bool)
    for i, j in np.argwhere((d == 0) & off):
        out.append(Violation("separation", (int(i), int(j)), "d=0 for distinct points"))
    asym = d != d.T
    for i, j in np.argwhere(asym & (np.arange(p)[:, None] < np.arange(p))):
        out.append(
            Violation("symmetry", (int(i), int(j)), f"{d[i, j]} vs {d[j, i]}")
        )
    # d[i,k] <= d[i,j] + d[j,k] for all triples, vectorized over one axis
    for j in range(p):
        bad = _first_true(d > d[:, j][:, None] + d[j, :][None, :])
        if bad is not None:
            i, k = bad
            out.append(
                Violation(
                    "triangle",
                    (i, j, k),
                    f"d({i},{k})={d[i, k]} > {d[i, j]} + {d[j, k]}",
                )
            )

    for (i,) in np.argwhere(~np.diag(leq)):
        out.append(Violation("reflexive", (int(i),), "x not below itself"))
    for i, j in np.argwhere(leq & leq.T & off & (np.arange(p)[:, None] < np.arange(p))):
        out.append(
            Violation("antisymmetric", (int(i), int(j)), "both directions hold")
        )
    closure = (leq.astype(np.int64) @ leq.astype(np.int64)) > 0  # two-step reach
    bad = _first_true(closure & ~leq)
    if bad is not None:
        i, k = bad
        j = int(np.argmax(leq[i] & leq[:, k]))
        out.append(Violation("transitive", (i, j, k), "two-step chain not closed"))

    return out


def comparable(space: Space, x, y) -> bool:
    """True iff x is below y or y is below x."""
    return space.leq(x, y) or space.leq(y, x)


def random_comparable_pair(space: VectorSpace, rng, box) -> tuple[np.ndarray, np.ndarray]:
    """Draw (x, y) with x below y: a base point plus nonnegative offsets.

    Constructive by design; rejection sampling would loop unboundedly in
    high dimension. rng is a numpy Generator or a seed. box is (lo, hi).
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    lo, hi = _box_bounds(box, space.k)
    x = rng.uniform(lo, hi)
    y = x + rng.uniform(0.0, 1.0, size=space.k) * (hi - x)
    return x, y


def _box_bounds(box, k: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = box
    lo = np.broadcast_to(np.asarray(lo, np.float64), (k,)).copy()
    hi = np.broadcast_to(np.asarray(hi, np.float64), (k,)).copy()
    if np.any(hi < lo):
        raise ValueError("box upper bounds must not be below lower bounds")
    return lo, hi


def chain_space(p: int) -> FiniteSpace:
    """Totally ordered chain 0 < 1 < ... < p-1 with dist(i,j) = |i-j|."""
    ids = np.arange(p)
    return FiniteSpace(
        np.abs(ids[:, None] - ids[None, :]).astype(np.float64),
        ids[:, None] <= ids[None, :],
    )


# ---------------------------------------------------------------------------
# text format: line 1 = p, then p distance rows, then p rows of 0/1 order


def parse_finite_space_text(text: str) -> FiniteSpace:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty finite space text")
    try:
        p = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be p, got {lines[0]!r}") from None
    if len(lines) != 1 + 2 * p:
        raise ValueError(
            f"expected {2 * p} matrix rows after the header, got {len(lines) - 1}"
        )

    def rows(chunk, cast):
        parsed = []
        for ln in chunk:
            vals = [cast(v) for v in ln.split()]
            if len(vals) != p:
                raise ValueError(f"row {ln!r} must have {p} entries")
            parsed.append(vals)
        return parsed

    try:
        dist = rows(lines[1 : 1 + p], float)
        order = rows(lines[1 + p :], int)
    except ValueError as exc:
        raise ValueError(f"bad matrix entry: {exc}") from None
    order_arr = np.asarray(order)
    if not np.isin(order_arr, (0, 1)).all():
        raise ValueError("order rows must contain only 0 and 1")
    return FiniteSpace(np.asarray(dist), order_arr.astype(bool))


def read_finite_space_file(path) -> FiniteSpace:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_finite_space_text(fh.read())


def format_finite_space(space: FiniteSpace) -> str:
    dist_rows = "\n".join(
        " ".join(repr(float(v)) for v in row) for row in space.dist
    )
    leq_rows = "\n".join(
        " ".join(str(int(v)) for v in row) for row in space.leq_table
    )
    return f"{space.p}\n{dist_rows}\n{leq_rows}\n"

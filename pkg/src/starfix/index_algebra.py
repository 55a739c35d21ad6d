"""Binary operations on the index set {1, ..., n}.

A star operation is stored as an n x n matrix of 1-based indices: row i
lists (i star 1, ..., i star n), the coordinates that feed the i-th
component equation after projection. The operation is *permuted* when every
row is a permutation of {1, ..., n}; several equivalences between averaged
and maximum contraction bounds hold exactly in that case, so the predicate
is computed, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StarOp",
    "make_star",
    "forward_cyclic",
    "backward_cyclic",
    "skew_1",
    "skew_n",
    "karapinar_quadruple",
    "is_permuted",
    "row_projection",
    "preset",
    "preset_names",
    "parse_star_text",
    "read_star_file",
    "format_star",
]


@dataclass(frozen=True, eq=False)
class StarOp:
    """Index operation on {1..n} as a matrix; entries[i-1][k-1] = i star k."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("star operations need n >= 2")
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.shape != (self.n, self.n):
            raise ValueError(
                f"expected a {self.n}x{self.n} matrix, got shape {entries.shape}"
            )
        if entries.min() < 1 or entries.max() > self.n:
            bad = np.argwhere((entries < 1) | (entries > self.n))[0]
            raise ValueError(
                f"entry at row {bad[0] + 1}, column {bad[1] + 1} is outside 1..{self.n}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def zero_based(self) -> np.ndarray:
        """The matrix shifted to 0-based indices, for array indexing."""
        return self.entries - 1

    def __eq__(self, other):
        return (
            isinstance(other, StarOp)
            and self.n == other.n
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash((self.n, self.entries.tobytes()))

    def __repr__(self):
        rows = "; ".join(" ".join(str(v) for v in row) for row in self.entries)
        return f"StarOp(n={self.n}, [{rows}])"


def make_star(n: int, entries) -> StarOp:
    """Validating constructor from any nested sequence of 1-based indices."""
    return StarOp(n, np.asarray(entries))


def _grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    i, k = np.indices((n, n), dtype=np.int64)
    return i + 1, k + 1


def forward_cyclic(n: int) -> StarOp:
    """Row i cycles forward from i: (i, i+1, ..., n, 1, 2, ...). Permuted."""
    i, k = _grid(n)
    return StarOp(n, np.where(k <= n - i + 1, i + k - 1, i + k - n - 1))


def backward_cyclic(n: int) -> StarOp:
    """Row i cycles backward from i: (i, i-1, ..., 1, n, n-1, ...). Permuted."""
    i, k = _grid(n)
    return StarOp(n, np.where(k <= i, i - k + 1, n + i - k + 1))


def skew_1(n: int) -> StarOp:
    """Row i walks down to 1 then reflects: (i, i-1, ..., 1, 2, 3, ...)."""
    i, k = _grid(n)
    return StarOp(n, np.where(k <= i, i - k + 1, k - i + 1))


def skew_n(n: int) -> StarOp:
    """Row i walks up to n then reflects: (i, i+1, ..., n, n-1, ...)."""
    i, k = _grid(n)
    return StarOp(n, np.where(k <= n - i + 1, i + k - 1, 2 * n - i - k + 1))


def karapinar_quadruple() -> StarOp:
    """The classical quadrupled fixed-point index pattern (n = 4)."""
    return make_star(4, [[1, 2, 3, 4], [1, 4, 3, 2], [3, 2, 1, 4], [3, 4, 1, 2]])


def is_permuted(star: StarOp) -> bool:
    """True when every row is a permutation of {1..n}."""
    expected = np.arange(1, star.n + 1, dtype=np.int64)
    return bool(np.all(np.sort(star.entries, axis=1) == expected))


def row_projection(star: StarOp, i: int) -> tuple[int, ...]:
    """The 1-based index tuple (i star 1, ..., i star n); i is 1-based."""
    if not 1 <= i <= star.n:
        raise IndexError(f"row index {i} outside 1..{star.n}")
    return tuple(int(v) for v in star.entries[i - 1])


# ---------------------------------------------------------------------------
# named presets; string ids accepted anywhere a star operation is configured

_FIXED_PRESETS = {
    "coupled2": lambda: make_star(2, [[1, 2], [2, 1]]),
    "borcut3": lambda: make_star(3, [[1, 2, 3], [2, 1, 3], [3, 2, 1]]),
    "karapinar4": karapinar_quadruple,
}

_FAMILY_PRESETS = {
    "forward_cyclic": forward_cyclic,
    "backward_cyclic": backward_cyclic,
    "skew_1": skew_1,
    "skew_n": skew_n,
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_FIXED_PRESETS)) + tuple(sorted(_FAMILY_PRESETS))


def preset(name: str, n: int | None = None) -> StarOp:
    """Look up a preset by id. Family presets need n; fixed ones forbid it."""
    if name in _FIXED_PRESETS:
        star = _FIXED_PRESETS[name]()
        if n is not None and n != star.n:
            raise ValueError(f"preset {name!r} has n={star.n}, got n={n}")
        return star
    if name in _FAMILY_PRESETS:
        if n is None:
            raise ValueError(f"preset {name!r} needs n")
        return _FAMILY_PRESETS[name](n)
    raise ValueError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")


# ---------------------------------------------------------------------------
# text format: first line n, then n lines of n 1-based indices


def parse_star_text(text: str) -> StarOp:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("empty star operation text")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be n, got {lines[0]!r}") from None
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows after the header, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            rows.append([int(v) for v in ln.split()])
        except ValueError:
            raise ValueError(f"non-integer entry in row {ln!r}") from None
    return make_star(n, rows)


def read_star_file(path) -> StarOp:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_star_text(fh.read())


def format_star(star: StarOp) -> str:
    body = "\n".join(" ".join(str(v) for v in row) for row in star.entries)
    return f"{star.n}\n{body}\n"

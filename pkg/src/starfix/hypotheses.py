"""Hypothesis checkers for the coincidence-point existence conditions.

Every check returns a three-valued HypothesisReport: holds (proved, always
by exhaustion on a finite space), fails (with a concrete reproducible
witness), or unknown (a sampled check found no counterexample). Unknown is
permission to proceed: the conditions these checks probe are sufficient for
existence, not necessary, so the solver only warns.

Convention for mapping arguments: on a FiniteSpace, F and g are integer
tables (F indexed by n point ids, g by one); on a VectorSpace they are
batch-aware callables, F taking (..., n, k) arrays to (..., k) and g taking
(..., k) to (..., k). Expression text and parsed mapping asts are accepted
wherever a callable is, and g may be None for the identity.

All checks are pure. The contraction sampler draws in fixed-size chunks
with per-chunk seeds, so results are identical no matter how many workers
evaluate the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import _kernels, dsl
from ._util import DEFAULT_BOUND, DEFAULT_BOX, DEFAULT_SAMPLES, DEFAULT_SEED, to_jsonable
from .errors import EnumerationBoundError
from .index_algebra import StarOp, is_permuted
from .spaces import FiniteSpace, Space, VectorSpace, _box_bounds

__all__ = [
    "HOLDS",
    "FAILS",
    "UNKNOWN",
    "HypothesisReport",
    "ComparisonFn",
    "ContractionVariant",
    "VARIANT_IDS",
    "SamplerConfig",
    "check_monotone_property",
    "check_argumentwise_monotone",
    "check_initial_condition",
    "check_commuting",
    "check_contraction",
    "implied_variants",
    "Flag",
    "declare_topological_flags",
]

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"


def as_tuple_fn(F, n: int, k: int) -> Callable:
    """Normalize F to a batch-aware callable on stacked (n, k) arguments."""
    if callable(F):
        return F
    ast = dsl.parse_mapping(F, n, k) if isinstance(F, str) else F
    if not isinstance(ast, dsl.MappingAst):
        raise TypeError(f"cannot use {type(F).__name__} as a mapping on R^k")
    return lambda pts: dsl.eval_mapping(ast, np.asarray(pts, dtype=np.float64))


def as_point_fn(g, k: int) -> Callable:
    """Normalize g to a callable on points; None means the identity."""
    if g is None:
        return lambda x: np.asarray(x, dtype=np.float64)
    if callable(g):
        return g
    ast = dsl.parse_mapping(g, 1, k) if isinstance(g, str) else g
    if not isinstance(ast, dsl.MappingAst):
        raise TypeError(f"cannot use {type(g).__name__} as a self-map on R^k")
    return lambda x: dsl.eval_mapping(ast, np.asarray(x, dtype=np.float64)[..., None, :])


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of one hypothesis check."""

    hypothesis: str
    verdict: str
    witness: Union[dict, None] = None
    samples: int = 0
    seed: Union[int, None] = None
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.verdict not in (HOLDS, FAILS, UNKNOWN):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAILS and not self.witness:
            raise ValueError("a fails verdict must carry a witness")

    def to_json(self) -> dict:
        out = {
            "hypothesis": self.hypothesis,
            "verdict": self.verdict,
            "samples": int(self.samples),
            "seed": self.seed,
        }
        if self.witness is not None:
            out["witness"] = to_jsonable(self.witness)
        if self.details:
            out["details"] = to_jsonable(self.details)
        return out


# ---------------------------------------------------------------------------
# comparison functions

_PHI_GRID_LO, _PHI_GRID_HI, _PHI_GRID_COUNT = 1e-9, 1e9, 541


@dataclass(frozen=True)
class ComparisonFn:
    """A control function phi for contraction bounds.

    linear(alpha) is phi(t) = alpha*t with 0 <= alpha < 1; that much algebra
    certifies the strict-shrink property for every t > 0, so linear phis are
    class 'phi' (hence also in the wider class 'omega'). An expression phi
    is only ever sample-falsified on a grid; membership in either class
    beyond phi(t) < t is declared by the user, never proven here.
    """

    kind: str
    alpha: Union[float, None] = None
    ast: Union[dsl.MappingAst, None] = None
    declared_class: str = "none"

    def __post_init__(self):
        if self.kind not in ("linear", "expression"):
            raise ValueError(f"bad comparison kind {self.kind!r}")
        if self.declared_class not in ("phi", "omega", "none"):
            raise ValueError(f"bad declared class {self.declared_class!r}")
        if self.kind == "linear":
            if self.alpha is None or not 0.0 <= self.alpha < 1.0:
                raise ValueError(f"linear comparison needs 0 <= alpha < 1, got {self.alpha}")
        elif self.ast is None or (self.ast.n, self.ast.k) != (1, 1):
            raise ValueError("expression comparison needs a scalar x1 mapping")

    @classmethod
    def linear(cls, alpha: float) -> "ComparisonFn":
        return cls("linear", alpha=float(alpha), declared_class="phi")

    @classmethod
    def expression(cls, source, declared_class: str = "none") -> "ComparisonFn":
        ast = source if isinstance(source, dsl.MappingAst) else dsl.parse_mapping(source, 1, 1)
        return cls("expression", ast=ast, declared_class=declared_class)

    @property
    def is_increasing(self) -> Union[bool, None]:
        """True when certifiable (linear); None means not determined."""
        return True if self.kind == "linear" else None

    def __call__(self, t):
        if self.kind == "linear":
            return self.alpha * np.asarray(t, dtype=np.float64)
        return dsl.eval_scalar(self.ast, t)

    def shrink_check(self, grid: Union[np.ndarray, None] = None) -> HypothesisReport:
        """Probe phi(t) < t for t > 0: certified for linear, sampled otherwise."""
        if self.kind == "linear":
            return HypothesisReport(
                "phi_shrinks", HOLDS, details={"alpha": self.alpha, "certified": True}
            )
        if grid is None:
            grid = np.geomspace(_PHI_GRID_LO, _PHI_GRID_HI, _PHI_GRID_COUNT)
        vals = self(grid)
        bad = ~(vals < grid)
        if bad.any():
            j = int(np.argmax(bad))
            return HypothesisReport(
                "phi_shrinks",
                FAILS,
                witness={"t": float(grid[j]), "phi_t": float(vals[j])},
                samples=len(grid),
            )
        return HypothesisReport("phi_shrinks", UNKNOWN, samples=len(grid))

    def describe(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "alpha": self.alpha, "class": self.declared_class}
        return {
            "kind": "expression",
            "text": dsl.format_mapping(self.ast),
            "class": self.declared_class,
        }


# ---------------------------------------------------------------------------
# contraction variants

#: ids of the inequality templates, by shape of both sides:
#:   avg_vii        mean_i d(F(U*i), F(V*i)) <= phi(mean_i d(gx_i, gy_i))
#:   max_vii_prime  max_i  d(F(U*i), F(V*i)) <= phi(max_i  d(gx_i, gy_i))
#:   pointwise_avg  d(F(U), F(V)) <= phi(mean_i d(gx_i, gy_i))
#:   pointwise_max  d(F(U), F(V)) <= phi(max_i  d(gx_i, gy_i))
#:   lin_avg_viii   mean form with phi(t) = alpha*t
#:   lin_max_ix     max form with phi(t) = alpha*t
#:   lin_pt_max_x   pointwise max form with phi(t) = alpha*t
#:   weighted_xi    d(F(U), F(V)) <= sum_i w_i d(gx_i, gy_i), sum w_i < 1
#:   lin_pt_avg_xii pointwise mean form with phi(t) = alpha*t
VARIANT_IDS = (
    "avg_vii",
    "max_vii_prime",
    "pointwise_avg",
    "pointwise_max",
    "lin_avg_viii",
    "lin_max_ix",
    "lin_pt_max_x",
    "weighted_xi",
    "lin_pt_avg_xii",
)

_LINEAR_IDS = {"lin_avg_viii", "lin_max_ix", "lin_pt_max_x", "lin_pt_avg_xii"}
_STAR_IDS = {"avg_vii", "max_vii_prime", "lin_avg_viii", "lin_max_ix"}


@dataclass(frozen=True)
class ContractionVariant:
    """One inequality template, optionally instantiated with constants.

    For the four lin_* ids, alpha is the coefficient and is required (it
    may also be inherited from a linear phi at check time). For phi-based
    ids, a set alpha means "this instance uses phi(t) = alpha*t". Weights
    belong to weighted_xi only and must sum below 1.
    """

    id: str
    alpha: Union[float, None] = None
    weights: Union[tuple, None] = None

    def __post_init__(self):
        if self.id not in VARIANT_IDS:
            raise ValueError(f"unknown variant {self.id!r}; known: {', '.join(VARIANT_IDS)}")
        if self.weights is not None:
            if self.id != "weighted_xi":
                raise ValueError("weights only apply to weighted_xi")
            w = tuple(float(v) for v in self.weights)
            if any(v < 0 for v in w) or sum(w) >= 1.0:
                raise ValueError("weights must be nonnegative with sum < 1")
            object.__setattr__(self, "weights", w)
        elif self.id == "weighted_xi":
            raise ValueError("weighted_xi needs weights")
        if self.alpha is not None:
            if self.id == "weighted_xi":
                raise ValueError("weighted_xi takes weights, not alpha")
            if not 0.0 <= self.alpha < 1.0:
                raise ValueError(f"alpha must satisfy 0 <= alpha < 1, got {self.alpha}")

    @property
    def uses_star(self) -> bool:
        return self.id in _STAR_IDS

    def describe(self) -> dict:
        out = {"id": self.id}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out


def _effective_phi(variant: ContractionVariant, phi: Union[ComparisonFn, None]) -> ComparisonFn:
    if variant.id == "weighted_xi":
        return ComparisonFn.linear(sum(variant.weights))  # only used for reporting
    if variant.alpha is not None:
        return ComparisonFn.linear(variant.alpha)
    if variant.id in _LINEAR_IDS:
        if phi is not None and phi.kind == "linear":
            return phi
        raise ValueError(f"variant {variant.id} needs alpha (or a linear phi)")
    if phi is None:
        raise ValueError(f"variant {variant.id} needs a comparison function")
    return phi


# ---------------------------------------------------------------------------
# finite-space table plumbing


def _finite_tables(space: FiniteSpace, F, g, n: int) -> tuple[np.ndarray, np.ndarray]:
    p = space.p
    f_flat = np.ascontiguousarray(np.asarray(F, dtype=np.int64).reshape(-1))
    if f_flat.shape[0] != p**n:
        raise ValueError(f"F table must have {p**n} entries, got {f_flat.shape[0]}")
    if f_flat.min() < 0 or f_flat.max() >= p:
        raise ValueError(f"F table values must be point ids in 0..{p - 1}")
    if g is None:
        g_tab = np.arange(p, dtype=np.int64)
    else:
        g_tab = np.ascontiguousarray(np.asarray(g, dtype=np.int64).reshape(-1))
    if g_tab.shape[0] != p:
        raise ValueError(f"g table must have {p} entries, got {g_tab.shape[0]}")
    if g_tab.min() < 0 or g_tab.max() >= p:
        raise ValueError(f"g table values must be point ids in 0..{p - 1}")
    return f_flat, g_tab


def _g_leq(space: FiniteSpace, g_tab: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(space.leq_table[np.ix_(g_tab, g_tab)])


def _decode_witness(code: int, p: int, n: int) -> list[int]:
    return [int(v) for v in _kernels.decode_codes(np.array([code]), p, n)[0]]


# ---------------------------------------------------------------------------
# monotonicity


def check_monotone_property(
    F, g, space: FiniteSpace, n: int, pair_bound: int = DEFAULT_BOUND
) -> HypothesisReport:
    """Exhaustive check: g-ordered argument tuples map to ordered values.

    Scans every pair of n-tuples whose g-images are slotwise ordered and
    demands F respects that order. The scan touches p**(2n) pairs, guarded
    by pair_bound.
    """
    p = space.p
    if p ** (2 * n) > pair_bound:
        raise EnumerationBoundError(p ** (2 * n), pair_bound, "monotone pair scan")
    f_flat, g_tab = _finite_tables(space, F, g, n)
    hit = _kernels.monotone_violation(
        f_flat, _g_leq(space, g_tab), np.ascontiguousarray(space.leq_table), p, n
    )
    if hit[0] < 0:
        return HypothesisReport("monotone_property", HOLDS, samples=p ** (2 * n))
    cx, cy = int(hit[0]), int(hit[1])
    return HypothesisReport(
        "monotone_property",
        FAILS,
        witness={
            "x": _decode_witness(cx, p, n),
            "y": _decode_witness(cy, p, n),
            "Fx": int(f_flat[cx]),
            "Fy": int(f_flat[cy]),
        },
        samples=p ** (2 * n),
    )


def check_argumentwise_monotone(
    F, g, space: FiniteSpace, n: int, pair_bound: int = DEFAULT_BOUND
) -> HypothesisReport:
    """Exhaustive check of slot-by-slot monotonicity of F along g."""
    p = space.p
    scan = n * p * p * p ** (n - 1)
    if scan > pair_bound:
        raise EnumerationBoundError(scan, pair_bound, "argumentwise scan")
    f_flat, g_tab = _finite_tables(space, F, g, n)
    hit = _kernels.argumentwise_violation(
        f_flat, _g_leq(space, g_tab), np.ascontiguousarray(space.leq_table), p, n
    )
    if hit[0] < 0:
        return HypothesisReport("argumentwise_monotone", HOLDS, samples=scan)
    slot, cx, cy = (int(v) for v in hit)
    return HypothesisReport(
        "argumentwise_monotone",
        FAILS,
        witness={
            "slot": slot + 1,
            "x": _decode_witness(cx, p, n),
            "y": _decode_witness(cy, p, n),
            "Fx": int(f_flat[cx]),
            "Fy": int(f_flat[cy]),
        },
        samples=scan,
    )


# ---------------------------------------------------------------------------
# initial condition


def check_initial_condition(
    F, g, star: StarOp, U0, direction: str, space: Space
) -> HypothesisReport:
    """Compare g at each start slot against F of the projected start tuple.

    direction 'up' wants g(x0_i) below F(U0 star i) for every i, 'down' the
    reverse, 'either' accepts whichever direction holds uniformly.
    """
    if direction not in ("up", "down", "either"):
        raise ValueError(f"direction must be up, down or either, got {direction!r}")
    from .product import as_tuple, project_star  # local to avoid import cycle

    n = star.n
    U0 = as_tuple(space, n, U0)
    if isinstance(space, FiniteSpace):
        f_flat, g_tab = _finite_tables(space, F, g, n)
        w = _kernels.code_weights(space.p, n)
        g_vals = g_tab[U0]
        f_vals = np.array([f_flat[int(project_star(U0, star, i) @ w)] for i in range(1, n + 1)])
    else:
        F_fn = as_tuple_fn(F, n, space.k)
        g_fn = as_point_fn(g, space.k)
        g_vals = np.asarray(g_fn(U0))
        f_vals = np.stack(
            [np.asarray(F_fn(project_star(U0, star, i))) for i in range(1, n + 1)]
        )

    def uniform(lo, hi):
        for i in range(n):
            if not space.leq(lo[i], hi[i]):
                return i
        return None

    candidates = {"up": (g_vals, f_vals), "down": (f_vals, g_vals)}
    tried = ("up", "down") if direction == "either" else (direction,)
    first_bad = None
    for name in tried:
        bad = uniform(*candidates[name])
        if bad is None:
            return HypothesisReport(
                "initial_condition", HOLDS, details={"direction": name}
            )
        if first_bad is None:
            first_bad = (name, bad)
    name, i = first_bad
    return HypothesisReport(
        "initial_condition",
        FAILS,
        witness={
            "direction": name,
            "slot": i + 1,
            "g_value": to_jsonable(g_vals[i]),
            "f_value": to_jsonable(f_vals[i]),
        },
        details={"requested": direction},
    )


# ---------------------------------------------------------------------------
# commuting


@dataclass(frozen=True)
class SamplerConfig:
    """Controls the sampled checks on R^k.

    Samples are drawn in fixed chunks of `chunk` with per-chunk seeds, so a
    report is byte-identical for any worker count `jobs`.
    """

    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    box: tuple = DEFAULT_BOX
    slack: float = 1e-12
    bound: int = DEFAULT_BOUND
    chunk: int = 2048
    jobs: int = 1

    def chunks(self) -> list[tuple[int, int]]:
        out, start, idx = [], 0, 0
        while start < self.samples:
            out.append((idx, min(self.chunk, self.samples - start)))
            start += self.chunk
            idx += 1
        return out

    def rng(self, chunk_index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, chunk_index])


def _run_chunks(config: SamplerConfig, work: Callable):
    specs = config.chunks()
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(lambda s: work(*s), specs))
    return [work(*s) for s in specs]


def check_commuting(
    F, g, space: Space, n: int, config: Union[SamplerConfig, None] = None
) -> HypothesisReport:
    """Does g applied after F equal F applied to the g-images?

    Exhaustive (holds/fails) on a finite space; sampled on R^k, where a
    clean run is unknown, never holds.
    """
    if isinstance(space, FiniteSpace):
        p = space.p
        if p**n > DEFAULT_BOUND:
            raise EnumerationBoundError(p**n, DEFAULT_BOUND, "commuting scan")
        f_flat, g_tab = _finite_tables(space, F, g, n)
        code = int(_kernels.commuting_violation(f_flat, g_tab, p, n))
        if code < 0:
            return HypothesisReport("commuting", HOLDS, samples=p**n)
        x = _decode_witness(code, p, n)
        gx = [int(g_tab[v]) for v in x]
        w = _kernels.code_weights(p, n)
        return HypothesisReport(
            "commuting",
            FAILS,
            witness={
                "x": x,
                "g_of_F": int(g_tab[f_flat[code]]),
                "F_of_g": int(f_flat[int(np.asarray(gx) @ w)]),
            },
            samples=p**n,
        )

    config = config or SamplerConfig()
    lo, hi = _box_bounds(config.box, space.k)
    F = as_tuple_fn(F, n, space.k)
    g = as_point_fn(g, space.k)

    def work(idx, count):
        rng = config.rng(idx)
        X = rng.uniform(lo, hi, size=(count, n, space.k))
        lhs = np.asarray(g(F(X)))
        rhs = np.asarray(F(g(X)))
        diff = np.abs(lhs - rhs)
        bad = np.any(diff > config.slack * (1.0 + np.abs(lhs) + np.abs(rhs)), axis=-1)
        if bad.any():
            j = int(np.argmax(bad))
            return count, {"x": X[j], "g_of_F": lhs[j], "F_of_g": rhs[j]}
        return count, None

    total, witness = 0, None
    for count, hit in _run_chunks(config, work):
        total += count
        if witness is None and hit is not None:
            witness = hit
            break
    if witness is not None:
        return HypothesisReport(
            "commuting", FAILS, witness=to_jsonable(witness), samples=total, seed=config.seed
        )
    return HypothesisReport("commuting", UNKNOWN, samples=total, seed=config.seed)


# ---------------------------------------------------------------------------
# contraction


def _variant_sides(
    variant: ContractionVariant,
    phi: Union[ComparisonFn, None],
    dF_star: Union[np.ndarray, None],
    dF_point: Union[np.ndarray, None],
    dg: np.ndarray,
):
    """LHS and RHS arrays of the variant's inequality over a pair batch."""
    mean_dg = np.mean(dg, axis=-1)
    max_dg = np.max(dg, axis=-1)
    vid = variant.id
    if vid == "avg_vii":
        return np.mean(dF_star, axis=-1), _effective_phi(variant, phi)(mean_dg)
    if vid == "max_vii_prime":
        return np.max(dF_star, axis=-1), _effective_phi(variant, phi)(max_dg)
    if vid == "pointwise_avg":
        return dF_point, _effective_phi(variant, phi)(mean_dg)
    if vid == "pointwise_max":
        return dF_point, _effective_phi(variant, phi)(max_dg)
    alpha = None if vid == "weighted_xi" else _effective_phi(variant, phi).alpha
    if vid == "lin_avg_viii":
        return np.mean(dF_star, axis=-1), alpha * mean_dg
    if vid == "lin_max_ix":
        return np.max(dF_star, axis=-1), alpha * max_dg
    if vid == "lin_pt_max_x":
        return dF_point, alpha * max_dg
    if vid == "lin_pt_avg_xii":
        return dF_point, alpha * mean_dg
    return dF_point, dg @ np.asarray(variant.weights)


def check_contraction(
    F,
    g,
    star: StarOp,
    phi: Union[ComparisonFn, None],
    variant: ContractionVariant,
    space: Space,
    config: Union[SamplerConfig, None] = None,
) -> HypothesisReport:
    """Probe the variant's inequality over g-comparable argument pairs.

    Finite spaces are scanned exhaustively (holds/fails); R^k is sampled
    with constructive comparable pairs (unknown-if-clean). The witness of a
    fails verdict contains both tuples and both sides of the inequality.
    """
    config = config or SamplerConfig()
    _effective_phi(variant, phi)  # validate up front
    n = star.n
    name = f"contraction[{variant.id}]"

    if isinstance(space, FiniteSpace):
        p = space.p
        if p ** (2 * n) > config.bound:
            raise EnumerationBoundError(p ** (2 * n), config.bound, "contraction pair scan")
        f_flat, g_tab = _finite_tables(space, F, g, n)
        pairs = _kernels.comparable_pair_codes(_g_leq(space, g_tab), p, n)
        if len(pairs) == 0:
            raise ValueError("no g-comparable tuple pairs exist in this space")
        dx = _kernels.decode_codes(pairs[:, 0], p, n)
        dy = _kernels.decode_codes(pairs[:, 1], p, n)
        dg = space.dist[g_tab[dx], g_tab[dy]]
        dF_point = space.dist[f_flat[pairs[:, 0]], f_flat[pairs[:, 1]]]
        dF_star = None
        if variant.uses_star:
            w = _kernels.code_weights(p, n)
            rows0 = star.zero_based
            cols = [
                space.dist[f_flat[dx[:, row] @ w], f_flat[dy[:, row] @ w]]
                for row in rows0
            ]
            dF_star = np.stack(cols, axis=-1)
        lhs, rhs = _variant_sides(variant, phi, dF_star, dF_point, dg)
        bad = lhs > rhs + config.slack
        if bad.any():
            j = int(np.argmax(bad))
            return HypothesisReport(
                name,
                FAILS,
                witness={
                    "x": [int(v) for v in dx[j]],
                    "y": [int(v) for v in dy[j]],
                    "lhs": float(lhs[j]),
                    "rhs": float(rhs[j]),
                },
                samples=len(pairs),
            )
        return HypothesisReport(name, HOLDS, samples=len(pairs))

    lo, hi = _box_bounds(config.box, space.k)
    F = as_tuple_fn(F, n, space.k)
    g = as_point_fn(g, space.k)

    def work(idx, count):
        rng = config.rng(idx)
        X = rng.uniform(lo, hi, size=(count, n, space.k))
        Y = X + rng.uniform(0.0, 1.0, size=(count, n, space.k)) * (hi - X)
        gX, gY = np.asarray(g(X)), np.asarray(g(Y))
        up = np.all(space.leq_batch(gX, gY), axis=-1)
        down = np.all(space.leq_batch(gY, gX), axis=-1)
        ordered = up | down
        X, Y, gX, gY = X[ordered], Y[ordered], gX[ordered], gY[ordered]
        if len(X) == 0:
            return 0, None
        dg = space.metric_batch(gX, gY)
        dF_point = space.metric_batch(np.asarray(F(X)), np.asarray(F(Y)))
        dF_star = None
        if variant.uses_star:
            rows0 = star.zero_based
            cols = [
                space.metric_batch(np.asarray(F(X[:, row])), np.asarray(F(Y[:, row])))
                for row in rows0
            ]
            dF_star = np.stack(cols, axis=-1)
        lhs, rhs = _variant_sides(variant, phi, dF_star, dF_point, dg)
        bad = lhs > rhs + config.slack
        if bad.any():
            j = int(np.argmax(bad))
            return int(len(X)), {
                "x": X[j],
                "y": Y[j],
                "lhs": float(lhs[j]),
                "rhs": float(rhs[j]),
            }
        return int(len(X)), None

    total, witness = 0, None
    for count, hit in _run_chunks(config, work):
        total += count
        if witness is None and hit is not None:
            witness = hit
            break
    if total == 0:
        raise ValueError("sampler produced no g-comparable pairs; widen the box or fix g")
    if witness is not None:
        return HypothesisReport(
            name, FAILS, witness=to_jsonable(witness), samples=total, seed=config.seed
        )
    return HypothesisReport(name, UNKNOWN, samples=total, seed=config.seed)


# ---------------------------------------------------------------------------
# implications between variants


def implied_variants(
    variant: ContractionVariant,
    star_permuted: bool,
    phi_increasing: bool,
    n: Union[int, None] = None,
) -> frozenset:
    """Transitive closure of the logically implied inequality templates.

    A variant carrying alpha stands for its instance with phi(t) = alpha*t,
    which is an increasing comparison function, so those instances unlock
    the monotonicity-gated implications on their own. The weighted rule
    needs the tuple length; pass n to materialize it.
    """

    def step(v: ContractionVariant) -> list[ContractionVariant]:
        out = []
        increasing = phi_increasing or v.alpha is not None
        if v.id == "pointwise_avg" and star_permuted:
            out.append(ContractionVariant("avg_vii", alpha=v.alpha))
        if v.id == "pointwise_max" and (star_permuted or increasing):
            out.append(ContractionVariant("max_vii_prime", alpha=v.alpha))
        if v.id == "weighted_xi":
            out.append(ContractionVariant("lin_pt_max_x", alpha=sum(v.weights)))
        if v.id == "lin_pt_avg_xii":
            out.append(ContractionVariant("pointwise_avg", alpha=v.alpha))
            if n is not None:
                out.append(
                    ContractionVariant("weighted_xi", weights=(v.alpha / n,) * n)
                )
        if v.id == "lin_avg_viii":
            out.append(ContractionVariant("avg_vii", alpha=v.alpha))
        if v.id == "lin_max_ix":
            out.append(ContractionVariant("max_vii_prime", alpha=v.alpha))
        if v.id == "lin_pt_max_x":
            out.append(ContractionVariant("pointwise_max", alpha=v.alpha))
        return out

    closed: set = set()
    frontier = [variant]
    while frontier:
        nxt = []
        for v in frontier:
            for derived in step(v):
                if derived not in closed and derived != variant:
                    closed.add(derived)
                    nxt.append(derived)
        frontier = nxt
    return frozenset(closed)


# ---------------------------------------------------------------------------
# topological flags


@dataclass(frozen=True)
class Flag:
    """One declared or derived topological property of the problem space.

    source is a stable token: 'construction' for properties the space kind
    guarantees, 'declared' for user overrides recorded verbatim, 'derived'
    for flags computed from other flags. detail carries the human reason.
    """

    name: str
    satisfied: bool
    source: str
    detail: str = ""


_FLAG_NAMES = ("complete", "icu", "dcl", "mcb")


def declare_topological_flags(space, overrides: Union[dict, None] = None) -> dict:
    """Resolve completeness and order-limit flags for the problem space.

    R^k with componentwise order and finite spaces satisfy all of them by
    construction (limits of monotone convergent sequences bound the terms;
    finite convergence is eventually constant). Overrides are recorded
    verbatim with source 'declared'; the solver warns on any flag that is
    off. Unknown space kinds need every flag declared explicitly.
    """
    overrides = dict(overrides or {})
    for key in overrides:
        if key not in _FLAG_NAMES:
            raise ValueError(f"unknown flag {key!r}; known: {', '.join(_FLAG_NAMES)}")

    if isinstance(space, VectorSpace):
        detail = "complete metric, closed componentwise order"
    elif isinstance(space, FiniteSpace):
        detail = "finite space, convergence eventually constant"
    else:
        missing = [f for f in _FLAG_NAMES if f not in overrides]
        if missing:
            raise ValueError(
                f"space kind {type(space).__name__} needs declared flags: {', '.join(missing)}"
            )
        detail = ""

    flags = {}
    for fname in _FLAG_NAMES:
        if fname in overrides:
            flags[fname] = Flag(fname, bool(overrides[fname]), "declared")
        elif fname == "mcb":
            ok = flags["icu"].satisfied and flags["dcl"].satisfied
            flags[fname] = Flag(fname, ok, "derived", "icu and dcl together")
        else:
            flags[fname] = Flag(fname, True, "construction", detail)
    return flags

"""Locate, verify, and enumerate n-tupled coincidence points.

The iterative path lifts the problem to the product space: starting from
U0, each step solves g(x_i next) = F(U star i), i.e. applies the inverse of
g slotwise to f_star(U). When g is the identity this is plain Picard
iteration of f_star; otherwise a g_inverse oracle must be supplied, because
this solver will not hide a root-finder inside the step. The residual is
the product-space distance between big_g(U) and f_star(U): nabla (max) by
default since it bounds the averaged metric from above and gives
per-component guarantees.

On finite spaces exhaustive enumeration gives the exact answer sets, which
double as oracles for the iterative path. Every solve is an isolated
deterministic computation; the multi-start uniqueness probe derives one rng
per candidate start from (seed, index), so worker count never changes its
report.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np

from . import _kernels, dsl
from ._util import DEFAULT_BOUND, DEFAULT_BOX, DEFAULT_SEED, to_jsonable
from .errors import EnumerationBoundError
from .hypotheses import (
    FAILS,
    ComparisonFn,
    ContractionVariant,
    HypothesisReport,
    SamplerConfig,
    check_commuting,
    check_contraction,
    check_initial_condition,
    check_monotone_property,
    declare_topological_flags,
)
from .index_algebra import StarOp
from .product import InducedMaps, as_tuple, delta_n, nabla_n, order_leq_n, project_star, tabulate_induced
from .spaces import FiniteSpace, Space, VectorSpace, _box_bounds

__all__ = [
    "ProblemSpec",
    "SolveConfig",
    "SolveReport",
    "picard_solve",
    "solve_with_checks",
    "verify_solution",
    "UniquenessReport",
    "uniqueness_probe",
    "enumerate_star_coincidence",
    "enumerate_common_star_fixed",
    "lemma3_crosscheck",
    "parse_f_table_text",
    "parse_g_table_text",
    "read_f_table_file",
    "read_g_table_file",
]


def _wrap_finite_f(f_flat: np.ndarray, p: int, n: int) -> Callable:
    w = _kernels.code_weights(p, n)

    def call(args):
        return f_flat[np.asarray(args, np.int64) @ w]

    return call


def _wrap_finite_g(g_tab: np.ndarray) -> Callable:
    return lambda ids: g_tab[np.asarray(ids, np.int64)]


def _wrap_ast_f(ast: dsl.MappingAst) -> Callable:
    return lambda args: dsl.eval_mapping(ast, args)


def _wrap_ast_g(ast: dsl.MappingAst) -> Callable:
    return lambda pts: dsl.eval_mapping(ast, np.asarray(pts, np.float64)[..., None, :])


@dataclass(frozen=True)
class ProblemSpec:
    """A fully assembled coincidence problem.

    F and g are stored as batch-aware callables plus, on finite spaces, the
    raw tables the exhaustive checks run on. Build instances through
    ProblemSpec.create, which accepts expression text, parsed asts, tables,
    or plain callables and normalizes everything.
    """

    space: Space
    n: int
    star: StarOp
    f_call: Callable
    g_call: Callable
    g_is_identity: bool = True
    g_inv_call: Union[Callable, None] = None
    f_table: Union[np.ndarray, None] = None
    g_table: Union[np.ndarray, None] = None
    phi: Union[ComparisonFn, None] = None
    variant: Union[ContractionVariant, None] = None
    U0: Union[np.ndarray, None] = None
    direction: str = "up"
    flag_overrides: Union[dict, None] = None

    def __post_init__(self):
        if self.n != self.star.n:
            raise ValueError(f"problem has n={self.n} but star operation has n={self.star.n}")
        if self.direction not in ("up", "down", "either"):
            raise ValueError(f"bad direction {self.direction!r}")

    @classmethod
    def create(
        cls,
        space: Space,
        star: StarOp,
        F,
        g=None,
        g_inverse=None,
        phi=None,
        variant=None,
        U0=None,
        direction: str = "up",
        flags: Union[dict, None] = None,
    ) -> "ProblemSpec":
        n = star.n
        f_table = g_table = None
        if isinstance(space, FiniteSpace):
            p = space.p
            f_table = np.ascontiguousarray(np.asarray(F, np.int64).reshape(-1))
            if f_table.shape[0] != p**n:
                raise ValueError(f"F table must have {p**n} entries, got {f_table.shape[0]}")
            if f_table.min() < 0 or f_table.max() >= p:
                raise ValueError(f"F table values must be ids in 0..{p - 1}")
            f_call = _wrap_finite_f(f_table, p, n)
            g_is_identity = g is None
            g_table = (
                np.arange(p, dtype=np.int64)
                if g is None
                else np.ascontiguousarray(np.asarray(g, np.int64).reshape(-1))
            )
            if g_table.shape[0] != p or g_table.min() < 0 or g_table.max() >= p:
                raise ValueError(f"g table must be {p} ids in 0..{p - 1}")
            g_call = _wrap_finite_g(g_table)
            g_inv_call = None
            if g_inverse is not None:
                g_inv_tab = np.asarray(g_inverse, np.int64).reshape(-1)
                if g_inv_tab.shape[0] != p:
                    raise ValueError(f"g_inverse table must have {p} entries")
                g_inv_call = _wrap_finite_g(np.ascontiguousarray(g_inv_tab))
            elif g_is_identity:
                g_inv_call = _wrap_finite_g(np.arange(p, dtype=np.int64))
        else:
            k = space.k
            f_call = cls._vector_map(F, n, k, "F")
            g_is_identity = g is None
            g_call = (lambda pts: np.asarray(pts, np.float64)) if g is None else cls._vector_point_map(g, k, "g")
            if g_inverse is not None:
                g_inv_call = cls._vector_point_map(g_inverse, k, "g_inverse")
            elif g_is_identity:
                g_inv_call = lambda pts: np.asarray(pts, np.float64)
            else:
                g_inv_call = None

        if U0 is not None:
            U0 = as_tuple(space, n, U0).copy()
            U0.setflags(write=False)
        return cls(
            space=space,
            n=n,
            star=star,
            f_call=f_call,
            g_call=g_call,
            g_is_identity=g_is_identity,
            g_inv_call=g_inv_call,
            f_table=f_table,
            g_table=g_table,
            phi=phi,
            variant=variant,
            U0=U0,
            direction=direction,
            flag_overrides=dict(flags) if flags else None,
        )

    @staticmethod
    def _vector_map(F, n: int, k: int, label: str) -> Callable:
        if isinstance(F, str):
            F = dsl.parse_mapping(F, n, k)
        if isinstance(F, dsl.MappingAst):
            if (F.n, F.k) != (n, k):
                raise ValueError(f"{label} mapping has arity {F.n} and dimension {F.k}, need ({n}, {k})")
            return _wrap_ast_f(F)
        if callable(F):
            return F
        raise TypeError(f"{label} must be expression text, a mapping ast, or a callable")

    @staticmethod
    def _vector_point_map(g, k: int, label: str) -> Callable:
        if isinstance(g, str):
            g = dsl.parse_mapping(g, 1, k)
        if isinstance(g, dsl.MappingAst):
            if (g.n, g.k) != (1, k):
                raise ValueError(f"{label} mapping must be unary of dimension {k}")
            return _wrap_ast_g(g)
        if callable(g):
            return g
        raise TypeError(f"{label} must be expression text, a mapping ast, or a callable")

    def maps(self) -> InducedMaps:
        return InducedMaps(self.f_call, self.g_call, self.star)

    def flags(self) -> dict:
        return declare_topological_flags(self.space, self.flag_overrides)


@dataclass(frozen=True)
class SolveConfig:
    """Iteration controls. residual_metric is 'nabla' (max) or 'delta' (mean)."""

    tol: float = 1e-10
    max_iter: int = 10_000
    residual_metric: str = "nabla"
    divergence_cap: float = 1e12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.residual_metric not in ("delta", "nabla"):
            raise ValueError(f"residual_metric must be delta or nabla, got {self.residual_metric!r}")

    def metric_fn(self) -> Callable:
        return nabla_n if self.residual_metric == "nabla" else delta_n


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one iterative solve."""

    status: str
    iterations: int
    U: Union[np.ndarray, None]
    residual: float
    history: tuple
    monotone_increasing: bool = True
    monotone_decreasing: bool = True
    hypothesis_reports: tuple = ()
    forced: bool = False

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def monotone(self) -> bool:
        return self.monotone_increasing or self.monotone_decreasing

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "iterations": int(self.iterations),
            "point": to_jsonable(self.U) if self.U is not None else None,
            "residual": float(self.residual),
            "history": [float(r) for r in self.history],
            "monotone": {
                "increasing": bool(self.monotone_increasing),
                "decreasing": bool(self.monotone_decreasing),
            },
            "hypotheses": [r.to_json() for r in self.hypothesis_reports],
            "forced": bool(self.forced),
        }


def _tuple_finite_vals(U) -> bool:
    arr = np.asarray(U, dtype=np.float64)
    return bool(np.all(np.isfinite(arr)))


def picard_solve(problem: ProblemSpec, config: Union[SolveConfig, None] = None) -> SolveReport:
    """Iterate U <- g_inverse(f_star(U)) until the residual drops below tol.

    Also tracks whether the g-image sequence stayed increasing (and
    decreasing) in the componentwise tuple order; increasing iterates are
    the expected behavior when the upward initial condition and the
    monotone property both hold.
    """
    config = config or SolveConfig()
    if problem.U0 is None:
        raise ValueError("problem has no initial tuple U0")
    if problem.g_inv_call is None:
        return SolveReport(
            status="g_inverse_missing",
            iterations=0,
            U=problem.U0,
            residual=float("nan"),
            history=(),
        )
    space = problem.space
    maps = problem.maps()
    metric = config.metric_fn()
    d, leq = space.metric, space.leq

    U = problem.U0
    GU = maps.big_g(U)
    FS = maps.f_star(U)
    residual = metric(GU, FS, d)
    history = [residual]
    inc = dec = True
    iterations = 0
    status = "converged"

    while residual > config.tol:
        if iterations >= config.max_iter:
            status = "max_iter"
            break
        if not np.isfinite(residual) or residual > config.divergence_cap:
            status = "diverged"
            break
        U = as_tuple(space, problem.n, problem.g_inv_call(FS)) if isinstance(space, FiniteSpace) else np.asarray(
            problem.g_inv_call(FS), np.float64
        )
        if isinstance(space, VectorSpace) and not _tuple_finite_vals(U):
            status = "diverged"
            iterations += 1
            residual = float("inf")
            history.append(residual)
            break
        newGU = maps.big_g(U)
        inc = inc and order_leq_n(GU, newGU, leq)
        dec = dec and order_leq_n(newGU, GU, leq)
        GU = newGU
        FS = maps.f_star(U)
        residual = metric(GU, FS, d)
        history.append(residual)
        iterations += 1

    return SolveReport(
        status=status,
        iterations=iterations,
        U=U,
        residual=float(residual),
        history=tuple(history),
        monotone_increasing=inc,
        monotone_decreasing=dec,
    )


def standard_checks(
    problem: ProblemSpec, sampler: Union[SamplerConfig, None] = None
) -> list[HypothesisReport]:
    """The hypothesis battery the solve command runs before iterating."""
    sampler = sampler or SamplerConfig()
    finite = isinstance(problem.space, FiniteSpace)
    F = problem.f_table if finite else problem.f_call
    g = problem.g_table if finite else problem.g_call
    reports = []
    if problem.phi is not None:
        reports.append(problem.phi.shrink_check())
    if finite:
        reports.append(
            check_monotone_property(F, g, problem.space, problem.n, sampler.bound)
        )
    if problem.U0 is not None:
        reports.append(
            check_initial_condition(F, g, problem.star, problem.U0, problem.direction, problem.space)
        )
    if not problem.g_is_identity:
        reports.append(check_commuting(F, g, problem.space, problem.n, sampler))
    if problem.variant is not None:
        reports.append(
            check_contraction(F, g, problem.star, problem.phi, problem.variant, problem.space, sampler)
        )
    return reports


def solve_with_checks(
    problem: ProblemSpec,
    config: Union[SolveConfig, None] = None,
    sampler: Union[SamplerConfig, None] = None,
    force: bool = False,
) -> SolveReport:
    """Run the hypothesis battery, then iterate unless a check failed.

    A fails verdict blocks the solve (status hypothesis_failure) unless
    force is set; unknown verdicts proceed, because the hypotheses are
    sufficient conditions, not necessary ones.
    """
    reports = standard_checks(problem, sampler)
    failed = [r for r in reports if r.verdict == FAILS]
    if failed and not force:
        return SolveReport(
            status="hypothesis_failure",
            iterations=0,
            U=problem.U0,
            residual=float("nan"),
            history=(),
            hypothesis_reports=tuple(reports),
        )
    result = picard_solve(problem, config)
    return replace(result, hypothesis_reports=tuple(reports), forced=bool(failed))


def verify_solution(problem: ProblemSpec, U, tol: float) -> tuple[bool, float]:
    """Check U against the defining equations; residual is the worst slot.

    residual = max over i of d(F(U star i), g(x_i)); independent of the
    solve configuration's residual metric.
    """
    U = as_tuple(problem.space, problem.n, U)
    maps = problem.maps()
    residual = nabla_n(maps.big_g(U), maps.f_star(U), problem.space.metric)
    return residual <= tol, float(residual)


# ---------------------------------------------------------------------------
# uniqueness probing


@dataclass(frozen=True)
class UniquenessReport:
    """Clustered limits of a multi-start probe.

    One cluster supports uniqueness for the instance; several distinct
    clusters definitively refute it. Clusters live 10*tol apart.
    """

    trials: int
    attempted: int
    admissible: int
    converged: int
    clusters: tuple = ()

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "attempted": self.attempted,
            "admissible": self.admissible,
            "converged": self.converged,
            "clusters": [
                {
                    "point": to_jsonable(c["point"]),
                    "count": int(c["count"]),
                    "max_residual": float(c["max_residual"]),
                }
                for c in self.clusters
            ],
        }


def uniqueness_probe(
    problem: ProblemSpec,
    config: Union[SolveConfig, None] = None,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
    box=None,
    jobs: int = 1,
    attempt_factor: int = 50,
) -> UniquenessReport:
    """Solve from `trials` admissible random starts and cluster the limits.

    Starts are rejection-sampled against the problem's initial condition;
    each candidate start is derived from (seed, attempt index), so the
    report does not depend on worker count. Clustering is greedy at radius
    10*tol in the max metric, first limit becomes the representative.
    """
    config = config or SolveConfig()
    if trials == 0:
        return UniquenessReport(0, 0, 0, 0)
    space, n = problem.space, problem.n
    finite = isinstance(space, FiniteSpace)
    if not finite:
        lo, hi = _box_bounds(DEFAULT_BOX if box is None else box, space.k)

    F = problem.f_table if finite else problem.f_call
    g = problem.g_table if finite else problem.g_call

    starts = []
    attempted = 0
    max_attempts = max(trials * attempt_factor, trials)
    while len(starts) < trials and attempted < max_attempts:
        rng = np.random.default_rng([seed, attempted])
        if finite:
            cand = rng.integers(0, space.p, size=n)
        else:
            cand = rng.uniform(lo, hi, size=(n, space.k))
        attempted += 1
        ok = check_initial_condition(F, g, problem.star, cand, problem.direction, space)
        if ok.verdict == "holds":
            starts.append(as_tuple(space, n, cand))

    def run(U0):
        return picard_solve(replace(problem, U0=U0), config)

    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(U0) for U0 in starts]

    clusters: list[dict] = []
    radius = 10.0 * config.tol
    converged = 0
    for rep in results:
        if not rep.converged:
            continue
        converged += 1
        for cluster in clusters:
            if nabla_n(rep.U, cluster["point"], space.metric) <= radius:
                cluster["count"] += 1
                cluster["max_residual"] = max(cluster["max_residual"], rep.residual)
                break
        else:
            clusters.append({"point": rep.U, "count": 1, "max_residual": rep.residual})

    return UniquenessReport(
        trials=trials,
        attempted=attempted,
        admissible=len(starts),
        converged=converged,
        clusters=tuple(clusters),
    )


# ---------------------------------------------------------------------------
# exhaustive enumeration on finite spaces


def _enum_tables(space: FiniteSpace, f_table, g_table, n: int, bound: int):
    p = space.p
    if p**n > bound:
        raise EnumerationBoundError(p**n, bound, "tuple enumeration")
    f_flat = np.ascontiguousarray(np.asarray(f_table, np.int64).reshape(-1))
    if f_flat.shape[0] != p**n:
        raise ValueError(f"F table must have {p**n} entries, got {f_flat.shape[0]}")
    g_tab = (
        np.arange(p, dtype=np.int64)
        if g_table is None
        else np.ascontiguousarray(np.asarray(g_table, np.int64).reshape(-1))
    )
    if g_tab.shape[0] != p:
        raise ValueError(f"g table must have {p} entries, got {g_tab.shape[0]}")
    return f_flat, g_tab


def _codes_to_tuples(codes: np.ndarray, p: int, n: int) -> list[tuple]:
    return [tuple(int(v) for v in row) for row in _kernels.decode_codes(codes, p, n)]


def enumerate_star_coincidence(
    space: FiniteSpace, f_table, g_table, star: StarOp, bound: int = DEFAULT_BOUND
) -> list[tuple]:
    """All tuples with F(U star i) = g(x_i) for every i, lexicographic."""
    p, n = space.p, star.n
    f_flat, g_tab = _enum_tables(space, f_table, g_table, n, bound)
    mask = _kernels.coincidence_mask(f_flat, g_tab, np.ascontiguousarray(star.zero_based), p, n)
    return _codes_to_tuples(np.nonzero(mask)[0].astype(np.int64), p, n)


def enumerate_common_star_fixed(
    space: FiniteSpace, f_table, g_table, star: StarOp, bound: int = DEFAULT_BOUND
) -> list[tuple]:
    """All tuples with F(U star i) = g(x_i) = x_i for every i."""
    p, n = space.p, star.n
    f_flat, g_tab = _enum_tables(space, f_table, g_table, n, bound)
    mask = _kernels.common_fixed_mask(f_flat, g_tab, np.ascontiguousarray(star.zero_based), p, n)
    return _codes_to_tuples(np.nonzero(mask)[0].astype(np.int64), p, n)


def lemma3_crosscheck(
    space: FiniteSpace, f_table, g_table, star: StarOp, bound: int = DEFAULT_BOUND
) -> dict:
    """Compare the per-slot scan against the induced-map table route.

    Route A checks the defining equations slot by slot; route B materializes
    f_star and big_g as self-maps of the code space and compares them as
    whole tables. The two must agree exactly: coincidences of (F, g) are
    coincidences of the induced pair, and common fixed tuples match too.
    """
    p, n = space.p, star.n
    f_flat, g_tab = _enum_tables(space, f_table, g_table, n, bound)
    direct = enumerate_star_coincidence(space, f_flat, g_tab, star, bound)
    direct_common = enumerate_common_star_fixed(space, f_flat, g_tab, star, bound)
    fs_codes, gg_codes = tabulate_induced(space, f_flat, g_tab, star, bound)
    codes = np.arange(p**n, dtype=np.int64)
    induced = _codes_to_tuples(codes[fs_codes == gg_codes], p, n)
    induced_common = _codes_to_tuples(
        codes[(fs_codes == gg_codes) & (gg_codes == codes)], p, n
    )
    return {
        "coincidence": direct,
        "coincidence_induced": induced,
        "common_fixed": direct_common,
        "common_fixed_induced": induced_common,
        "agree": direct == induced and direct_common == induced_common,
    }


# ---------------------------------------------------------------------------
# table file formats
#
# F table: p**n lines, each n point ids then the value id, covering every
# tuple exactly once in any order. g table: p lines, either "id value" or
# a bare value per line (line number = id).


def parse_f_table_text(text: str, p: int, n: int) -> np.ndarray:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if len(lines) != p**n:
        raise ValueError(f"F table needs {p**n} lines, got {len(lines)}")
    w = _kernels.code_weights(p, n)
    table = np.full(p**n, -1, dtype=np.int64)
    for ln in lines:
        parts = ln.split()
        if len(parts) != n + 1:
            raise ValueError(f"F table line needs {n} ids and a value: {ln!r}")
        try:
            vals = [int(v) for v in parts]
        except ValueError:
            raise ValueError(f"non-integer entry in F table line {ln!r}") from None
        ids, value = vals[:n], vals[n]
        if any(not 0 <= v < p for v in ids) or not 0 <= value < p:
            raise ValueError(f"F table entries outside 0..{p - 1}: {ln!r}")
        code = int(np.asarray(ids, np.int64) @ w)
        if table[code] != -1:
            raise ValueError(f"duplicate F table entry for tuple {tuple(ids)}")
        table[code] = value
    return table


def parse_g_table_text(text: str, p: int) -> np.ndarray:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if len(lines) != p:
        raise ValueError(f"g table needs {p} lines, got {len(lines)}")
    table = np.full(p, -1, dtype=np.int64)
    for lineno, ln in enumerate(lines):
        parts = ln.split()
        try:
            vals = [int(v) for v in parts]
        except ValueError:
            raise ValueError(f"non-integer entry in g table line {ln!r}") from None
        if len(vals) == 1:
            idx, value = lineno, vals[0]
        elif len(vals) == 2:
            idx, value = vals
        else:
            raise ValueError(f"g table line needs 1 or 2 entries: {ln!r}")
        if not 0 <= idx < p or not 0 <= value < p:
            raise ValueError(f"g table entries outside 0..{p - 1}: {ln!r}")
        if table[idx] != -1:
            raise ValueError(f"duplicate g table entry for point {idx}")
        table[idx] = value
    return table


def read_f_table_file(path, p: int, n: int) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_f_table_text(fh.read(), p, n)


def read_g_table_file(path, p: int) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_g_table_text(fh.read(), p)

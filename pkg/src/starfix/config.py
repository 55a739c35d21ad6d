"""Problem configuration files.

INI-style sections describe one problem end to end:

    [space]    kind = vector | finite; k and metric for vector spaces,
               file = <finite-space text file> for finite ones
    [star]     preset = <name> (n = <int> for family presets), or
               file = <star matrix file>
    [mappings] vector: F / g / g_inverse expressions (multi-component
               mappings use F.component[1] style keys), phi as
               "linear:<alpha>" or an expression in x1 with optional
               phi_class = phi | omega
               finite: F_table / g_table / g_inverse_table file paths
    [solver]   tol, max_iter, residual_metric (delta|nabla), direction
               (up|down|either)
    [initial]  U0 = the start tuple, n*k numbers (slots row-major) or n
               point ids
    [check]    variant, alpha, weights, samples, seed, box, slack, bound

Every referenced file is resolved relative to the config file and must
exist; all cross-field arities are validated here, before any computation
runs. Malformed content raises ConfigError, missing files
FileNotFoundError.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import dsl
from ._util import DEFAULT_BOUND, DEFAULT_BOX, DEFAULT_SAMPLES, DEFAULT_SEED
from .errors import ConfigError
from .hypotheses import ComparisonFn, ContractionVariant, SamplerConfig
from .index_algebra import preset, read_star_file
from .solver import ProblemSpec, SolveConfig, read_f_table_file, read_g_table_file
from .spaces import FiniteSpace, VectorSpace, read_finite_space_file

__all__ = ["ProblemConfig", "load_problem_config"]


@dataclass(frozen=True)
class ProblemConfig:
    """A parsed config: the problem, its run controls, and a rebuildable echo."""

    problem: ProblemSpec
    solve: SolveConfig
    sampler: SamplerConfig
    echo: dict
    base_dir: str


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive: F and F.component[1]
    return cp


def _fail(msg: str) -> ConfigError:
    return ConfigError(msg)


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").replace(";", " ").split()]
    except ValueError:
        raise _fail(f"{what} must be numbers, got {text!r}") from None


def _resolve(base_dir: str, rel: str) -> str:
    path = rel if os.path.isabs(rel) else os.path.join(base_dir, rel)
    if not os.path.exists(path):
        raise FileNotFoundError(f"referenced file does not exist: {path}")
    return os.path.abspath(path)


def _section(cp: configparser.ConfigParser, name: str) -> dict:
    return dict(cp[name]) if cp.has_section(name) else {}


_KNOWN_SECTIONS = ("space", "star", "mappings", "solver", "initial", "check")


def _mapping_source(sect: dict, name: str, n: int, k: int) -> Union[str, None]:
    """Assemble a mapping from `name` or its name.component[j] keys."""
    comp_keys = {}
    for key in sect:
        if key.startswith(f"{name}.component["):
            try:
                j = int(key[len(name) + 11 : -1])
            except ValueError:
                raise _fail(f"bad component key {key!r}") from None
            comp_keys[j] = sect[key]
    if comp_keys:
        if name in sect:
            raise _fail(f"give either {name} or {name}.component[j] keys, not both")
        if sorted(comp_keys) != list(range(1, k + 1)):
            raise _fail(f"{name} needs components 1..{k}, got {sorted(comp_keys)}")
        return "; ".join(comp_keys[j] for j in range(1, k + 1))
    return sect.get(name)


def _parse_phi(sect: dict) -> Union[ComparisonFn, None]:
    raw = sect.get("phi")
    if raw is None:
        return None
    raw = raw.strip()
    if raw.startswith("linear:"):
        try:
            alpha = float(raw[len("linear:") :])
        except ValueError:
            raise _fail(f"bad linear phi {raw!r}") from None
        try:
            return ComparisonFn.linear(alpha)
        except ValueError as exc:
            raise _fail(str(exc)) from None
    declared = sect.get("phi_class", "none").strip().lower()
    if declared not in ("phi", "omega", "none"):
        raise _fail(f"phi_class must be phi, omega or none, got {declared!r}")
    try:
        return ComparisonFn.expression(raw, declared_class=declared)
    except dsl.ParseError as exc:
        raise _fail(f"phi does not parse: {exc}") from None


def load_problem_config(path) -> ProblemConfig:
    if not os.path.exists(path):
        raise FileNotFoundError(f"config file does not exist: {path}")
    base_dir = os.path.dirname(os.path.abspath(path))
    cp = _parser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise _fail(f"config does not parse: {exc}") from None

    for name in cp.sections():
        if name not in _KNOWN_SECTIONS:
            raise _fail(f"unknown section [{name}]; known: {', '.join(_KNOWN_SECTIONS)}")

    space_sect = _section(cp, "space")
    star_sect = _section(cp, "star")
    map_sect = _section(cp, "mappings")
    solver_sect = _section(cp, "solver")
    init_sect = _section(cp, "initial")
    check_sect = _section(cp, "check")
    echo: dict = {name: dict(_section(cp, name)) for name in _KNOWN_SECTIONS if cp.has_section(name)}

    # --- space
    kind = space_sect.get("kind", "").strip().lower()
    if kind == "vector":
        try:
            k = int(space_sect.get("k", "1"))
        except ValueError:
            raise _fail(f"space k must be an integer, got {space_sect.get('k')!r}") from None
        metric = space_sect.get("metric", "euclidean").strip()
        try:
            space = VectorSpace(k, metric)
        except ValueError as exc:
            raise _fail(str(exc)) from None
    elif kind == "finite":
        if "file" not in space_sect:
            raise _fail("finite space needs file = <path> in [space]")
        space_path = _resolve(base_dir, space_sect["file"])
        try:
            space = read_finite_space_file(space_path)
        except ValueError as exc:
            raise _fail(f"finite space file invalid: {exc}") from None
        echo["space"]["file"] = space_path
    else:
        raise _fail(f"[space] kind must be vector or finite, got {kind!r}")

    # --- star
    if "preset" in star_sect and "file" in star_sect:
        raise _fail("[star] takes preset or file, not both")
    if "preset" in star_sect:
        n_text = star_sect.get("n")
        try:
            n_val = int(n_text) if n_text is not None else None
        except ValueError:
            raise _fail(f"star n must be an integer, got {n_text!r}") from None
        try:
            star = preset(star_sect["preset"].strip(), n_val)
        except ValueError as exc:
            raise _fail(str(exc)) from None
    elif "file" in star_sect:
        star_path = _resolve(base_dir, star_sect["file"])
        try:
            star = read_star_file(star_path)
        except ValueError as exc:
            raise _fail(f"star file invalid: {exc}") from None
        echo["star"]["file"] = star_path
    else:
        raise _fail("[star] needs preset = <name> or file = <path>")
    n = star.n

    # --- mappings
    phi = _parse_phi(map_sect)
    g_inverse = None
    if isinstance(space, FiniteSpace):
        p = space.p
        if "F_table" not in map_sect:
            raise _fail("finite problems need F_table = <path> in [mappings]")
        f_path = _resolve(base_dir, map_sect["F_table"])
        try:
            F = read_f_table_file(f_path, p, n)
        except ValueError as exc:
            raise _fail(f"F table invalid: {exc}") from None
        echo["mappings"]["F_table"] = f_path
        g = None
        if "g_table" in map_sect:
            g_path = _resolve(base_dir, map_sect["g_table"])
            try:
                g = read_g_table_file(g_path, p)
            except ValueError as exc:
                raise _fail(f"g table invalid: {exc}") from None
            echo["mappings"]["g_table"] = g_path
        if "g_inverse_table" in map_sect:
            gi_path = _resolve(base_dir, map_sect["g_inverse_table"])
            try:
                g_inverse = read_g_table_file(gi_path, p)
            except ValueError as exc:
                raise _fail(f"g_inverse table invalid: {exc}") from None
            echo["mappings"]["g_inverse_table"] = gi_path
    else:
        k = space.k
        F = _mapping_source(map_sect, "F", n, k)
        if F is None:
            raise _fail("vector problems need F = <expression> in [mappings]")
        g = _mapping_source(map_sect, "g", 1, k)
        g_inverse = _mapping_source(map_sect, "g_inverse", 1, k)

    # --- solver controls
    try:
        solve = SolveConfig(
            tol=float(solver_sect.get("tol", "1e-10")),
            max_iter=int(solver_sect.get("max_iter", "10000")),
            residual_metric=solver_sect.get("residual_metric", "nabla").strip(),
        )
    except ValueError as exc:
        raise _fail(f"[solver] invalid: {exc}") from None
    direction = solver_sect.get("direction", "up").strip().lower()
    if direction not in ("up", "down", "either"):
        raise _fail(f"direction must be up, down or either, got {direction!r}")

    # --- initial tuple
    U0 = None
    if "U0" in init_sect:
        if isinstance(space, FiniteSpace):
            vals = _floats(init_sect["U0"], "U0")
            if len(vals) != n or any(v != int(v) for v in vals):
                raise _fail(f"U0 needs {n} point ids, got {init_sect['U0']!r}")
            U0 = np.asarray([int(v) for v in vals], np.int64)
        else:
            vals = _floats(init_sect["U0"], "U0")
            if len(vals) != n * space.k:
                raise _fail(
                    f"U0 needs {n * space.k} numbers ({n} slots x {space.k}), got {len(vals)}"
                )
            U0 = np.asarray(vals, np.float64).reshape(n, space.k)

    # --- check section
    variant = None
    if "variant" in check_sect:
        alpha = None
        weights = None
        if "alpha" in check_sect:
            try:
                alpha = float(check_sect["alpha"])
            except ValueError:
                raise _fail(f"alpha must be a number, got {check_sect['alpha']!r}") from None
        if "weights" in check_sect:
            weights = tuple(_floats(check_sect["weights"], "weights"))
            if len(weights) != n:
                raise _fail(f"weights needs {n} entries, got {len(weights)}")
        try:
            variant = ContractionVariant(check_sect["variant"].strip(), alpha=alpha, weights=weights)
        except ValueError as exc:
            raise _fail(str(exc)) from None

    try:
        samples = int(check_sect.get("samples", str(DEFAULT_SAMPLES)))
        seed = int(check_sect.get("seed", str(DEFAULT_SEED)))
        slack = float(check_sect.get("slack", "1e-12"))
        bound = int(check_sect.get("bound", str(DEFAULT_BOUND)))
    except ValueError as exc:
        raise _fail(f"[check] invalid: {exc}") from None
    box = DEFAULT_BOX
    if "box" in check_sect:
        vals = _floats(check_sect["box"], "box")
        if len(vals) != 2 or vals[1] < vals[0]:
            raise _fail(f"box needs two numbers lo hi, got {check_sect['box']!r}")
        box = (vals[0], vals[1])
    sampler = SamplerConfig(samples=samples, seed=seed, box=box, slack=slack, bound=bound)

    try:
        problem = ProblemSpec.create(
            space=space,
            star=star,
            F=F,
            g=g,
            g_inverse=g_inverse,
            phi=phi,
            variant=variant,
            U0=U0,
            direction=direction,
        )
    except (ValueError, TypeError, dsl.ParseError) as exc:
        raise _fail(str(exc)) from None

    return ProblemConfig(problem=problem, solve=solve, sampler=sampler, echo=echo, base_dir=base_dir)

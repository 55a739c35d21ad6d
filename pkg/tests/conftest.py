"""Shared fixtures: JIT warmup and small instance generators."""

import itertools

import numpy as np
import pytest

import starfix as sx


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Compile the hot kernels once so timed tests measure steady state."""
    chain = sx.chain_space(2)
    F = np.zeros((2, 2), dtype=np.int64)
    star = sx.preset("coupled2")
    sx.lemma3_crosscheck(chain, F, None, star)
    sx.check_monotone_property(F, None, chain, 2)
    sx.check_argumentwise_monotone(F, None, chain, 2)
    sx.check_contraction(
        F,
        None,
        star,
        sx.ComparisonFn.linear(0.5),
        sx.ContractionVariant("pointwise_max", alpha=0.5),
        chain,
    )
    sx.check_commuting(F, np.arange(2), chain, n=2)


def random_metric_space(rng, p, k=2):
    """A genuine finite metric: pairwise distances of random points in R^k.

    The order is a random subset of a chain order, so it is always a
    partial order (reflexive, antisymmetric, transitive).
    """
    pts = rng.uniform(-5.0, 5.0, size=(p, k))
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    np.fill_diagonal(dist, 0.0)
    rank = rng.permutation(p)
    keep = rng.random((p, p)) < 0.7
    leq = np.zeros((p, p), dtype=bool)
    for i in range(p):
        for j in range(p):
            if rank[i] <= rank[j] and (keep[i, j] or i == j):
                leq[i, j] = True
    # close transitively so the table is a valid partial order
    closed = leq.copy()
    for m in range(p):
        closed = closed | (closed[:, m : m + 1] & closed[m : m + 1, :])
    return sx.FiniteSpace(dist, closed)


def random_star(rng, n):
    return sx.make_star(n, rng.integers(1, n + 1, size=(n, n)))


def all_tuples(p, n):
    return list(itertools.product(range(p), repeat=n))

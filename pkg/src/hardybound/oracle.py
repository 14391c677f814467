"""Brute-force adversaries: exact for two discrete marginals, stochastic beyond.

The exact adversary maximizes ``P(X + Y >= t)`` over all couplings of two
discrete laws.  That is a linear program over the transportation polytope,
whose vertices are the nonnegative solutions supported on spanning trees of
the complete bipartite graph between the two atom sets.  All trees are
enumerated and solved in rational arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .distributions import Discrete, Distribution
from .errors import ArgumentError, CapabilityError

MAX_ATOMS = 5


@dataclass(frozen=True)
class TransportInstance:
    marginal_a: Discrete
    marginal_b: Discrete
    t: object

    def __post_init__(self):
        for mu in (self.marginal_a, self.marginal_b):
            if not isinstance(mu, Discrete):
                raise ArgumentError("transport instances need discrete marginals")
            if len(mu.atoms) > MAX_ATOMS:
                raise CapabilityError(f"at most {MAX_ATOMS} atoms per marginal, got {len(mu.atoms)}")


@lru_cache(maxsize=None)
def spanning_tree_plans(m: int, k: int):
    """Leaf-elimination plans for every spanning tree of ``K_{m,k}``.

    Nodes ``0..m-1`` are rows and ``m..m+k-1`` are columns.  A plan is a list
    of ``(leaf, edge, other)`` steps: the edge takes the leaf's remaining mass,
    which is then removed from ``other``.
    """
    edges = [(i, m + j) for i in range(m) for j in range(k)]
    size = m + k
    plans = []
    for subset in itertools.combinations(range(len(edges)), size - 1):
        parent = list(range(size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tree = True
        for e in subset:
            a, b = (find(v) for v in edges[e])
            if a == b:
                tree = False
                break
            parent[a] = b
        if tree:
            plans.append(_elimination_plan(edges, subset, size))
    return tuple(plans)


def _elimination_plan(edges, subset, size):
    adj = {v: set() for v in range(size)}
    for e in subset:
        a, b = edges[e]
        adj[a].add(e)
        adj[b].add(e)
    plan = []
    leaves = [v for v in range(size) if len(adj[v]) == 1]
    while leaves:
        v = leaves.pop()
        if len(adj[v]) != 1:
            continue
        (e,) = adj[v]
        a, b = edges[e]
        other = b if a == v else a
        plan.append((v, e, other))
        adj[v].clear()
        adj[other].discard(e)
        if len(adj[other]) == 1:
            leaves.append(other)
    return tuple(plan)


def transport_vertices(a: Discrete, b: Discrete):
    """All distinct vertices of the coupling polytope, as flat tuples of masses."""
    m, k = len(a.atoms), len(b.atoms)
    supply = [w for _, w in a.atoms] + [w for _, w in b.atoms]
    seen = set()
    for plan in spanning_tree_plans(m, k):
        rest = list(supply)
        flow = [Fraction(0)] * (m * k)
        ok = True
        for leaf, e, other in plan:
            x = rest[leaf]
            if x < 0:
                ok = False
                break
            flow[e] = x
            rest[leaf] = 0
            rest[other] -= x
        if ok and all(v == 0 for v in rest):
            seen.add(tuple(flow))
    return sorted(seen)


def max_tail_two(inst: TransportInstance):
    """Exact ``max P(X + Y >= t)`` and an optimal coupling matrix."""
    values, matrix = max_tail_two_sweep(inst.marginal_a, inst.marginal_b, [inst.t])
    return values[0], matrix[0]


def max_tail_two_sweep(a: Discrete, b: Discrete, thresholds):
    """:func:`max_tail_two` for many thresholds, reusing the vertex list."""
    TransportInstance(a, b, 0)
    m, k = len(a.atoms), len(b.atoms)
    verts = transport_vertices(a, b)
    sums = [av + bv for av, _ in a.atoms for bv, _ in b.atoms]
    values, mats = [], []
    for t in thresholds:
        mask = [s >= t for s in sums]
        best, arg = Fraction(-1), None
        for v in verts:
            val = sum(x for x, keep in zip(v, mask) if keep)
            if val > best:
                best, arg = val, v
        values.append(best)
        mats.append([list(arg[i * k : (i + 1) * k]) for i in range(m)])
    return values, mats


def grid_points(mu: Distribution, grid: int) -> np.ndarray:
    """Quantiles of ``mu`` at the mid-levels ``(g + 0.5) / grid``, descending."""
    levels = (np.arange(grid) + 0.5) / grid
    from .kernels import quantile_many

    return quantile_many(mu.kernel_spec(), levels)


def random_coupling_probe(mu: Distribution, n: int, t, trials: int, rng, grid: int = 1000):
    """Best empirical ``P(mean >= t)`` over random rearrangements of a quantile grid.

    Each trial permutes the grid independently for every coordinate.  The
    pool always contains the comonotone arrangement and, for the second
    coordinate, the reversed one.  Returns ``(value, grid)``.
    """
    if trials < 1:
        raise ArgumentError("trials must be positive")
    if n < 1:
        raise ArgumentError("n must be positive")
    base = grid_points(mu, grid)
    best = 0.0
    for trial in range(trials):
        total = base.copy()
        for c in range(1, n):
            if trial == 0:
                col = base
            elif trial == 1:
                col = base[::-1] if c == 1 else base[rng.permutation(grid)]
            else:
                col = base[rng.permutation(grid)]
            total = total + col
        best = max(best, float(np.mean(total / n >= t)))
    return best, grid


def probe_sigma(value, grid) -> float:
    """Binomial standard deviation of a grid frequency."""
    return math.sqrt(max(value * (1 - value), 0.0) / grid)

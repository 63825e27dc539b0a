"""Independent reference implementations used as test oracles.

Nothing here imports the package's algorithms; each oracle recomputes its
quantity from the raw definition by enumeration.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def set_partitions(items):
    """Pairs plus at most one singleton, as lists of tuples."""
    items = list(items)
    if len(items) % 2 == 0:
        yield from _perfect(items)
        return
    for s in range(len(items)):
        rest = items[:s] + items[s + 1 :]
        for p in _perfect(rest):
            yield [(items[s],)] + p


def _perfect(items):
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        for p in _perfect(items[1:k] + items[k + 1 :]):
            yield [(a, items[k])] + p


def pairing_matrix(m: int) -> list[list[int]]:
    """Row i: colour the first i of m balls red; entry j counts the
    partitions with exactly j red-blue pairs."""
    n = m // 2
    A = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        colour = [1] * i + [0] * (m - i)
        for p in set_partitions(range(m)):
            j = sum(1 for s in p if len(s) == 2 and colour[s[0]] != colour[s[1]])
            A[i][j] += 1
    return A


def forward_solve(A, h) -> list[Fraction]:
    x: list[Fraction] = []
    for i in range(len(h)):
        x.append((Fraction(h[i]) - sum(A[i][j] * x[j] for j in range(i))) / A[i][i])
    return x


def count_subgraphs(n_vertices: int, edges, lo: int | None, hi: int | None, weights=None) -> Fraction:
    """Weighted count of edge subsets with every degree in [lo, hi]."""
    total = Fraction(0)
    for chosen in itertools.product((0, 1), repeat=len(edges)):
        deg = [0] * n_vertices
        for c, (u, v) in zip(chosen, edges):
            if c:
                deg[u] += 1
                deg[v] += 1
        if lo is not None and min(deg) < lo:
            continue
        if hi is not None and max(deg) > hi:
            continue
        w = Fraction(1)
        if weights is not None:
            for c, x in zip(chosen, weights):
                if c:
                    w *= x
        total += w
    return total


def holant_Z(vertex_values, edges, k: int) -> Fraction:
    """Z_k by a direct filter over all half-edge assignments.

    ``vertex_values[v]`` is the value list of vertex v's symmetric function;
    half-edge 2i sits at the first endpoint of edge i.
    """
    n = len(vertex_values)
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=2 * len(edges)):
        if sum(bits[2 * i] != bits[2 * i + 1] for i in range(len(edges))) != k:
            continue
        ones = [0] * n
        for i, (u, v) in enumerate(edges):
            ones[u] += bits[2 * i]
            ones[v] += bits[2 * i + 1]
        w = Fraction(1)
        for vals, c in zip(vertex_values, ones):
            w *= Fraction(vals[c])
        total += w
    return total


def windable_by_lp(values) -> bool:
    """Feasibility of the raw witness constraints B(x,y,M) >= 0 with
    sum_M B = F(x)F(y) and flip invariance, as a linear program."""
    from scipy.optimize import linprog

    d = len(values) - 1
    vals = [float(Fraction(v)) for v in values]
    xs = list(itertools.product((0, 1), repeat=d))
    var = {}
    for x in xs:
        for y in xs:
            diff = [i for i in range(d) if x[i] != y[i]]
            for M in set_partitions(diff):
                var[(x, y, tuple(sorted(M)))] = len(var)
    rows, rhs = [], []
    for x in xs:
        for y in xs:
            diff = [i for i in range(d) if x[i] != y[i]]
            r = np.zeros(len(var))
            for M in set_partitions(diff):
                r[var[(x, y, tuple(sorted(M)))]] = 1
            rows.append(r)
            rhs.append(vals[sum(x)] * vals[sum(y)])
    for (x, y, M), i in var.items():
        for S in M:
            x2 = tuple(1 - b if k in S else b for k, b in enumerate(x))
            y2 = tuple(1 - b if k in S else b for k, b in enumerate(y))
            j = var[(x2, y2, M)]
            if j > i:
                r = np.zeros(len(var))
                r[i], r[j] = 1, -1
                rows.append(r)
                rhs.append(0.0)
    res = linprog(np.zeros(len(var)), A_eq=np.array(rows), b_eq=np.array(rhs), bounds=(0, None), method="highs")
    return res.status == 0

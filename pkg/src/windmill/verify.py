"""Named invariant suites and the bundled desk-scale fixtures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .holant import (
    HolantInstance,
    b_edge_cover_instance,
    b_matching_instance,
    brute_Z_all,
    weighted_transform,
)
from .mcmc import (
    detailed_balance_holds,
    is_irreducible,
    is_stationary,
    stationary_distribution,
    transition_matrix,
)
from .windability import build_A, double_factorial, pdecom_identity, verify_com_identity

__all__ = ["Fixture", "FIXTURES", "Check", "SUITES", "run_suite", "ratio_bound"]

TRIANGLE = [(0, 1), (1, 2), (0, 2)]
K4 = list(itertools.combinations(range(4), 2))
PATH2 = [(0, 1), (1, 2)]
SQUARE = [(0, 1), (1, 2), (2, 3), (0, 3)]


@dataclass(frozen=True)
class Fixture:
    name: str
    problem: str  # "matching" or "edge-cover"
    b: int
    edges: tuple
    weights: tuple | None = None

    def base(self) -> HolantInstance:
        build = b_matching_instance if self.problem == "matching" else b_edge_cover_instance
        return build(list(self.edges), self.b)

    def instance(self) -> HolantInstance:
        inst = self.base()
        return weighted_transform(inst, self.weights) if self.weights is not None else inst


FIXTURES: dict[str, Fixture] = {
    f.name: f
    for f in [
        Fixture("triangle-matching-1", "matching", 1, tuple(TRIANGLE)),
        Fixture("k4-matching-2", "matching", 2, tuple(K4)),
        Fixture("triangle-edge-cover-1", "edge-cover", 1, tuple(TRIANGLE)),
        Fixture("k4-edge-cover-2", "edge-cover", 2, tuple(K4)),
        Fixture("weighted-triangle-matching-1", "matching", 1, tuple(TRIANGLE), (Fraction(2),) * 3),
        Fixture("path2-matching-1", "matching", 1, tuple(PATH2)),
        Fixture("square-edge-cover-1", "edge-cover", 1, tuple(SQUARE)),
        Fixture("k4-matching-1", "matching", 1, tuple(K4)),
    ]
}

# the five fixtures of the end-to-end counting check, with their exact Z_0
COUNTING_FIXTURES = (
    "triangle-matching-1",
    "k4-matching-2",
    "triangle-edge-cover-1",
    "k4-edge-cover-2",
    "weighted-triangle-matching-1",
)


def ratio_bound(problem: str, n_edges: int, weights=None) -> Fraction:
    """Upper bound on Z_2/Z_0: ``4n^2`` unweighted, ``16n^2 max w^2`` for
    weighted matchings and ``16n^2 / min w^2`` for weighted edge covers,
    with ``n`` the edge count of the original graph."""
    n2 = Fraction(n_edges * n_edges)
    if weights is None:
        return 4 * n2
    if problem == "matching":
        return 16 * n2 * max(weights) ** 2
    return 16 * n2 / min(weights) ** 2


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def _rowsums(max_m: int = 14) -> list[Check]:
    out = []
    for m in range(1, max_m + 1):
        A = build_A(m)
        want = double_factorial(2 * ((m - 1) // 2) + 1)
        sums = {sum(A[i, j] for j in range(A.size)) for i in range(A.size)}
        out.append(Check("rowsums", f"m={m}", sums == {want}, f"row sums {sorted(str(s) for s in sums)} vs {want}"))
    return out


def _com(max_n: int = 30) -> list[Check]:
    bad = [(m, n) for n in range(2, max_n + 1) for m in range(1, n) if not verify_com_identity(m, n)]
    total = max_n * (max_n - 1) // 2
    return [Check("com", f"1<=m<n<={max_n}", not bad, f"{total - len(bad)}/{total} pairs vanish")]


def _pdecom(max_m: int = 12) -> list[Check]:
    return [Check("pdecom", f"m={2 * n}", pdecom_identity(n)) for n in range(1, max_m // 2 + 1)]


def _detailed_balance() -> list[Check]:
    out = []
    for name, fx in FIXTURES.items():
        tm = transition_matrix(fx.instance())
        mu = stationary_distribution(tm)
        stochastic = all(sum(r.values()) == 1 for r in tm.rows)
        lazy = all(r[i] >= Fraction(1, 2) for i, r in enumerate(tm.rows))
        ok = stochastic and lazy and detailed_balance_holds(tm, mu) and is_stationary(tm, mu) and is_irreducible(tm)
        out.append(Check("detailed-balance", name, ok, f"{tm.size} states"))
    return out


def _z2bound() -> list[Check]:
    out = []
    for name, fx in FIXTURES.items():
        Z = brute_Z_all(fx.instance())
        z0, z2, z4 = Z[0], Z.get(2, Fraction(0)), Z.get(4, Fraction(0))
        bound = ratio_bound(fx.problem, len(fx.edges), fx.weights)
        ok = z0 * z4 <= z2 * z2 and z2 <= bound * z0
        out.append(Check("z2bound", name, ok, f"Z0={z0} Z2={z2} Z4={z4} Z2/Z0={z2 / z0} bound={bound}"))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "rowsums": _rowsums,
    "com": _com,
    "pdecom": _pdecom,
    "detailed-balance": _detailed_balance,
    "z2bound": _z2bound,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return SUITES[name]()

"""Windability certificates for symmetric functions.

A symmetric ``F`` is windable iff for every pinning ``G`` of arity ``m`` the
lower-triangular system ``A_m x = h`` has a nonnegative solution, where ``h``
is the first half of ``G(x) G(~x)``.  Everything here is exact rational
arithmetic; the verdict is a certificate, not an estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterator, Sequence

from .symfunc import SymmetricFunction, as_fraction, h_vector, pin

__all__ = [
    "double_factorial",
    "PartitionMatrix",
    "build_A",
    "solve_triangular",
    "TwoDecomposition",
    "is_2_decomposable",
    "PinningRecord",
    "WindabilityReport",
    "is_windable",
    "closed_form_edge_cover",
    "parity_split",
    "reduce_odd_to_even",
    "partitions",
    "mixed_pairs",
    "witness_B",
    "verify_com_identity",
    "pdecom_identity",
]


def double_factorial(n: int) -> int:
    """n!! with (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class PartitionMatrix:
    """``A_m``: entry (i, j) counts partitions of i red and m-i blue labelled
    balls into pairs (plus one singleton when m is odd) with exactly j
    mixed-colour pairs."""

    m: int
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return self.m // 2

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def apply(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(x) != self.size:
            raise ValueError(f"expected vector of length {self.size}, got {len(x)}")
        return tuple(sum((a * v for a, v in zip(row, x)), Fraction(0)) for row in self.entries)

    def to_json(self) -> list[list[str]]:
        return [[str(a) for a in row] for row in self.entries]


def _entry(m: int, i: int, j: int) -> int:
    if j > i:
        return 0
    base = comb(i, j) * comb(m - i, j) * factorial(j)
    same_parity = (i - j) % 2 == 0
    if m % 2 == 0:
        if not same_parity:
            return 0
        return base * double_factorial(i - j - 1) * double_factorial(m - i - j - 1)
    if same_parity:
        # leftover reds pair up, leftover blues include the singleton
        return base * double_factorial(i - j - 1) * double_factorial(m - i - j)
    # leftover reds include the singleton, leftover blues pair up
    return base * double_factorial(i - j) * double_factorial(m - 1 - i - j)


@lru_cache(maxsize=None)
def build_A(m: int) -> PartitionMatrix:
    if m < 1:
        raise ValueError(f"A_m needs m >= 1, got {m}")
    n = m // 2
    rows = tuple(tuple(Fraction(_entry(m, i, j)) for j in range(n + 1)) for i in range(n + 1))
    return PartitionMatrix(m, rows)


def solve_triangular(A: PartitionMatrix, h: Sequence) -> tuple[Fraction, ...]:
    """Forward substitution for the unique solution of ``A x = h``."""
    h = [as_fraction(v) for v in h]
    if len(h) != A.size:
        raise ValueError(f"h has length {len(h)}, A_{A.m} needs {A.size}")
    x: list[Fraction] = []
    for i, row in enumerate(A.entries):
        acc = h[i]
        for j in range(i):
            if row[j]:
                acc -= row[j] * x[j]
        x.append(acc / row[i])
    return tuple(x)


@dataclass(frozen=True)
class TwoDecomposition:
    """Class values ``D_k`` of a 2-decomposition, indexed by the number of
    mixed pairs."""

    m: int
    d_values: tuple[Fraction, ...]


def is_2_decomposable(h: Sequence, m: int) -> TwoDecomposition | None:
    x = solve_triangular(build_A(m), h)
    if all(v >= 0 for v in x):
        return TwoDecomposition(m, x)
    return None


@dataclass(frozen=True)
class PinningRecord:
    zeros: int
    ones: int
    m: int
    h: tuple[Fraction, ...]
    solution: tuple[Fraction, ...]
    nonneg: bool

    def to_json(self) -> dict:
        return {
            "zeros": self.zeros,
            "ones": self.ones,
            "m": self.m,
            "h": [str(v) for v in self.h],
            "solution": [str(v) for v in self.solution],
            "nonneg": self.nonneg,
        }


@dataclass(frozen=True)
class WindabilityReport:
    function: SymmetricFunction
    windable: bool
    per_pinning: tuple[PinningRecord, ...]
    counterexample: tuple[int, int] | None

    @property
    def verdict(self) -> str:
        return "Windable" if self.windable else "NotWindable"

    def record(self, zeros: int, ones: int) -> PinningRecord:
        for r in self.per_pinning:
            if r.zeros == zeros and r.ones == ones:
                return r
        raise KeyError((zeros, ones))

    def to_json(self) -> dict:
        return {
            "function": self.function.to_json(),
            "verdict": self.verdict,
            "counterexample": (
                None
                if self.counterexample is None
                else {"zeros": self.counterexample[0], "ones": self.counterexample[1]}
            ),
            "per_pinning": [r.to_json() for r in self.per_pinning],
        }


@lru_cache(maxsize=4096)
def is_windable(f: SymmetricFunction) -> WindabilityReport:
    """Check every pinning with residual arity >= 1, in ascending (zeros, ones)."""
    d = f.arity
    if d < 1:
        raise ValueError("windability check needs arity >= 1")
    records = []
    counterexample = None
    for zeros in range(d):
        for ones in range(d - zeros):
            g = pin(f, zeros, ones)
            h = h_vector(g)
            x = solve_triangular(build_A(g.arity), h)
            ok = all(v >= 0 for v in x)
            records.append(PinningRecord(zeros, ones, g.arity, h, x, ok))
            if not ok and counterexample is None:
                counterexample = (zeros, ones)
    return WindabilityReport(f, counterexample is None, tuple(records), counterexample)


def _even_part_solution(n: int) -> list[Fraction]:
    """Closed-form solution of ``A_{2n} x = (>=2)*Even`` on indices 0..n."""
    top = double_factorial(2 * n - 1)
    x = [Fraction(0)] * (n + 1)
    for j in range(n // 2 + 1):
        denom = 1
        for i in range(1, j + 1):
            denom *= 2 * n - 2 * i
        x[2 * j] = (1 - (-1) ** j * Fraction(double_factorial(2 * j - 1), denom)) / top
    return x


def _odd_part_solution(n: int) -> list[Fraction]:
    """Closed-form solution of ``A_{2n} x = (>=3)*Odd`` on indices 0..n."""
    top = double_factorial(2 * n - 1)
    x = [Fraction(0)] * (n + 1)
    for j in range((n - 1) // 2 + 1):
        denom = 1
        for i in range(2, j + 2):
            denom *= 2 * n - 2 * i
        x[2 * j + 1] = (1 - (-1) ** j * Fraction(double_factorial(2 * j + 1), denom)) / top
    return x


def closed_form_edge_cover(b: int, m: int, part: str | None = None) -> tuple[Fraction, ...]:
    """Closed-form solution of ``A_m x = (>=b)`` prefix for even ``m = 2n``.

    ``part="even"`` returns the solution for the even-index part of the
    right-hand side, ``part="odd"`` for the odd-index part, and ``None`` their
    sum (the full solution).  For b=1 the odd part is ``Odd``, whose solution
    is ``Odd / (2n-1)!!``.
    """
    if b not in (1, 2):
        raise ValueError(f"closed forms exist for b in {{1, 2}}, got {b}")
    if m < 2 or m % 2:
        raise ValueError(f"closed forms need even m >= 2, got {m}")
    n = m // 2
    even = _even_part_solution(n)
    if b == 1:
        top = double_factorial(2 * n - 1)
        odd = [Fraction(i % 2, top) for i in range(n + 1)]
    else:
        odd = _odd_part_solution(n)
    if part == "even":
        return tuple(even)
    if part == "odd":
        return tuple(odd)
    if part is not None:
        raise ValueError(f"part must be 'even', 'odd' or None, got {part!r}")
    return tuple(e + o for e, o in zip(even, odd))


def parity_split(h: Sequence, m: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    if m % 2:
        raise ValueError("parity split applies to even m only")
    h = [as_fraction(v) for v in h]
    if len(h) != m // 2 + 1:
        raise ValueError(f"h has length {len(h)}, expected {m // 2 + 1}")
    h_even = tuple(v if i % 2 == 0 else Fraction(0) for i, v in enumerate(h))
    h_odd = tuple(v if i % 2 == 1 else Fraction(0) for i, v in enumerate(h))
    return h_even, h_odd


def reduce_odd_to_even(h_prime: Sequence, m: int, parity: str) -> tuple[Fraction, ...]:
    """Lift a right-hand side for ``A_{2n-1}`` to one for ``A_{2n}``.

    ``parity="odd"`` expects ``h'_{2i} == h'_{2i+1}`` and returns the odd
    vector with ``h_{2i+1} = h'_{2i}``; ``parity="even"`` expects
    ``h'_{2i-1} == h'_{2i}`` and returns the even vector with
    ``h_{2i} = h'_{2i}`` (``h'_{2i-1}`` at the end).  The two systems then
    have nonnegative solutions together or not at all.
    """
    if m % 2 == 0 or m < 1:
        raise ValueError(f"m must be odd and positive, got {m}")
    n = (m + 1) // 2
    hp = [as_fraction(v) for v in h_prime]
    if len(hp) != n:
        raise ValueError(f"h' has length {len(hp)}, A_{m} needs {n}")
    h = [Fraction(0)] * (n + 1)
    if parity == "odd":
        for i in range(0, n, 2):
            if i + 1 < n and hp[i] != hp[i + 1]:
                raise ValueError(f"h'[{i}] != h'[{i + 1}]: not an odd-type right-hand side")
            h[i + 1] = hp[i]
    elif parity == "even":
        for i in range(0, n + 1, 2):
            if i == 0:
                h[0] = hp[0]
                continue
            if i < n and hp[i - 1] != hp[i]:
                raise ValueError(f"h'[{i - 1}] != h'[{i}]: not an even-type right-hand side")
            h[i] = hp[i] if i < n else hp[i - 1]
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return tuple(h)


def partitions(items: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Partitions of ``items`` into pairs and at most one singleton.

    Parts are sorted tuples and appear in ascending order of their first
    element, so each partition has one canonical form.
    """
    items = sorted(items)
    if len(items) % 2 == 0:
        yield from _pairings(items)
        return
    for s in range(len(items)):
        rest = items[:s] + items[s + 1 :]
        for p in _pairings(rest):
            yield tuple(sorted(p + ((items[s],),)))


def _pairings(items: list[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not items:
        yield ()
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for p in _pairings(rest):
            yield ((first, items[k]),) + p


def mixed_pairs(bits: Sequence[int], partition) -> int:
    """Number of pairs in ``partition`` whose two positions disagree in ``bits``."""
    return sum(1 for part in partition if len(part) == 2 and bits[part[0]] != bits[part[1]])


@lru_cache(maxsize=None)
def _class_values(f: SymmetricFunction, zeros: int, ones: int) -> tuple[Fraction, ...]:
    g = pin(f, zeros, ones)
    return solve_triangular(build_A(g.arity), h_vector(g))


def witness_B(f: SymmetricFunction, x: Sequence[int], y: Sequence[int]) -> dict:
    """Witness values ``B(x, y, M)`` for every partition ``M`` of the
    disagreement set of ``x`` and ``y``.

    Partitions are keyed by their canonical tuple form over positions of
    ``x``.  Pins ``f`` on the agreement set and reads the class value
    ``D_k`` of the pinned ``G G~``, ``k`` being the number of pairs on which
    ``x`` disagrees with itself.
    """
    if len(x) != f.arity or len(y) != f.arity:
        raise ValueError(f"x and y must have length {f.arity}")
    if f.arity >= 1 and not is_windable(f).windable:
        raise ValueError(f"{f} is not windable; no witness exists")
    diff = [i for i in range(f.arity) if x[i] != y[i]]
    if not diff:
        return {(): f.values[sum(x)] ** 2}
    agree_ones = sum(x[i] for i in range(f.arity) if x[i] == y[i])
    agree_zeros = f.arity - len(diff) - agree_ones
    D = _class_values(f, agree_zeros, agree_ones)
    return {M: D[mixed_pairs(x, M)] for M in partitions(diff)}


def verify_com_identity(m: int, n: int) -> bool:
    """Exact check of sum_j (-1)^j C(m,j) C(n-j,m) / (n-j) == 0 for 1 <= m < n."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    total = sum(Fraction((-1) ** j * comb(m, j) * comb(n - j, m), n - j) for j in range(m + 1))
    return total == 0


def pdecom_identity(n: int) -> bool:
    """Check a_ij = a'_{i,j-1} + a'_{ij} = a'_{i-1,j-1} + a'_{i-1,j} for
    A = A_{2n}, A' = A_{2n-1} and all i = j (mod 2), using whichever forms
    have a valid row index."""
    if n < 1:
        raise ValueError("n must be >= 1")
    A = build_A(2 * n)
    Ap = build_A(2 * n - 1)

    def ap(i: int, j: int) -> Fraction:
        if 0 <= j < Ap.size:
            return Ap[i, j]
        return Fraction(0)

    for i in range(n + 1):
        for j in range(n + 1):
            if (i - j) % 2:
                continue
            if i < n and A[i, j] != ap(i, j - 1) + ap(i, j):
                return False
            if i > 0 and A[i, j] != ap(i - 1, j - 1) + ap(i - 1, j):
                return False
    return True

"""Lazy Metropolis chain on Omega_0 u Omega_2 and its canonical paths.

A move picks an unordered pair of distinct half-edges with probability
``2/n^2`` (``n`` = number of half-edges), flips both, and accepts with the
Metropolis ratio if the result stays in Omega_0 u Omega_2 with positive
weight.  The chain is lazy: it holds with probability 1/2 first.

Randomness comes in blocks of four uniforms per step
``(lazy coin, first half-edge, second half-edge, acceptance)``, so the exact
Python ``step`` and the compiled multi-chain kernel consume identical
streams and stay in lockstep.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numba
import numpy as np

from .holant import (
    Assignment,
    HolantInstance,
    brute_Z_all,
    consistent_assignment,
    disagreement,
    find_feasible_assignment,
    weight,
)
from .windability import is_windable, partitions, witness_B

__all__ = [
    "ChainState",
    "make_rng",
    "chain_state",
    "step",
    "run_chains",
    "sample",
    "default_burn_in",
    "enumerate_states",
    "TransitionMatrix",
    "transition_matrix",
    "stationary_distribution",
    "detailed_balance_holds",
    "is_stationary",
    "is_irreducible",
    "tv_curve",
    "mixing_bound",
    "CanonicalPath",
    "pairing_choices",
    "canonical_path",
]

MAX_EXACT_STATES = 4096
_BLOCK = 4096


def _threads() -> int:
    raw = os.environ.get("WINDMILL_THREADS")
    return max(1, int(raw)) if raw else (os.cpu_count() or 1)


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox (counter-based) generator for ``seed`` and a sub-stream key."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=keys)))


@dataclass(frozen=True)
class ChainState:
    assignment: Assignment
    cached_weight: Fraction
    cached_disagreement: int


def chain_state(inst: HolantInstance, bits: Sequence[int]) -> ChainState:
    bits = tuple(int(b) for b in bits)
    w = weight(inst, bits)
    d = disagreement(inst, bits)
    if d not in (0, 2):
        raise ValueError(f"state has {d} inconsistent edges; the chain lives on Omega_0 u Omega_2")
    if w <= 0:
        raise ValueError("zero-weight states are outside the chain")
    return ChainState(bits, w, d)


def step(inst: HolantInstance, state: ChainState, rng: np.random.Generator) -> ChainState:
    """One exact transition of the lazy chain."""
    lazy, r1, r2, u = rng.random(4)
    N = inst.n_half_edges
    if lazy < 0.5 or N < 2:
        return state
    i, j = int(r1 * N), int(r2 * N)
    if i == j:
        return state
    bits = list(state.assignment)
    bits[i] ^= 1
    bits[j] ^= 1
    d = disagreement(inst, bits)
    if d not in (0, 2):
        return state
    w = weight(inst, bits)
    if w == 0:
        return state
    if Fraction(u) < w / state.cached_weight:
        return ChainState(tuple(bits), w, d)
    return state


@numba.njit(cache=True, nogil=True)
def _kernel(bits, pc, dis, hv, ftab, rand, record_from, thin, out, out_offset):
    C, N = bits.shape
    T = rand.shape[1]
    for c in range(C):
        for t in range(T):
            r = rand[c, t]
            if r[0] >= 0.5 and N >= 2:
                i = int(r[1] * N)
                j = int(r[2] * N)
                if i != j:
                    a = hv[i]
                    b = hv[j]
                    di = 1 - 2 * bits[c, i]
                    dj = 1 - 2 * bits[c, j]
                    if a == b:
                        old = ftab[a, pc[c, a]]
                        new = ftab[a, pc[c, a] + di + dj]
                        ok = new > 0.0
                        ratio = new / old
                    else:
                        na = ftab[a, pc[c, a] + di]
                        nb = ftab[b, pc[c, b] + dj]
                        ok = na > 0.0 and nb > 0.0
                        ratio = (na / ftab[a, pc[c, a]]) * (nb / ftab[b, pc[c, b]])
                    ei = i // 2
                    ej = j // 2
                    nd = dis[c]
                    if ei != ej:
                        if bits[c, 2 * ei] == bits[c, 2 * ei + 1]:
                            nd += 1
                        else:
                            nd -= 1
                        if bits[c, 2 * ej] == bits[c, 2 * ej + 1]:
                            nd += 1
                        else:
                            nd -= 1
                    if ok and (nd == 0 or nd == 2) and r[3] < ratio:
                        bits[c, i] ^= 1
                        bits[c, j] ^= 1
                        pc[c, a] += di
                        pc[c, b] += dj
                        dis[c] = nd
            g = out_offset + t + 1 - record_from
            if g > 0 and g % thin == 0:
                k = g // thin - 1
                if k < out.shape[1]:
                    for h in range(N):
                        out[c, k, h] = bits[c, h]


@lru_cache(maxsize=256)
def _tables(inst: HolantInstance):
    hv = np.array(inst.half_edge_vertex, dtype=np.int64)
    width = max([f.arity for f in inst.functions] + [0]) + 1
    ftab = np.zeros((inst.n_vertices, width), dtype=np.float64)
    for v, f in enumerate(inst.functions):
        ftab[v, : f.arity + 1] = [float(x) for x in f.values]
    return hv, ftab


def run_chains(
    inst: HolantInstance,
    starts,
    n_steps: int,
    rngs: Sequence[np.random.Generator],
    record_from: int | None = None,
    thin: int = 1,
    n_records: int = 0,
):
    """Advance one chain per row of ``starts`` by ``n_steps`` transitions.

    Chain ``c`` draws its randomness from ``rngs[c]``.  When ``n_records`` is
    positive, the state after step ``record_from + k*thin`` (k = 1..n_records)
    is stored.  Returns ``(final_bits, records)`` as uint8 arrays of shape
    ``(C, N)`` and ``(C, n_records, N)``.
    """
    bits = np.array(starts, dtype=np.uint8, copy=True)
    if bits.ndim != 2 or bits.shape[1] != inst.n_half_edges:
        raise ValueError("starts must have shape (chains, half-edges)")
    C, N = bits.shape
    if len(rngs) != C:
        raise ValueError("one generator per chain")
    hv, ftab = _tables(inst)
    pc = np.zeros((C, inst.n_vertices), dtype=np.int64)
    for v, hs in enumerate(inst.incident):
        if hs:
            pc[:, v] = bits[:, list(hs)].sum(axis=1)
    if N:
        dis = (bits[:, 0::2] != bits[:, 1::2]).sum(axis=1).astype(np.int64)
    else:
        dis = np.zeros(C, dtype=np.int64)
    for c in range(C):
        w = np.prod(ftab[np.arange(inst.n_vertices), pc[c]]) if inst.n_vertices else 1.0
        if w <= 0 or dis[c] not in (0, 2):
            raise ValueError(f"chain {c} starts outside the positive-weight state space")
    record_from = n_steps - n_records * thin if record_from is None else record_from
    out = np.zeros((C, n_records, N), dtype=np.uint8)
    workers = min(_threads(), C)
    bounds = np.linspace(0, C, workers + 1).astype(int)

    def advance(lo: int, hi: int) -> None:
        done = 0
        while done < n_steps:
            block = min(_BLOCK, n_steps - done)
            rand = np.stack([g.random((block, 4)) for g in rngs[lo:hi]])
            _kernel(bits[lo:hi], pc[lo:hi], dis[lo:hi], hv, ftab, rand, record_from, max(thin, 1), out[lo:hi], done)
            done += block

    if workers == 1:
        advance(0, C)
    else:
        with ThreadPoolExecutor(workers) as pool:
            for fut in [pool.submit(advance, bounds[k], bounds[k + 1]) for k in range(workers)]:
                fut.result()
    return bits, out


def sample(
    inst: HolantInstance,
    burn_in: int,
    rng: np.random.Generator,
    start: Sequence[int] | None = None,
) -> Assignment:
    """Run ``burn_in`` steps from ``start`` (or a feasible Omega_0 state)."""
    if start is None:
        start = find_feasible_assignment(inst)
        if start is None:
            raise ValueError("no positive-weight start state found")
    chain_state(inst, start)
    final, _ = run_chains(inst, [list(start)], burn_in, [rng])
    return tuple(int(b) for b in final[0])


def default_burn_in(inst: HolantInstance, eps_tv: float = 0.25, mu_omega0: float | None = None) -> int:
    """``ceil(n^4 / mu(Omega_0)^2 * ln(2/eps))`` with n half-edges.

    Without an estimate, ``mu(Omega_0)`` is lower-bounded by ``1/(1+4m^2)``
    for m edges.
    """
    n = inst.n_half_edges
    m = inst.n_edges
    if mu_omega0 is None:
        mu_omega0 = 1.0 / (1 + 4 * m * m)
    return math.ceil(n**4 / mu_omega0**2 * math.log(2 / eps_tv))


def enumerate_states(inst: HolantInstance) -> list[Assignment]:
    """Positive-weight assignments of Omega_0 u Omega_2, Omega_0 first."""
    E = inst.n_edges
    raw = 2**E + (E * (E - 1) // 2) * 4 * 2 ** max(E - 2, 0)
    if raw > 1 << 22:
        raise ValueError(f"state space of {raw} candidates is too large to enumerate")
    states = []
    for mask in range(1 << E):
        bits = consistent_assignment([(mask >> i) & 1 for i in range(E)])
        if weight(inst, bits) > 0:
            states.append(bits)
    for a, b in itertools.combinations(range(E), 2):
        others = [e for e in range(E) if e not in (a, b)]
        for pa, pb in itertools.product(((0, 1), (1, 0)), repeat=2):
            for mask in range(1 << len(others)):
                bits = [0] * (2 * E)
                bits[2 * a], bits[2 * a + 1] = pa
                bits[2 * b], bits[2 * b + 1] = pb
                for k, e in enumerate(others):
                    bits[2 * e] = bits[2 * e + 1] = (mask >> k) & 1
                bits = tuple(bits)
                if weight(inst, bits) > 0:
                    states.append(bits)
    return states


@dataclass(frozen=True)
class TransitionMatrix:
    """Exact sparse row-stochastic matrix over ``states``."""

    states: tuple[Assignment, ...]
    weights: tuple[Fraction, ...]
    rows: tuple[dict, ...]

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, bits: Sequence[int]) -> int:
        return self.states.index(tuple(bits))

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i].get(j, Fraction(0))

    def to_numpy(self) -> np.ndarray:
        P = np.zeros((self.size, self.size))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                P[i, j] = float(p)
        return P


def transition_matrix(inst: HolantInstance) -> TransitionMatrix:
    states = enumerate_states(inst)
    if len(states) > MAX_EXACT_STATES:
        raise ValueError(f"{len(states)} states exceed the exact-matrix limit of {MAX_EXACT_STATES}")
    index = {s: i for i, s in enumerate(states)}
    weights = [weight(inst, s) for s in states]
    N = inst.n_half_edges
    base = Fraction(1, N * N)  # lazy half of 2/n^2
    rows = []
    for a, s in enumerate(states):
        row: dict = {}
        for i, j in itertools.combinations(range(N), 2):
            t = list(s)
            t[i] ^= 1
            t[j] ^= 1
            b = index.get(tuple(t))
            if b is None:
                continue
            row[b] = base * min(Fraction(1), weights[b] / weights[a])
        row[a] = 1 - sum(row.values(), Fraction(0))
        rows.append(row)
    return TransitionMatrix(tuple(states), tuple(weights), tuple(rows))


def stationary_distribution(tm: TransitionMatrix) -> list[Fraction]:
    total = sum(tm.weights, Fraction(0))
    return [w / total for w in tm.weights]


def detailed_balance_holds(tm: TransitionMatrix, mu: Sequence[Fraction]) -> bool:
    for i, row in enumerate(tm.rows):
        for j, p in row.items():
            if mu[i] * p != mu[j] * tm.entry(j, i):
                return False
    return True


def is_stationary(tm: TransitionMatrix, mu: Sequence[Fraction]) -> bool:
    out = [Fraction(0)] * tm.size
    for i, row in enumerate(tm.rows):
        for j, p in row.items():
            out[j] += mu[i] * p
    return out == list(mu)


def is_irreducible(tm: TransitionMatrix) -> bool:
    if tm.size == 0:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j, p in tm.rows[i].items():
            if p > 0 and j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == tm.size


def tv_curve(tm: TransitionMatrix, mu: Sequence[Fraction], start: int, t_max: int) -> list[Fraction]:
    """Exact ``||P^t(start, .) - mu||_TV`` for t = 0..t_max."""
    dist = {start: Fraction(1)}
    curve = []
    for t in range(t_max + 1):
        curve.append(sum((abs(dist.get(i, 0) - mu[i]) for i in range(tm.size)), Fraction(0)) / 2)
        if t == t_max:
            break
        nxt: dict = {}
        for i, p in dist.items():
            for j, q in tm.rows[i].items():
                nxt[j] = nxt.get(j, 0) + p * q
        dist = nxt
    return curve


def mixing_bound(mu_start: Fraction, mu_omega0: Fraction, n: int, t: int) -> float:
    """``(1/2) mu(start)^(-1/2) exp(-t mu(Omega_0)^2 / n^4)``, evaluated in log space."""
    log_ms = math.log(mu_start.numerator) - math.log(mu_start.denominator)
    m0 = mu_omega0.numerator / mu_omega0.denominator
    return math.exp(math.log(0.5) - 0.5 * log_ms - t * m0 * m0 / n**4)


@dataclass(frozen=True)
class CanonicalPath:
    states: tuple[Assignment, ...]
    flip_pairs: tuple[tuple[int, int], ...]
    weight: Fraction


def pairing_choices(inst: HolantInstance, sigma: Sequence[int], pi: Sequence[int]) -> list[list[tuple]]:
    """Per vertex, every partition of its disagreeing half-edges (global ids)."""
    out = []
    for hs in inst.incident:
        z = [h for h in hs if sigma[h] != pi[h]]
        out.append(list(partitions(z)))
    return out


def _local_partition(hs: tuple[int, ...], part) -> tuple:
    pos = {h: k for k, h in enumerate(hs)}
    return tuple(sorted(tuple(sorted(pos[h] for h in p)) for p in part))


def _flip_order(inst: HolantInstance, z: set[int], pairs: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Order the pairs by winding the cycles, then the path, of G_{M,z}."""
    m_edge = {}
    for a, b in pairs:
        m_edge[a] = (a, b)
        m_edge[b] = (a, b)
    link = {}
    for h in z:
        partner = h ^ 1
        if partner in z:
            link[h] = partner
    endpoints = sorted(h for h in z if h not in link)
    if len(endpoints) not in (0, 2):
        raise ValueError("disagreement graph is not a union of cycles and one path")
    order: list[tuple[int, int]] = []
    visited: set[int] = set()

    def walk(start: int) -> None:
        node = start
        while True:
            pair = m_edge[node]
            order.append(pair)
            other = pair[1] if pair[0] == node else pair[0]
            visited.update(pair)
            nxt = link.get(other)
            if nxt is None or nxt in visited:
                return
            node = nxt

    path_nodes: set[int] = set()
    if endpoints:
        # collect the path's nodes so cycles can be wound first
        node = endpoints[0]
        while True:
            pair = m_edge[node]
            path_nodes.update(pair)
            other = pair[1] if pair[0] == node else pair[0]
            if other not in link:
                break
            node = link[other]
    for start in sorted(z):
        if start in visited or start in path_nodes:
            continue
        walk(start)
    if endpoints:
        walk(endpoints[0])
    return order


def canonical_path(
    inst: HolantInstance,
    sigma: Sequence[int],
    pi: Sequence[int],
    per_vertex_pairings: Sequence,
    normalizer: Fraction | None = None,
) -> CanonicalPath:
    """Canonical path from ``sigma`` in Omega_0 to ``pi`` in Omega_0 u Omega_2.

    ``per_vertex_pairings[v]`` partitions vertex v's disagreeing half-edges
    (global ids) into pairs and at most one singleton.  Singletons are paired
    across vertices in ascending half-edge order.  Cycles of the induced
    graph are wound first, each entered through one of its pairs, and the
    open path last, so every intermediate state keeps at most two
    inconsistent edges.  ``normalizer`` is ``Z_0 + Z_2`` (computed by brute
    force when omitted).
    """
    sigma = tuple(int(b) for b in sigma)
    pi = tuple(int(b) for b in pi)
    if disagreement(inst, sigma) != 0:
        raise ValueError("sigma must be consistent")
    if disagreement(inst, pi) not in (0, 2):
        raise ValueError("pi must lie in Omega_0 u Omega_2")
    if len(per_vertex_pairings) != inst.n_vertices:
        raise ValueError("one partition per vertex")
    z = {h for h in range(inst.n_half_edges) if sigma[h] != pi[h]}
    pairs: list[tuple[int, int]] = []
    singles: list[int] = []
    B = Fraction(1)
    for v, (hs, f, part) in enumerate(zip(inst.incident, inst.functions, per_vertex_pairings)):
        zv = sorted(h for h in hs if h in z)
        covered = sorted(h for p in part for h in p)
        if covered != zv or any(len(p) not in (1, 2) for p in part):
            raise ValueError(f"invalid partition {part!r} at vertex {inst.vertex_ids[v]}")
        if sum(len(p) == 1 for p in part) > 1:
            raise ValueError(f"more than one singleton at vertex {inst.vertex_ids[v]}")
        for p in part:
            if len(p) == 2:
                pairs.append(tuple(sorted(p)))
            else:
                singles.append(p[0])
        if f.arity >= 1 and not is_windable(f).windable:
            raise ValueError(f"vertex {inst.vertex_ids[v]} function {f} is not windable")
        local = witness_B(f, [sigma[h] for h in hs], [pi[h] for h in hs])
        B *= local[_local_partition(hs, part)]
    singles.sort()
    pairs.extend((singles[k], singles[k + 1]) for k in range(0, len(singles), 2))
    order = _flip_order(inst, z, pairs)
    states = [sigma]
    cur = list(sigma)
    for a, b in order:
        cur[a] ^= 1
        cur[b] ^= 1
        states.append(tuple(cur))
    assert states[-1] == pi
    if normalizer is None:
        Z = brute_Z_all(inst)
        normalizer = Z[0] + Z.get(2, Fraction(0))
    return CanonicalPath(tuple(states), tuple(order), B / normalizer**2)

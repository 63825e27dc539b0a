"""Holant instances on graphs with half-edges.

Edge ``i`` between ``(u, v)`` owns half-edges ``2i`` (at ``u``) and ``2i+1``
(at ``v``).  An assignment is a tuple of bits over half-edges; it is
consistent at an edge when both half-edges agree.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .symfunc import SymmetricFunction, as_fraction, make_named, pin

__all__ = [
    "HolantInstance",
    "Assignment",
    "MAX_ENUM_HALF_EDGES",
    "weight",
    "disagreement",
    "brute_Z",
    "brute_Z_all",
    "pin_edge",
    "weighted_transform",
    "b_matching_instance",
    "b_edge_cover_instance",
    "find_feasible_assignment",
    "consistent_assignment",
    "bits_to_hex",
    "load_graph",
    "graph_to_json",
]

Assignment = tuple[int, ...]

MAX_ENUM_HALF_EDGES = 26
_CHUNK = 1 << 20


@dataclass(frozen=True)
class HolantInstance:
    vertex_ids: tuple
    functions: tuple[SymmetricFunction, ...]
    edges: tuple[tuple[int, int], ...]  # pairs of vertex positions, not ids

    def __post_init__(self):
        if len(self.vertex_ids) != len(self.functions):
            raise ValueError("one function per vertex")
        if len(set(self.vertex_ids)) != len(self.vertex_ids):
            raise ValueError("vertex ids must be unique")
        degree = [0] * len(self.vertex_ids)
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {self.vertex_ids[u]} is not supported")
            degree[u] += 1
            degree[v] += 1
        for vid, f, deg in zip(self.vertex_ids, self.functions, degree):
            if f.arity != deg:
                raise ValueError(f"vertex {vid} has degree {deg} but its function has arity {f.arity}")

    @classmethod
    def from_edges(cls, vertices: dict, edges: Iterable[tuple]) -> "HolantInstance":
        """``vertices`` maps id -> function; ``edges`` lists id pairs."""
        ids = tuple(vertices)
        pos = {vid: i for i, vid in enumerate(ids)}
        return cls(ids, tuple(vertices[v] for v in ids), tuple((pos[u], pos[v]) for u, v in edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_half_edges(self) -> int:
        return 2 * len(self.edges)

    @cached_property
    def half_edge_vertex(self) -> tuple[int, ...]:
        return tuple(self.edges[h // 2][h % 2] for h in range(self.n_half_edges))

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.vertex_ids]
        for h, v in enumerate(self.half_edge_vertex):
            out[v].append(h)
        return tuple(tuple(hs) for hs in out)

    def local(self, bits: Sequence[int], v: int) -> tuple[int, ...]:
        return tuple(bits[h] for h in self.incident[v])


def _check_len(inst: HolantInstance, bits: Sequence[int]) -> None:
    if len(bits) != inst.n_half_edges:
        raise ValueError(f"assignment has {len(bits)} bits, instance has {inst.n_half_edges} half-edges")


def weight(inst: HolantInstance, bits: Sequence[int]) -> Fraction:
    _check_len(inst, bits)
    w = Fraction(1)
    for f, hs in zip(inst.functions, inst.incident):
        w *= f.values[sum(bits[h] for h in hs)]
        if not w:
            break
    return w


def disagreement(inst: HolantInstance, bits: Sequence[int]) -> int:
    _check_len(inst, bits)
    return sum(bits[2 * i] != bits[2 * i + 1] for i in range(inst.n_edges))


def brute_Z_all(inst: HolantInstance) -> dict[int, Fraction]:
    """Exact ``Z_k`` for every k, enumerating all ``2^(2|E|)`` assignments.

    Assignments are tallied by (per-vertex Hamming weight, disagreement)
    with numpy, then the tallies are weighted in exact rationals.
    """
    N = inst.n_half_edges
    if N > MAX_ENUM_HALF_EDGES:
        raise ValueError(f"{N} half-edges exceeds the enumeration guard of {MAX_ENUM_HALF_EDGES}")
    masks = [sum(1 << h for h in hs) for hs in inst.incident]
    radices = [len(hs) + 1 for hs in inst.incident] + [inst.n_edges + 1]
    even_mask = sum(1 << (2 * i) for i in range(inst.n_edges))
    tally: Counter = Counter()
    total = 1 << N
    for start in range(0, total, _CHUNK):
        s = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
        key = np.zeros(s.shape, dtype=np.int64)
        for mask, radix in zip(masks, radices):
            key = key * radix + np.bitwise_count(s & np.uint64(mask)).astype(np.int64)
        d = np.bitwise_count((s ^ (s >> np.uint64(1))) & np.uint64(even_mask)).astype(np.int64)
        key = key * radices[-1] + d
        keys, counts = np.unique(key, return_counts=True)
        tally.update(dict(zip(keys.tolist(), counts.tolist())))
    Z: dict[int, Fraction] = {k: Fraction(0) for k in range(inst.n_edges + 1)}
    for key, count in tally.items():
        d = key % radices[-1]
        key //= radices[-1]
        w = Fraction(count)
        for f, radix in zip(reversed(inst.functions), reversed(radices[:-1])):
            w *= f.values[key % radix]
            key //= radix
        Z[d] += w
    return Z


def brute_Z(inst: HolantInstance, k: int) -> Fraction:
    return brute_Z_all(inst).get(k, Fraction(0))


def pin_edge(inst: HolantInstance, edge_index: int, value: int) -> HolantInstance:
    """Remove an edge, fixing both of its half-edges to ``value``."""
    if not 0 <= edge_index < inst.n_edges:
        raise IndexError(f"edge {edge_index} out of range")
    if value not in (0, 1):
        raise ValueError("edge value must be 0 or 1")
    u, v = inst.edges[edge_index]
    funcs = list(inst.functions)
    for end in (u, v):
        funcs[end] = pin(funcs[end], zeros=1 - value, ones=value)
    edges = inst.edges[:edge_index] + inst.edges[edge_index + 1 :]
    return HolantInstance(inst.vertex_ids, tuple(funcs), edges)


def weighted_transform(inst: HolantInstance, edge_weights: Sequence) -> HolantInstance:
    """Subdivide every edge with a degree-2 gadget vertex ``[1, 0, w_e]``.

    Edge ``i = (u, v)`` becomes edges ``2i = (u, g_i)`` and ``2i+1 = (g_i, v)``.
    Gadget ids are ``("edge", i)``.
    """
    ws = [as_fraction(w) for w in edge_weights]
    if len(ws) != inst.n_edges:
        raise ValueError(f"need {inst.n_edges} edge weights, got {len(ws)}")
    if any(w < 0 for w in ws):
        raise ValueError("edge weights must be nonnegative")
    n = inst.n_vertices
    ids = inst.vertex_ids + tuple(("edge", i) for i in range(inst.n_edges))
    funcs = inst.functions + tuple(make_named("edge", 2, w=w) for w in ws)
    edges = []
    for i, (u, v) in enumerate(inst.edges):
        edges.append((u, n + i))
        edges.append((n + i, v))
    return HolantInstance(ids, funcs, tuple(edges))


def _degrees(edges: Sequence[tuple], vertices: Iterable | None) -> dict:
    deg: dict = {}
    if vertices is not None:
        for v in vertices:
            deg[v] = 0
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return deg


def b_matching_instance(edges: Sequence[tuple], b: int, vertices: Iterable | None = None) -> HolantInstance:
    deg = _degrees(edges, vertices)
    return HolantInstance.from_edges({v: make_named("atmost", d, k=b) for v, d in deg.items()}, edges)


def b_edge_cover_instance(edges: Sequence[tuple], b: int, vertices: Iterable | None = None) -> HolantInstance:
    deg = _degrees(edges, vertices)
    return HolantInstance.from_edges({v: make_named("atleast", d, k=b) for v, d in deg.items()}, edges)


def consistent_assignment(edge_bits: Sequence[int]) -> Assignment:
    """Lift per-edge bits to the half-edge assignment in Omega_0."""
    return tuple(b for b in edge_bits for _ in (0, 1))


def find_feasible_assignment(inst: HolantInstance) -> Assignment | None:
    """A positive-weight consistent assignment, or None.

    Tries all-zeros and all-ones first, then scans edge subsets when the
    instance is small enough to enumerate.
    """
    N = inst.n_half_edges
    for b in (0, 1):
        bits = (b,) * N
        if weight(inst, bits) > 0:
            return bits
    if inst.n_edges > MAX_ENUM_HALF_EDGES:
        return None
    for mask in range(1 << inst.n_edges):
        bits = consistent_assignment([(mask >> i) & 1 for i in range(inst.n_edges)])
        if weight(inst, bits) > 0:
            return bits
    return None


def bits_to_hex(bits: Sequence[int]) -> str:
    """Hex of the integer whose bit ``i`` is half-edge ``i``."""
    return format(sum(b << i for i, b in enumerate(bits)), "x")


def load_graph(obj: dict, problem: str | None = None, b: int | None = None):
    """Parse graph JSON into ``(instance, edge_weights or None)``.

    With ``problem`` ("matching" or "edge-cover") and ``b`` the vertex
    functions are generated; otherwise each vertex record must carry a
    ``function``.  Function arity is checked against the vertex degree.
    """
    vertex_records = obj.get("vertices", [])
    edges = [tuple(e) for e in obj["edges"]]
    ids = [rec["id"] if isinstance(rec, dict) else rec for rec in vertex_records]
    deg = _degrees(edges, ids)
    if problem is not None:
        if b is None:
            raise ValueError("problem needs b")
        kind = {"matching": "atmost", "edge-cover": "atleast", "edgecover": "atleast"}.get(problem)
        if kind is None:
            raise ValueError(f"unknown problem {problem!r}")
        funcs = {v: make_named(kind, d, k=b) for v, d in deg.items()}
    else:
        records = {rec["id"]: rec for rec in vertex_records if isinstance(rec, dict)}
        funcs = {}
        for v, d in deg.items():
            if v not in records or "function" not in records[v]:
                raise ValueError(f"vertex {v} has no function and no problem was given")
            funcs[v] = SymmetricFunction.from_json(records[v]["function"], arity=d)
    inst = HolantInstance.from_edges(funcs, edges)
    weights = obj.get("edge_weights")
    if weights is not None:
        weights = [as_fraction(w) for w in weights]
        if len(weights) != len(edges):
            raise ValueError(f"{len(weights)} edge weights for {len(edges)} edges")
    return inst, weights


def graph_to_json(inst: HolantInstance, edge_weights: Sequence | None = None) -> dict:
    out = {
        "vertices": [
            {"id": vid, "function": f.to_json()} for vid, f in zip(inst.vertex_ids, inst.functions)
        ],
        "edges": [[inst.vertex_ids[u], inst.vertex_ids[v]] for u, v in inst.edges],
    }
    if edge_weights is not None:
        out["edge_weights"] = [str(as_fraction(w)) for w in edge_weights]
    return out

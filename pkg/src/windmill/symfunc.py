"""Symmetric functions on {0,1}^d with exact rational values.

A symmetric function only depends on the Hamming weight of its input, so
it is stored as the value list ``[f_0, f_1, ..., f_d]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "SymmetricFunction",
    "as_fraction",
    "fraction_str",
    "make_named",
    "pin",
    "complement",
    "pointwise_product",
    "h_vector",
    "NAMED_KINDS",
]

NAMED_KINDS = ("zeros", "ones", "even", "odd", "exact", "atleast", "atmost", "range", "edge")


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently carry binary rounding into
    exact certificates.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def fraction_str(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class SymmetricFunction:
    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable):
        vals = tuple(as_fraction(v) for v in values)
        if not vals:
            raise ValueError("a symmetric function needs at least one value")
        if any(v < 0 for v in vals):
            raise ValueError(f"symmetric function values must be nonnegative: {vals}")
        object.__setattr__(self, "values", vals)

    @property
    def arity(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, weight: int) -> Fraction:
        return self.values[weight]

    def __call__(self, bits: Sequence[int]) -> Fraction:
        if len(bits) != self.arity:
            raise ValueError(f"expected {self.arity} bits, got {len(bits)}")
        return self.values[sum(bits)]

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.values) + "]"

    def to_json(self) -> dict:
        return {"arity": self.arity, "values": [fraction_str(v) for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict, arity: int | None = None) -> "SymmetricFunction":
        """Parse either ``{"arity", "values"}`` or a named ``{"kind", ...}`` record.

        ``arity`` fills in a named function whose record omits it (graph files
        let the vertex degree decide).
        """
        if "values" in obj:
            f = cls(obj["values"])
            declared = obj.get("arity", arity)
            if declared is not None and int(declared) != f.arity:
                raise ValueError(f"arity {declared} does not match {len(f.values)} values")
            return f
        if "kind" not in obj:
            raise ValueError(f"function record needs 'values' or 'kind': {obj!r}")
        declared = obj.get("arity")
        if declared is None:
            declared = arity
        elif arity is not None and int(declared) != arity:
            raise ValueError(f"function arity {declared} does not match required arity {arity}")
        if declared is None:
            raise ValueError(f"named function {obj!r} needs an arity")
        return make_named(
            obj["kind"],
            int(declared),
            k=obj.get("k"),
            a=obj.get("a"),
            b=obj.get("b"),
            w=obj.get("w"),
        )


def make_named(kind: str, arity: int, *, k=None, a=None, b=None, w=None) -> SymmetricFunction:
    """Build one of the named families at the given arity.

    ``exact``/``atleast``/``atmost`` take ``k``; ``range`` takes ``a`` and ``b``;
    ``edge`` is the edge-weight gadget ``[1, 0, w]`` and always has arity 2.
    Out-of-range thresholds clamp (``atleast`` with ``k > arity`` is all zeros).
    """
    kind = kind.lower().replace("_", "").replace("-", "")
    if arity < 0:
        raise ValueError(f"arity must be nonnegative, got {arity}")
    if kind == "edge" or kind == "edgegadget":
        if arity != 2:
            raise ValueError("the edge gadget has arity 2")
        weight = as_fraction(w if w is not None else 1)
        if weight < 0:
            raise ValueError(f"edge weight must be nonnegative, got {weight}")
        return SymmetricFunction([1, 0, weight])
    if kind in ("exact", "atleast", "atmost") and k is None:
        raise ValueError(f"{kind} needs k")
    if k is not None:
        k = int(k)
        if k < 0:
            raise ValueError(f"k must be nonnegative, got {k}")
    weights = range(arity + 1)
    if kind == "zeros":
        vals = [0 for _ in weights]
    elif kind == "ones":
        vals = [1 for _ in weights]
    elif kind == "even":
        vals = [1 - i % 2 for i in weights]
    elif kind == "odd":
        vals = [i % 2 for i in weights]
    elif kind == "exact":
        vals = [int(i == k) for i in weights]
    elif kind == "atleast":
        vals = [int(i >= k) for i in weights]
    elif kind == "atmost":
        vals = [int(i <= k) for i in weights]
    elif kind == "range":
        if a is None or b is None:
            raise ValueError("range needs a and b")
        vals = [int(int(a) <= i <= int(b)) for i in weights]
    else:
        raise ValueError(f"unknown function kind {kind!r}")
    return SymmetricFunction(vals)


def pin(f: SymmetricFunction, zeros: int, ones: int) -> SymmetricFunction:
    """Fix ``zeros`` inputs to 0 and ``ones`` inputs to 1."""
    if zeros < 0 or ones < 0:
        raise ValueError("pinning counts must be nonnegative")
    if zeros + ones > f.arity:
        raise ValueError(f"cannot pin {zeros + ones} inputs of an arity-{f.arity} function")
    return SymmetricFunction(f.values[ones : f.arity - zeros + 1])


def complement(f: SymmetricFunction) -> SymmetricFunction:
    return SymmetricFunction(reversed(f.values))


def pointwise_product(f: SymmetricFunction, g: SymmetricFunction) -> SymmetricFunction:
    if f.arity != g.arity:
        raise ValueError(f"arity mismatch: {f.arity} vs {g.arity}")
    return SymmetricFunction(x * y for x, y in zip(f.values, g.values))


def h_vector(g: SymmetricFunction) -> tuple[Fraction, ...]:
    """Prefix ``[h_0 .. h_{m//2}]`` of ``H(x) = g(x) g(~x)``."""
    m = g.arity
    if m < 1:
        raise ValueError("h_vector needs arity >= 1")
    H = pointwise_product(g, complement(g)).values
    assert all(H[i] == H[m - i] for i in range(m + 1))
    return H[: m // 2 + 1]

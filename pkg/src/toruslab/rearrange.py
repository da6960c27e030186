"""Finitely described permutations of the integers and nested exhaustions.

A permutation is stored as a finite support table plus an identity tail:
this is enough for every desk-scale experiment, since any finite family of
polynomials only ever sees finitely many frequencies, and permutations that
agree off a finite set act identically on them.  Constructors verify
bijectivity exhaustively over the support, so an invalid table can never
circulate.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Sequence

from .summation import FreqSet
from .trig import TrigPoly

__all__ = [
    "Permutation",
    "Exhaustion",
    "swap",
    "cycle",
    "random_permutation",
    "greedy_order",
    "block_permutation",
    "box_exhaustion",
    "ball_exhaustion",
    "custom_exhaustion",
]


class Permutation:
    """Bijection of the integers equal to the identity off a finite set."""

    __slots__ = ("_map",)

    def __init__(self, support_map: dict | Iterable = ()):
        items = (
            list(support_map.items())
            if hasattr(support_map, "items")
            else list(support_map)
        )
        table = {}
        for k, v in items:
            k, v = int(k), int(v)
            if k in table:
                raise ValueError(f"duplicate source {k}")
            if k != v:
                table[k] = v
        values = list(table.values())
        if len(set(values)) != len(values):
            raise ValueError("support map is not injective")
        if set(values) != set(table):
            raise ValueError("support map does not permute its own support")
        self._map = table

    @classmethod
    def identity(cls) -> "Permutation":
        return cls()

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self._map)

    def apply(self, n: int) -> int:
        return self._map.get(int(n), int(n))

    def __call__(self, n: int) -> int:
        return self.apply(n)

    def image(self, ns: Iterable[int]) -> frozenset[int]:
        return frozenset(self.apply(n) for n in ns)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self . other)(n) = self(other(n))."""
        keys = self.support | other.support
        return Permutation({k: self.apply(other.apply(k)) for k in keys})

    def invert(self) -> "Permutation":
        return Permutation({v: k for k, v in self._map.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._map == other._map

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        return f"Permutation(support={len(self._map)})"

    def to_json_dict(self) -> dict:
        return {"map": [[k, v] for k, v in sorted(self._map.items())]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Permutation":
        return cls({int(k): int(v) for k, v in data["map"]})

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Permutation":
        return cls.from_json_dict(json.loads(text))


def swap(a: int, b: int) -> Permutation:
    return Permutation({a: b, b: a})


def cycle(*ns: int) -> Permutation:
    """Cyclic permutation n0 -> n1 -> ... -> n0."""
    if len(set(ns)) != len(ns):
        raise ValueError("cycle entries must be distinct")
    return Permutation({ns[i]: ns[(i + 1) % len(ns)] for i in range(len(ns))})


def random_permutation(points: Sequence[int], rng) -> Permutation:
    """Uniformly random permutation of the given integers (identity elsewhere)."""
    pts = [int(p) for p in points]
    shuffled = list(pts)
    rng.shuffle(shuffled)
    return Permutation(dict(zip(pts, shuffled)))


def greedy_order(f: TrigPoly, count: int) -> list[int]:
    """First ``count`` frequencies of f by decreasing coefficient magnitude.

    Ties break by |n| ascending, then n ascending, so runs are reproducible;
    the ordering within a tie is a convention, nothing deeper.
    """
    if f.dim != 1:
        raise ValueError("greedy_order requires dim = 1")
    if count > len(f):
        raise ValueError(f"requested {count} frequencies but support has {len(f)}")
    ranked = sorted(f.coeffs.items(), key=lambda kv: (-abs(kv[1]), abs(kv[0][0]), kv[0][0]))
    return [n for (n,), _ in ranked[:count]]


def block_permutation(
    outer: Permutation,
    breakpoints: Sequence[int],
    inner: Sequence[Permutation],
) -> Permutation:
    """Compose block-local permutations with an outer rearrangement.

    Blocks are the integer intervals (N_k, N_{k+1}] cut by the strictly
    increasing breakpoints.  On block k the result sends j to
    inner[k](outer(j)); off all blocks it is the identity.  Each inner
    permutation must map the outer image of its block onto itself, otherwise
    the pieces cannot glue into a bijection.
    """
    pts = [int(b) for b in breakpoints]
    if any(a >= b for a, b in zip(pts, pts[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    if len(inner) != len(pts) - 1:
        raise ValueError(f"{len(pts) - 1} blocks but {len(inner)} inner permutations")
    table: dict[int, int] = {}
    for k, sigma_k in enumerate(inner):
        block = range(pts[k] + 1, pts[k + 1] + 1)
        image = {outer.apply(j) for j in block}
        if sigma_k.image(image) != frozenset(image):
            raise ValueError(f"inner permutation {k} does not stabilize its block image")
        for j in block:
            table[j] = sigma_k.apply(outer.apply(j))
    return Permutation(table)


class Exhaustion:
    """Strictly nested finite frequency sets J_1 subset J_2 subset ...

    A finite stand-in for an exhaustion of Z^d: unions over the blocks grow
    monotonically, which is what every convergence probe sweeps along.
    """

    __slots__ = ("dim", "blocks")

    def __init__(self, blocks: Sequence[FreqSet]):
        blocks = list(blocks)
        if not blocks:
            raise ValueError("an exhaustion needs at least one block")
        dim = blocks[0].dim
        for a, b in zip(blocks, blocks[1:]):
            if b.dim != dim:
                raise ValueError("blocks must share a dimension")
            if not (a.elements < b.elements):
                raise ValueError("blocks must be strictly nested")
        self.dim = dim
        self.blocks = tuple(blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, k: int) -> FreqSet:
        return self.blocks[k]

    def to_json_dict(self) -> list:
        return [b.to_json_dict() for b in self.blocks]

    @classmethod
    def from_json_dict(cls, data: list) -> "Exhaustion":
        return cls([FreqSet.from_json_dict(b) for b in data])


def box_exhaustion(dim: int, k_max: int) -> Exhaustion:
    """Cubes {-k..k}^dim for k = 0..k_max."""
    blocks = []
    for k in range(k_max + 1):
        rng = range(-k, k + 1)
        blocks.append(FreqSet(itertools.product(rng, repeat=dim), dim=dim))
    return Exhaustion(blocks)


def ball_exhaustion(dim: int, k_max: int) -> Exhaustion:
    """Euclidean balls of radius k = 0..k_max (deduplicated to keep nesting strict)."""
    blocks = []
    prev = None
    for k in range(k_max + 1):
        rng = range(-k, k + 1)
        ball = frozenset(
            n for n in itertools.product(rng, repeat=dim) if sum(c * c for c in n) <= k * k
        )
        if ball != prev:
            blocks.append(FreqSet(ball, dim=dim))
            prev = ball
    return Exhaustion(blocks)


def custom_exhaustion(blocks: Sequence[FreqSet]) -> Exhaustion:
    """Validate and wrap a user-supplied nested family."""
    return Exhaustion(blocks)

"""Partial-sum operators and classical summability kernels.

The primitive is the set-indexed partial sum: restrict a polynomial's
coefficients to a finite frequency set J.  Symmetric sums over |n| <= N and
rearranged sums over sigma({-N..N}) are thin views of that primitive, so a
single code path carries the correctness burden.  Sign-flip operators
multiply coefficients by +/-1 on a chosen index set.

Also here: the one-sided Dirichlet kernel, the Fejer kernel, Fejer means,
and the delayed de la Vallee Poussin mean 2*sigma_{2N+1} - sigma_N, which
reproduces polynomials of degree <= N+1 exactly.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable

from .trig import TrigPoly, as_frequency

__all__ = [
    "FreqSet",
    "SignSequence",
    "partial_sum",
    "symmetric_partial_sum",
    "symmetric_box",
    "rearranged_partial_sum",
    "sign_flip_sum",
    "dirichlet_one_sided",
    "fejer",
    "fejer_mean",
    "vallee_poussin_mean",
]


class FreqSet:
    """A finite set of d-dimensional integer frequencies."""

    __slots__ = ("dim", "elements")

    def __init__(self, elements: Iterable, dim: int | None = None):
        items = list(elements)
        if dim is None:
            if not items:
                raise ValueError("dim is required for an empty frequency set")
            first = items[0]
            dim = 1 if isinstance(first, int) else len(first)
        self.dim = int(dim)
        self.elements = frozenset(as_frequency(n, self.dim) for n in items)

    def __contains__(self, n) -> bool:
        return as_frequency(n, self.dim) in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreqSet):
            return NotImplemented
        return self.dim == other.dim and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.dim, self.elements))

    def __le__(self, other: "FreqSet") -> bool:
        return self.elements <= other.elements

    def __repr__(self) -> str:
        return f"FreqSet(dim={self.dim}, size={len(self.elements)})"

    def union(self, other: "FreqSet") -> "FreqSet":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return FreqSet(self.elements | other.elements, dim=self.dim)

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "elements": [list(n) for n in sorted(self.elements)]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "FreqSet":
        return cls([tuple(n) for n in data["elements"]], dim=int(data["dim"]))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "FreqSet":
        return cls.from_json_dict(json.loads(text))


class SignSequence:
    """Map from frequencies to {-1, +1}, defaulting to +1 off its table."""

    __slots__ = ("dim", "_signs")

    def __init__(self, signs=(), dim: int | None = None):
        items = list(signs.items()) if hasattr(signs, "items") else list(signs)
        if dim is None:
            if not items:
                raise ValueError("dim is required for an empty sign sequence")
            first = items[0][0]
            dim = 1 if isinstance(first, int) else len(first)
        self.dim = int(dim)
        table: dict[tuple[int, ...], int] = {}
        for key, value in items:
            v = int(value)
            if v not in (-1, 1):
                raise ValueError(f"sign at {key!r} must be -1 or +1, got {value!r}")
            table[as_frequency(key, self.dim)] = v
        self._signs = table

    @classmethod
    def from_list(cls, values: Iterable[int], start: int = 0) -> "SignSequence":
        """1-d sequence assigning values to consecutive integers from start."""
        return cls({start + i: v for i, v in enumerate(values)}, dim=1)

    def __call__(self, n) -> int:
        return self._signs.get(as_frequency(n, self.dim), 1)

    def __len__(self) -> int:
        return len(self._signs)

    @property
    def table(self) -> dict[tuple[int, ...], int]:
        return dict(self._signs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignSequence):
            return NotImplemented
        return self.dim == other.dim and self._signs == other._signs

    __hash__ = None

    def as_vector(self, n_max: int) -> list[int]:
        """1-d signs on {0..n_max} as a plain list."""
        if self.dim != 1:
            raise ValueError("as_vector requires dim = 1")
        return [self((i,)) for i in range(n_max + 1)]

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "signs": [{"n": list(n), "sign": s} for n, s in sorted(self._signs.items())],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SignSequence":
        return cls(
            {tuple(e["n"]): e["sign"] for e in data["signs"]}, dim=int(data["dim"])
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SignSequence":
        return cls.from_json_dict(json.loads(text))


def partial_sum(f: TrigPoly, J: FreqSet) -> TrigPoly:
    """Restrict the coefficients of f to the frequency set J."""
    if f.dim != J.dim:
        raise ValueError(f"dimension mismatch: polynomial {f.dim}, set {J.dim}")
    return f.restrict(J.elements)


def symmetric_box(N: int, dim: int = 1) -> FreqSet:
    """The cube of frequencies with max_i |n_i| <= N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if dim == 1:
        return FreqSet(range(-N, N + 1), dim=1)
    return FreqSet(itertools.product(range(-N, N + 1), repeat=dim), dim=dim)


def symmetric_partial_sum(f: TrigPoly, N: int) -> TrigPoly:
    """Classical partial sum over |n| <= N (dim 1; use partial_sum with a box otherwise)."""
    if f.dim != 1:
        raise ValueError("symmetric_partial_sum requires dim = 1; use partial_sum with symmetric_box")
    return partial_sum(f, symmetric_box(N, dim=1))


def rearranged_partial_sum(f: TrigPoly, sigma, N: int) -> TrigPoly:
    """Partial sum over the rearranged index set sigma({-N..N})."""
    if f.dim != 1:
        raise ValueError("rearranged_partial_sum requires dim = 1")
    image = FreqSet([sigma.apply(n) for n in range(-N, N + 1)], dim=1)
    return partial_sum(f, image)


def sign_flip_sum(f: TrigPoly, signs: SignSequence, J: FreqSet) -> TrigPoly:
    """Coefficients epsilon_n * c_n on J, zero off J."""
    if f.dim != J.dim or f.dim != signs.dim:
        raise ValueError("dimension mismatch between polynomial, signs, and index set")
    out = {}
    for n, c in f.coeffs.items():
        if n in J.elements:
            out[n] = signs(n) * c
    return TrigPoly(out, dim=f.dim)


def dirichlet_one_sided(N: int) -> TrigPoly:
    """sum_{n=0}^{N} e_n; its modulus is |sin(pi(N+1)t) / sin(pi t)|."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return TrigPoly({n: 1.0 for n in range(N + 1)}, dim=1)


def fejer(N: int) -> TrigPoly:
    """Fejer kernel of order N: coefficients 1 - |n|/(N+1) on |n| <= N."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return TrigPoly({n: 1.0 - abs(n) / (N + 1) for n in range(-N, N + 1)}, dim=1)


def fejer_mean(f: TrigPoly, N: int) -> TrigPoly:
    """Fejer mean: multiply f's coefficients by the order-N Fejer weights."""
    if f.dim != 1:
        raise ValueError("fejer_mean requires dim = 1")
    if N < 0:
        raise ValueError("N must be >= 0")
    out = {}
    for (n,), c in f.coeffs.items():
        if abs(n) <= N:
            out[n] = (1.0 - abs(n) / (N + 1)) * c
    return TrigPoly(out, dim=1)


def vallee_poussin_mean(f: TrigPoly, N: int) -> TrigPoly:
    """Delayed mean 2*sigma_{2N+1}[f] - sigma_N[f].

    Reproduces f exactly when degree(f) <= N + 1: the weights telescope to 1
    there, which is precisely the property uniform-approximation arguments
    lean on.
    """
    if f.dim != 1:
        raise ValueError("vallee_poussin_mean requires dim = 1")
    return fejer_mean(f, 2 * N + 1).scale(2.0) - fejer_mean(f, N)

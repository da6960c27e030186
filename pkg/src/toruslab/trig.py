"""Sparse multivariate trigonometric polynomials on the torus.

Functions on the d-torus are identified with [0,1)^d with wraparound; a
polynomial is a finitely supported map from integer frequency vectors to
complex coefficients, representing sum_n c_n exp(2*pi*i*<n,t>).  This module
provides construction, evaluation, transforms between coefficient space and
equispaced sample space, and the norms everything downstream relies on:
exact Parseval L2, quadrature L1/L4, the absolute-coefficient (Wiener) norm,
and a certified two-sided sup-norm estimate.

All values are immutable after construction and all operations are pure, so
everything here is safe to share across threads.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .errors import ResolutionError

__all__ = [
    "TrigPoly",
    "TorusGrid",
    "NormCertificate",
    "as_frequency",
    "coeffs_from_grid",
]

# Below this many coefficient-times-gridpoint pairs direct summation is
# cheaper than allocating and transforming a zero-padded spectrum.
FFT_CROSSOVER = 1 << 16


def as_frequency(n, dim: int) -> tuple[int, ...]:
    """Canonicalize a frequency key to a length-``dim`` tuple of ints.

    Bare integers are accepted for dim=1.
    """
    if isinstance(n, (int, np.integer)):
        tup = (int(n),)
    else:
        tup = tuple(int(k) for k in n)
    if len(tup) != dim:
        raise ValueError(f"frequency {n!r} has dimension {len(tup)}, expected {dim}")
    return tup


@dataclass(frozen=True)
class NormCertificate:
    """Two-sided enclosure of a sup norm.

    ``lower`` is the maximum of |p| over an equispaced grid, ``upper`` the
    certified bound lower / prod_i cos(pi * deg_i / M); the true sup norm
    lies in [lower, upper].  ``oversampling`` records the ratio M / degree
    used (inf for constant polynomials).
    """

    lower: float
    upper: float
    oversampling: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"invalid certificate [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


class TorusGrid:
    """Equispaced complex samples on [0,1)^d, M points per axis.

    Sample (j1,...,jd) is the value at (j1/M, ..., jd/M); the array is
    stored in row-major order and frozen after construction.
    """

    __slots__ = ("dim", "points_per_axis", "samples")

    def __init__(self, dim: int, points_per_axis: int, samples):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        M = int(points_per_axis)
        if M < 1:
            raise ValueError("points_per_axis must be >= 1")
        arr = np.ascontiguousarray(samples, dtype=complex)
        if arr.shape != (M,) * dim:
            arr = arr.reshape((M,) * dim)
        arr.flags.writeable = False
        self.dim = dim
        self.points_per_axis = M
        self.samples = arr

    def point(self, index: tuple[int, ...]) -> tuple[float, ...]:
        """Coordinates of the grid node with the given index."""
        M = self.points_per_axis
        return tuple((i % M) / M for i in index)

    def quadrature_lp(self, exponent: float) -> float:
        """(integral of |g|^q)^(1/q) by the equispaced product rule."""
        mag = np.abs(self.samples)
        return float(np.mean(mag**exponent) ** (1.0 / exponent))


class TrigPoly:
    """Finitely supported Fourier series sum_n c_n exp(2*pi*i*<n,t>).

    Keys are d-tuples of integers (bare ints accepted when d=1); exact-zero
    coefficients are never stored, so the support is always honest.  No
    epsilon pruning happens anywhere: arithmetic is exact on the sparse
    representation and norms report what the coefficients actually are.
    """

    __slots__ = ("dim", "_coeffs")

    def __init__(self, coeffs: Mapping | Iterable = (), dim: int | None = None):
        items = list(coeffs.items()) if isinstance(coeffs, Mapping) else list(coeffs)
        if dim is None:
            if not items:
                raise ValueError("dim is required for an empty polynomial")
            first = items[0][0]
            dim = 1 if isinstance(first, (int, np.integer)) else len(first)
        if dim < 1:
            raise ValueError("dim must be >= 1")
        table: dict[tuple[int, ...], complex] = {}
        for key, value in items:
            n = as_frequency(key, dim)
            c = complex(value)
            if n in table:
                raise ValueError(f"duplicate frequency {n}")
            if c != 0:
                table[n] = c
        self.dim = dim
        self._coeffs = table

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, dim: int = 1) -> "TrigPoly":
        return cls((), dim=dim)

    @classmethod
    def exponential(cls, n, dim: int = 1, coefficient: complex = 1.0) -> "TrigPoly":
        """The single mode coefficient * e_n."""
        return cls({as_frequency(n, dim): coefficient}, dim=dim)

    # -- basic structure -------------------------------------------------------

    @property
    def coeffs(self) -> dict[tuple[int, ...], complex]:
        return dict(self._coeffs)

    @property
    def support(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, n) -> complex:
        return self._coeffs.get(as_frequency(n, self.dim), 0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.dim == other.dim and self._coeffs == other._coeffs

    __hash__ = None

    def __repr__(self) -> str:
        return f"TrigPoly(dim={self.dim}, support={len(self._coeffs)}, degree={self.degree})"

    @property
    def degree(self) -> int:
        """max over the support of max_i |n_i|; 0 for the zero polynomial."""
        if not self._coeffs:
            return 0
        return max(max(abs(c) for c in n) for n in self._coeffs)

    def axis_degree(self, axis: int) -> int:
        if not self._coeffs:
            return 0
        return max(abs(n[axis]) for n in self._coeffs)

    # -- evaluation and transforms ---------------------------------------------

    def evaluate(self, t) -> complex:
        """Value at a point of [0,1)^d by direct summation.

        The result is 1-periodic in every coordinate.  At t = 0 the returned
        value is the exact floating-point sum of the coefficients in storage
        order (every phase factor is exactly 1).
        """
        if isinstance(t, (int, float, np.floating, np.integer)):
            point = np.array([float(t)])
        else:
            point = np.asarray(t, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point {t!r} does not have dimension {self.dim}")
        total = 0j
        for n, c in self._coeffs.items():
            total += c * complex(np.exp(2j * math.pi * float(np.dot(n, point))))
        return total

    def to_grid(self, points_per_axis: int) -> TorusGrid:
        """Sample on the equispaced M-per-axis grid.

        Requires M >= 2*degree + 1 so the band is alias-free.  Small
        problems are summed directly; larger ones go through a zero-padded
        inverse FFT (both are exact for band-limited input up to rounding).
        """
        M = int(points_per_axis)
        deg = self.degree
        if M < 2 * deg + 1:
            raise ResolutionError(
                f"grid with {M} points per axis aliases degree {deg}; need M >= {2 * deg + 1}"
            )
        d = self.dim
        if len(self._coeffs) * M**d < FFT_CROSSOVER:
            t = np.arange(M) / M
            samples = np.zeros((M,) * d, dtype=complex)
            for n, c in self._coeffs.items():
                axes = [np.exp(2j * math.pi * ni * t) for ni in n]
                samples += c * reduce(np.multiply.outer, axes)
        else:
            spectrum = np.zeros((M,) * d, dtype=complex)
            for n, c in self._coeffs.items():
                spectrum[tuple(ni % M for ni in n)] = c
            samples = np.fft.ifftn(spectrum) * float(M**d)
        return TorusGrid(d, M, samples)

    # -- norms -----------------------------------------------------------------

    def norm_l2(self) -> float:
        """Exact Parseval norm sqrt(sum |c_n|^2)."""
        return math.sqrt(sum(abs(c) ** 2 for c in self._coeffs.values()))

    def wiener_norm(self) -> float:
        """Absolute-coefficient norm sum |c_n|."""
        return float(sum(abs(c) for c in self._coeffs.values()))

    def norm_lp(self, exponent: int, points_per_axis: int) -> float:
        """Quadrature L_q norm on the M-grid, q in {1, 2, 4}.

        |p|^4 is itself a trigonometric polynomial of degree 4*deg, so the
        product trapezoid rule is exact for q in {2, 4} at the enforced
        oversampling floor; q = 1 is an honest quadrature approximation at
        the same floor.
        """
        q = int(exponent)
        if q not in (1, 2, 4):
            raise ValueError(f"unsupported exponent {exponent}; use 1, 2 or 4")
        deg = self.degree
        floor = 4 * deg + 4 if q == 2 else 8 * deg + 8
        M = int(points_per_axis)
        if M < floor:
            raise ResolutionError(f"L{q} quadrature of degree {deg} needs M >= {floor}, got {M}")
        return self.to_grid(M).quadrature_lp(q)

    def sup_norm(self, points_per_axis: int) -> NormCertificate:
        """Certified enclosure of the sup norm from an equispaced grid.

        The grid maximum is a lower bound; dividing by
        prod_i cos(pi * deg_i / M) certifies an upper bound (the classical
        oversampled-grid estimate, applied one axis at a time).  Requires
        M > 2*degree.
        """
        M = int(points_per_axis)
        deg = self.degree
        if M <= 2 * deg:
            raise ResolutionError(f"sup-norm certificate needs M > {2 * deg}, got {M}")
        lower = float(np.max(np.abs(self.to_grid(M).samples)))
        factor = 1.0
        for axis in range(self.dim):
            factor *= math.cos(math.pi * self.axis_degree(axis) / M)
        oversampling = M / deg if deg > 0 else math.inf
        return NormCertificate(lower=lower, upper=lower / factor, oversampling=oversampling)

    # -- algebra ----------------------------------------------------------------

    def _require_same_dim(self, other: "TrigPoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._require_same_dim(other)
        out = dict(self._coeffs)
        for n, c in other._coeffs.items():
            out[n] = out.get(n, 0j) + c
        return TrigPoly(out, dim=self.dim)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + other.scale(-1.0)

    def scale(self, factor: complex) -> "TrigPoly":
        a = complex(factor)
        return TrigPoly({n: a * c for n, c in self._coeffs.items()}, dim=self.dim)

    def __rmul__(self, factor):
        if isinstance(factor, TrigPoly):
            return NotImplemented
        return self.scale(factor)

    def __mul__(self, other):
        """Pointwise product; on coefficients this is exact sparse convolution."""
        if not isinstance(other, TrigPoly):
            return self.scale(other)
        self._require_same_dim(other)
        out: dict[tuple[int, ...], complex] = {}
        for n1, c1 in self._coeffs.items():
            for n2, c2 in other._coeffs.items():
                key = tuple(a + b for a, b in zip(n1, n2))
                out[key] = out.get(key, 0j) + c1 * c2
        return TrigPoly(out, dim=self.dim)

    def conjugate(self) -> "TrigPoly":
        """Complex conjugate: coefficient at n becomes conj(c_{-n})."""
        return TrigPoly(
            {tuple(-k for k in n): c.conjugate() for n, c in self._coeffs.items()},
            dim=self.dim,
        )

    def tensor(self, other: "TrigPoly") -> "TrigPoly":
        """Tensor product: dims add, coefficient at (m, n) is c_p(m)*c_q(n)."""
        out = {
            m + n: cp * cq
            for m, cp in self._coeffs.items()
            for n, cq in other._coeffs.items()
        }
        return TrigPoly(out, dim=self.dim + other.dim)

    def dilate(self, k: int) -> "TrigPoly":
        """Frequency dilation n -> k*n, i.e. t -> p(k*t)."""
        k = int(k)
        if k == 0:
            raise ValueError("dilation factor must be nonzero")
        return TrigPoly(
            {tuple(k * c for c in n): v for n, v in self._coeffs.items()}, dim=self.dim
        )

    def restrict(self, frequencies) -> "TrigPoly":
        """Keep only the coefficients whose frequency lies in the given set."""
        keep = {as_frequency(n, self.dim) for n in frequencies}
        return TrigPoly(
            {n: c for n, c in self._coeffs.items() if n in keep}, dim=self.dim
        )

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        items = sorted(self._coeffs.items())
        return {
            "dim": self.dim,
            "coeffs": [{"n": list(n), "re": c.real, "im": c.imag} for n, c in items],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TrigPoly":
        dim = int(data["dim"])
        coeffs = {
            tuple(int(k) for k in entry["n"]): complex(entry["re"], entry["im"])
            for entry in data["coeffs"]
        }
        return cls(coeffs, dim=dim)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "TrigPoly":
        return cls.from_json_dict(json.loads(text))


def coeffs_from_grid(grid: TorusGrid, band: int) -> TrigPoly:
    """Fourier coefficients for max_i |n_i| <= band by discrete quadrature.

    This is the equispaced quadrature of the defining coefficient integral;
    it is exact (to rounding) whenever the grid sampled a polynomial of
    degree <= band.  Requires points_per_axis >= 2*band + 1.
    """
    N = int(band)
    if N < 0:
        raise ValueError("band must be >= 0")
    M = grid.points_per_axis
    if M < 2 * N + 1:
        raise ResolutionError(f"band {N} needs at least {2 * N + 1} points per axis, got {M}")
    spectrum = np.fft.fftn(np.asarray(grid.samples)) / float(M**grid.dim)
    idx = np.arange(-N, N + 1) % M
    sub = spectrum[np.ix_(*([idx] * grid.dim))]
    coeffs: dict[tuple[int, ...], complex] = {}
    for offsets in itertools.product(range(2 * N + 1), repeat=grid.dim):
        c = complex(sub[offsets])
        if c != 0:
            coeffs[tuple(o - N for o in offsets)] = c
    return TrigPoly(coeffs, dim=grid.dim)

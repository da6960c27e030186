"""Explicit restricted-norm lower bounds and the nonnegative-coefficient gate.

The centerpiece construction normalizes a +/-1 sign polynomial on {0..N} by
C0*sqrt(N+1), so its sup norm is controlled, then unflips the signs: the
flipped series is a one-sided Dirichlet kernel whose mass concentrates in a
window around 0.  Restricting to a set E with positive density at the
origin and integrating yields an explicit, parameter-free lower bound on
the restricted L2 norm; this module executes that construction, in one to
three dimensions via tensor powers, and checks the computed norm against
the closed-form bound.

Sets E are finite unions of axis-aligned boxes in centered torus
coordinates [-1/2, 1/2)^d, which keeps every measure computation exact
interval arithmetic rather than sampling.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, ResolutionError
from .flat import rudin_shapiro_vector
from .summation import SignSequence, symmetric_partial_sum
from .trig import TrigPoly

__all__ = [
    "BoxUnion",
    "BoundReport",
    "WienerGateReport",
    "density_window",
    "thm59_construct",
    "thm59_verify",
    "tensor_verify",
    "corollary512_sweep",
    "sweep_constant",
    "wiener_gate",
    "restricted_l2_gauss",
    "restricted_l2_spectral",
]

DEFAULT_GAMMA0 = 1e-6
DEFAULT_C0 = math.sqrt(2.0)
DEFAULT_DELTA = 1.0 / 3.0
MARGIN_SLACK = 1e-9
TWO_ROUTE_TOLERANCE = 1e-8

# Fixed constant from the uniform corollary: one fifth of the delta=1/3,
# C0=sqrt(2) bound 2*sqrt(2)/(3*sqrt(3*pi)).
def sweep_constant() -> float:
    return 2.0 * math.sqrt(2.0) / (15.0 * math.sqrt(3.0 * math.pi))


class BoxUnion:
    """Finite union of closed axis-aligned boxes inside [-1/2, 1/2)^d.

    Boxes must be pairwise disjoint up to measure zero and carry positive
    total measure.
    """

    __slots__ = ("dim", "boxes")

    def __init__(self, boxes, dim: int | None = None):
        parsed = []
        for lo, hi in boxes:
            lo = tuple(float(x) for x in (lo if hasattr(lo, "__len__") else (lo,)))
            hi = tuple(float(x) for x in (hi if hasattr(hi, "__len__") else (hi,)))
            if len(lo) != len(hi):
                raise ValueError("box corners must share a dimension")
            parsed.append((lo, hi))
        if dim is None:
            if not parsed:
                raise ValueError("dim is required for an empty box list")
            dim = len(parsed[0][0])
        self.dim = int(dim)
        for lo, hi in parsed:
            if len(lo) != self.dim:
                raise ValueError("box dimension mismatch")
            for a, b in zip(lo, hi):
                if not (a < b):
                    raise ValueError(f"degenerate box [{a}, {b}]")
                if a < -0.5 or b > 0.5:
                    raise ValueError("boxes must lie inside [-1/2, 1/2]^d")
        for i, (lo1, hi1) in enumerate(parsed):
            for lo2, hi2 in parsed[i + 1 :]:
                if all(min(h1, h2) - max(l1, l2) > 0 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2)):
                    raise ValueError("boxes overlap on a set of positive measure")
        if not parsed:
            raise ValueError("a box union must contain at least one box")
        self.boxes = tuple(parsed)

    @classmethod
    def interval(cls, lo: float, hi: float) -> "BoxUnion":
        return cls([((lo,), (hi,))], dim=1)

    @classmethod
    def cube(cls, half_width: float, dim: int) -> "BoxUnion":
        return cls([((-half_width,) * dim, (half_width,) * dim)], dim=dim)

    def measure(self) -> float:
        return float(
            sum(math.prod(b - a for a, b in zip(lo, hi)) for lo, hi in self.boxes)
        )

    def window_measure(self, gamma: float) -> float:
        """Exact measure of the intersection with the cube [-gamma, gamma]^d."""
        total = 0.0
        for lo, hi in self.boxes:
            piece = 1.0
            for a, b in zip(lo, hi):
                piece *= max(0.0, min(b, gamma) - max(a, -gamma))
                if piece == 0.0:
                    break
            total += piece
        return total

    def origin_interior(self) -> bool:
        return any(all(a < 0.0 < b for a, b in zip(lo, hi)) for lo, hi in self.boxes)

    def origin_half_width(self) -> float:
        """Largest w with [-w, w]^d inside a single box of the union."""
        best = 0.0
        for lo, hi in self.boxes:
            if all(a < 0.0 < b for a, b in zip(lo, hi)):
                best = max(best, min(min(-a, b) for a, b in zip(lo, hi)))
        return best

    def min_box_width(self) -> float:
        return min(b - a for lo, hi in self.boxes for a, b in zip(lo, hi))

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "boxes": [{"lo": list(lo), "hi": list(hi)} for lo, hi in self.boxes],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BoxUnion":
        return cls(
            [(tuple(b["lo"]), tuple(b["hi"])) for b in data["boxes"]],
            dim=int(data["dim"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "BoxUnion":
        return cls.from_json_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"BoxUnion(dim={self.dim}, boxes={len(self.boxes)}, measure={self.measure():.6g})"


def density_window(E: BoxUnion, gamma0: float, max_points: int = 1 << 19) -> float:
    """Largest validated dyadic window radius for the origin-density inequality.

    Scans gamma over a dyadic grid fine enough to resolve the box around the
    origin and returns the last grid value gamma_1 such that
    |E cap [-g, g]^d| >= (2g)^d (1 - gamma0)^2 held at every tested g below
    it.  Exact interval arithmetic on the boxes, no sampling.
    """
    if not (0.0 < gamma0 < 1.0):
        raise ValueError("gamma0 must lie in (0, 1)")
    if not E.origin_interior():
        raise ValueError("0 must be an interior point of some box of E (translate E first)")
    w0 = E.origin_half_width()
    depth = max(13, math.ceil(math.log2(1.0 / w0)) + 3)
    count = min(1 << (depth - 1), max_points)
    gammas = np.arange(1, count + 1) / float(1 << depth)
    shrink = (1.0 - gamma0) ** 2
    measures = np.zeros_like(gammas)
    for lo, hi in E.boxes:
        piece = np.ones_like(gammas)
        for a, b in zip(lo, hi):
            piece *= np.clip(np.minimum(b, gammas) - np.maximum(a, -gammas), 0.0, None)
        measures += piece
    ok = measures >= (2.0 * gammas) ** E.dim * shrink - 1e-15
    if not ok[0]:
        raise InvariantError("density window failed at the finest tested scale")
    bad = np.flatnonzero(~ok)
    last = int(bad[0]) - 1 if bad.size else count - 1
    return float(gammas[last])


@dataclass(frozen=True)
class BoundReport:
    """Result of one restricted-norm lower-bound verification."""

    dim: int
    E: BoxUnion
    delta: float
    gamma0: float
    N: int
    C0_used: float
    computed_norm: float
    theoretical_bound: float
    margin: float
    passed: bool

    def __post_init__(self):
        values = (
            self.delta,
            self.gamma0,
            self.C0_used,
            self.computed_norm,
            self.theoretical_bound,
            self.margin,
        )
        if not all(math.isfinite(v) for v in values):
            raise InvariantError("bound report contains non-finite values")
        if self.theoretical_bound <= 0.0:
            raise InvariantError("theoretical bound must be positive")

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "dim": self.dim,
            "E": self.E.to_json_dict(),
            "delta": self.delta,
            "gamma0": self.gamma0,
            "N": self.N,
            "C0": self.C0_used,
            "computed": self.computed_norm,
            "bound": self.theoretical_bound,
            "margin": self.margin,
            "pass": self.passed,
        }

    def csv_row(self) -> list:
        return [
            self.dim,
            self.delta,
            self.N,
            self.C0_used,
            self.computed_norm,
            self.theoretical_bound,
            self.margin,
            self.passed,
        ]


def _require_sign_cover(signs: SignSequence, N: int) -> None:
    covered = {n for (n,) in signs.table}
    if not set(range(N + 1)) <= covered:
        raise ValueError(
            f"sign sequence must be defined on all of 0..{N} "
            f"(need length {N + 1}, covered up to {max(covered, default=-1)})"
        )


def window_degree(E: BoxUnion, delta: float, gamma0: float) -> int:
    """Smallest N with delta / (pi (N+1)) strictly inside the density window."""
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    gamma1 = density_window(E, gamma0)
    N = max(0, math.ceil(delta / (math.pi * gamma1)) - 1)
    while delta / (math.pi * (N + 1)) >= gamma1:
        N += 1
    return N


def thm59_construct(
    E: BoxUnion,
    delta: float,
    signs: SignSequence,
    gamma0: float = DEFAULT_GAMMA0,
    C0: float = DEFAULT_C0,
) -> tuple[TrigPoly, SignSequence, int]:
    """Normalized sign polynomial, its unflip sequence, and the chosen degree.

    Picks the smallest N whose concentration window delta/(pi(N+1)) fits
    strictly inside the validated density window of E, builds
    f = (C0*sqrt(N+1))^(-1) * sum eps_n e_n, and returns the flip sequence
    that turns f back into the normalized one-sided Dirichlet kernel.
    """
    if E.dim != 1:
        raise ValueError("thm59_construct is one-dimensional; use tensor_verify for d > 1")
    N = window_degree(E, delta, gamma0)
    _require_sign_cover(signs, N)
    scale = 1.0 / (C0 * math.sqrt(N + 1.0))
    f = TrigPoly({n: signs(n) * scale for n in range(N + 1)}, dim=1)
    eps = SignSequence({n: signs(n) for n in range(N + 1)}, dim=1)
    return f, eps, N


def _gauss_points(lo: float, hi: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (hi - lo)
    return half * x + 0.5 * (hi + lo), half * w


def _nodes_for(width: float, degree: int, points_per_osc: int) -> int:
    return max(24, int(math.ceil(points_per_osc * 2 * degree * width)) + 1)


def restricted_l2_gauss(p: TrigPoly, E: BoxUnion, points_per_osc: int = 64) -> float:
    """sqrt of the integral of |p|^2 over E, one tensor Gauss rule per box.

    Node counts scale with the oscillation of |p|^2 (trigonometric degree
    2*deg) across each box, so the rule is exact to rounding for every case
    this package produces.
    """
    if p.dim != E.dim:
        raise ValueError("dimension mismatch between polynomial and set")
    freqs = np.array(sorted(p.support), dtype=float).reshape(len(p), p.dim)
    coeffs = np.array([p[tuple(int(c) for c in n)] for n in freqs], dtype=complex)
    total = 0.0
    for lo, hi in E.boxes:
        axes = []
        weights = []
        for axis in range(p.dim):
            nodes = _nodes_for(hi[axis] - lo[axis], p.axis_degree(axis), points_per_osc)
            x, w = _gauss_points(lo[axis], hi[axis], nodes)
            axes.append(np.exp(2j * math.pi * np.outer(x, freqs[:, axis])))
            weights.append(w)
        if p.dim == 1:
            values = axes[0] @ coeffs
            total += float(weights[0] @ (np.abs(values) ** 2))
        elif p.dim == 2:
            values = np.einsum("as,bs,s->ab", axes[0], axes[1], coeffs)
            total += float(weights[0] @ (np.abs(values) ** 2) @ weights[1])
        elif p.dim == 3:
            values = np.einsum("as,bs,cs,s->abc", axes[0], axes[1], axes[2], coeffs)
            total += float(
                np.einsum("a,b,c,abc->", weights[0], weights[1], weights[2], np.abs(values) ** 2)
            )
        else:
            raise ValueError("restricted quadrature supports dim <= 3")
    return math.sqrt(max(total, 0.0))


def _interval_mode_integral(m: int, lo: float, hi: float) -> complex:
    if m == 0:
        return complex(hi - lo)
    w = 2j * math.pi * m
    return (np.exp(w * hi) - np.exp(w * lo)) / w


def restricted_l2_spectral(p: TrigPoly, E: BoxUnion, points_per_axis: int | None = None) -> float:
    """Same integral through a global grid: FFT |p|^2 to coefficients, then
    integrate each mode over the boxes in closed form."""
    if p.dim != E.dim:
        raise ValueError("dimension mismatch between polynomial and set")
    deg = p.degree
    M = points_per_axis if points_per_axis is not None else 4 * deg + 5
    if M < 4 * deg + 1:
        raise ResolutionError(f"|p|^2 has degree {2 * deg}; need M >= {4 * deg + 1}, got {M}")
    grid = p.to_grid(M)
    squared = np.abs(np.asarray(grid.samples)) ** 2
    spectrum = np.fft.fftn(squared) / float(M**p.dim)
    band = 2 * deg
    idx = np.arange(-band, band + 1) % M
    sub = spectrum[np.ix_(*([idx] * p.dim))]
    total = 0j
    for offsets in itertools.product(range(2 * band + 1), repeat=p.dim):
        c = complex(sub[offsets])
        if c == 0:
            continue
        mode = tuple(o - band for o in offsets)
        for lo, hi in E.boxes:
            piece = c
            for m, a, b in zip(mode, lo, hi):
                piece *= _interval_mode_integral(m, a, b)
            total += piece
    return math.sqrt(max(total.real, 0.0))


def _check_two_routes(p: TrigPoly, E: BoxUnion) -> float:
    gauss = restricted_l2_gauss(p, E)
    spectral = restricted_l2_spectral(p, E)
    scale = max(gauss, spectral, 1e-30)
    if abs(gauss - spectral) > TWO_ROUTE_TOLERANCE * scale:
        raise InvariantError(
            f"restricted-norm routes disagree: gauss {gauss!r} vs spectral {spectral!r}"
        )
    return gauss


def tensor_verify(
    d: int,
    E: BoxUnion,
    delta: float = DEFAULT_DELTA,
    signs: SignSequence | None = None,
    gamma0: float = DEFAULT_GAMMA0,
    M: int | None = None,
    C0: float = DEFAULT_C0,
    theoretical_bound: float | None = None,
) -> BoundReport:
    """Run the tensor-power construction in d dimensions and verify its bound.

    Builds F as the d-fold tensor power of the normalized sign polynomial,
    unflips with the product sign sequence (leaving the normalized one-sided
    Dirichlet kernel per axis), computes the restricted L2 norm over E by
    per-box quadrature, cross-checks it against the spectral route, and
    compares with ((1-delta)/C0)^d (2 delta/pi)^(d/2) (1-gamma0), or a
    caller-supplied constant.
    """
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2, or 3")
    if E.dim != d:
        raise ValueError(f"E has dimension {E.dim}, expected {d}")
    N = window_degree(E, delta, gamma0)
    if signs is None:
        signs = SignSequence.from_list(
            rudin_shapiro_vector(max(0, math.ceil(math.log2(N + 1)))).tolist()
        )
    _require_sign_cover(signs, N)
    scale = 1.0 / (C0 * math.sqrt(N + 1.0))
    kernel1 = TrigPoly({n: scale for n in range(N + 1)}, dim=1)
    kernel = kernel1
    for _ in range(d - 1):
        kernel = kernel.tensor(kernel1)
    if M is not None:
        if 1.0 / M >= E.min_box_width():
            raise ResolutionError(
                f"global grid spacing 1/{M} does not resolve the narrowest box of E"
            )
        if M <= 2 * N:
            raise ResolutionError(f"degree-{N} certification needs M > {2 * N}")
    computed = _check_two_routes(kernel, E)
    if theoretical_bound is None:
        theoretical_bound = (
            ((1.0 - delta) / C0) ** d * (2.0 * delta / math.pi) ** (d / 2.0) * (1.0 - gamma0)
        )
    margin = computed - theoretical_bound
    return BoundReport(
        dim=d,
        E=E,
        delta=delta,
        gamma0=gamma0,
        N=N,
        C0_used=C0,
        computed_norm=computed,
        theoretical_bound=theoretical_bound,
        margin=margin,
        passed=margin >= -MARGIN_SLACK,
    )


def thm59_verify(
    E: BoxUnion,
    delta: float = DEFAULT_DELTA,
    signs: SignSequence | None = None,
    gamma0: float = DEFAULT_GAMMA0,
    M: int | None = None,
    C0: float = DEFAULT_C0,
    theoretical_bound: float | None = None,
) -> BoundReport:
    """One-dimensional bound verification; identical to tensor_verify at d=1."""
    return tensor_verify(1, E, delta, signs, gamma0, M, C0, theoretical_bound)


def corollary512_sweep(
    Es,
    M: int | None = None,
    delta: float = DEFAULT_DELTA,
    gamma0: float = DEFAULT_GAMMA0,
    C0: float = DEFAULT_C0,
) -> list[BoundReport]:
    """Verify the fixed uniform constant across a family of sets."""
    c = sweep_constant()
    return [
        thm59_verify(E, delta, None, gamma0, M, C0, theoretical_bound=c) for E in Es
    ]


@dataclass(frozen=True)
class WienerGateReport:
    """Numerical run of the nonnegative-coefficient membership chain."""

    degree: int
    partial_sums_exact: bool
    wiener_equals_value_at_zero: bool
    sup_bound_excess: float
    monotone_excess: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "degree": self.degree,
            "partial_sums_exact": self.partial_sums_exact,
            "wiener_equals_value_at_zero": self.wiener_equals_value_at_zero,
            "sup_bound_excess": self.sup_bound_excess,
            "monotone_excess": self.monotone_excess,
            "pass": self.passed,
        }


def wiener_gate(f: TrigPoly, M: int | None = None, slack: float = 1e-9) -> WienerGateReport:
    """Check the chain that nonnegative Fourier coefficients force summability.

    For every N up to the degree: the partial sum at 0 equals the coefficient
    sum exactly, it is dominated by the certified sup norm of the partial
    sum, and the partial sums never exceed the certified sup norm of f; the
    absolute-coefficient norm equals f(0) exactly.
    """
    if f.dim != 1:
        raise ValueError("wiener_gate requires dim = 1")
    for n, c in f.coeffs.items():
        if c.imag != 0.0 or c.real < 0.0:
            raise ValueError(f"coefficient at {n} is not a nonnegative real: {c}")
    deg = f.degree
    if M is None:
        M = 4 * deg + 4
    if M <= 2 * deg:
        raise ResolutionError(f"need M > {2 * deg} for degree-{deg} certification, got {M}")
    t = np.arange(M) / M
    running = np.zeros(M, dtype=complex)
    coeffs = f.coeffs
    upper_f = f.sup_norm(M).upper
    partial_sums_exact = True
    sup_excess = -math.inf
    mono_excess = -math.inf
    for N in range(deg + 1):
        for n in ((0,),) if N == 0 else ((N,), (-N,)):
            c = coeffs.get(n)
            if c is not None:
                running = running + c * np.exp(2j * math.pi * n[0] * t)
        sn = symmetric_partial_sum(f, N)
        at_zero = sn.evaluate(0.0)
        coefficient_sum = sum(sn.coeffs.values())
        if at_zero != coefficient_sum:
            partial_sums_exact = False
        lower_n = float(np.max(np.abs(running)))
        upper_n = lower_n / math.cos(math.pi * N / M)
        sup_excess = max(sup_excess, at_zero.real - upper_n)
        mono_excess = max(mono_excess, lower_n - upper_f)
    wiener_ok = f.wiener_norm() == f.evaluate(0.0).real
    passed = (
        partial_sums_exact
        and wiener_ok
        and sup_excess <= slack
        and mono_excess <= slack
    )
    return WienerGateReport(
        degree=deg,
        partial_sums_exact=partial_sums_exact,
        wiener_equals_value_at_zero=wiener_ok,
        sup_bound_excess=sup_excess,
        monotone_excess=mono_excess,
        passed=passed,
    )

"""Finite diagnostics for operator-topology convergence of partial sums.

Multiplication-operator convergence questions become grid computations
here: strong-topology probes track ||S_{sigma,N}[f] g - f g||_2 along N,
uniform-boundedness probes track certified sup norms of the rearranged
partial sums, and weak-topology probes track the absolutely summed pairing
sum |f^(n)| |psi^(n)| with psi = conj(g) h.  Witnesses g may be band-limited
polynomials, power singularities dist(t,0)^(-alpha) (the L4-membership
boundary sits at alpha = 1/4), or step sums over box families.

Every verdict is an explicitly finite-sample diagnostic: trajectories are
always reported raw alongside the plateau/growing classification, and
nothing here claims convergence of an infinite series.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoxUnion
from .errors import ResolutionError
from .rearrange import Permutation
from .trig import TorusGrid, TrigPoly, coeffs_from_grid

__all__ = [
    "WitnessFunction",
    "TrajectoryReport",
    "classify_trajectory",
    "sot_trajectory",
    "condition_iv_profile",
    "condition_iv_probe",
    "brp_profile",
    "brp_estimate",
    "wot_summability",
    "l4_witness",
]

PLATEAU_RELATIVE = 1e-3
GROWTH_EXPONENT = 0.05


class WitnessFunction:
    """A test function realized as equispaced samples at a fixed resolution."""

    __slots__ = ("kind", "params", "points_per_axis", "dim", "samples")

    def __init__(self, kind: str, params: dict, points_per_axis: int, dim: int, samples):
        self.kind = kind
        self.params = params
        self.points_per_axis = int(points_per_axis)
        self.dim = int(dim)
        arr = np.ascontiguousarray(samples, dtype=complex)
        arr.flags.writeable = False
        self.samples = arr

    @classmethod
    def trig_poly(cls, p: TrigPoly, points_per_axis: int) -> "WitnessFunction":
        grid = p.to_grid(points_per_axis)
        return cls(
            "trigpoly",
            {"poly": p.to_json_dict()},
            points_per_axis,
            p.dim,
            grid.samples,
        )

    @classmethod
    def power_singularity(cls, alpha: float, points_per_axis: int) -> "WitnessFunction":
        """dist(t, 0)^(-alpha) on the 1-torus.

        The singular node at t = 0 takes the value of its neighbor: that one
        node has quadrature weight 1/M, so the substitution washes out along
        any resolution ladder, and the ladder itself is the diagnostic.
        """
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        M = int(points_per_axis)
        if M < 4:
            raise ResolutionError("power singularity needs at least 4 grid points")
        t = np.arange(M) / M
        dist = np.minimum(t, 1.0 - t)
        dist[0] = dist[1]
        return cls("power_singularity", {"alpha": alpha}, M, 1, dist**(-alpha))

    @classmethod
    def step_sum(cls, levels: list[BoxUnion], points_per_axis: int) -> "WitnessFunction":
        """Truncated staircase sum_k k * indicator(E_k) over disjoint box unions."""
        if not levels:
            raise ValueError("step_sum needs at least one box union")
        if any(E.dim != 1 for E in levels):
            raise ValueError("step_sum witnesses are one-dimensional")
        M = int(points_per_axis)
        t = np.arange(M) / M
        centered = np.where(t < 0.5, t, t - 1.0)
        values = np.zeros(M)
        for k, E in enumerate(levels, start=1):
            inside = np.zeros(M, dtype=bool)
            for lo, hi in E.boxes:
                inside |= (centered >= lo[0]) & (centered <= hi[0])
            if np.any(values[inside] != 0):
                raise ValueError("step_sum box unions must be disjoint")
            values[inside] = float(k)
        return cls(
            "step_sum",
            {"levels": [E.to_json_dict() for E in levels]},
            M,
            1,
            values,
        )

    def grid(self) -> TorusGrid:
        return TorusGrid(self.dim, self.points_per_axis, self.samples)

    def norm_lp(self, exponent: float) -> float:
        return self.grid().quadrature_lp(exponent)

    def quadrature_report(self) -> dict:
        alpha = self.params.get("alpha")
        divergent = self.kind == "power_singularity" and alpha is not None and 4 * alpha >= 1.0
        return {
            "l2": self.norm_lp(2),
            "l4": self.norm_lp(4),
            "l4_divergent_with_resolution": bool(divergent),
        }

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "M": self.points_per_axis}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "WitnessFunction":
        kind, params, M = data["kind"], data["params"], int(data["M"])
        if kind == "trigpoly":
            return cls.trig_poly(TrigPoly.from_json_dict(params["poly"]), M)
        if kind == "power_singularity":
            return cls.power_singularity(float(params["alpha"]), M)
        if kind == "step_sum":
            return cls.step_sum([BoxUnion.from_json_dict(b) for b in params["levels"]], M)
        raise ValueError(f"unknown witness kind {kind!r}")


def l4_witness(alpha: float, points_per_axis: int) -> WitnessFunction:
    """Power-singularity witness at the L4 membership boundary.

    alpha < 1/4 gives an unbounded function still in L4; 1/4 <= alpha < 1/2
    gives L2 minus L4 (its quadrature L4 norm grows without bound along any
    resolution ladder, while the L2 norm converges).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    return WitnessFunction.power_singularity(alpha, points_per_axis)


@dataclass(frozen=True)
class TrajectoryReport:
    """A sweep of values over truncation indices plus a finite-sample verdict."""

    abscissa: tuple[int, ...]
    values: tuple[float, ...]
    verdict: str
    slope: float | None

    def __post_init__(self):
        if len(self.abscissa) != len(self.values):
            raise ValueError("abscissa and values must have equal length")

    @property
    def terminal(self) -> float:
        return self.values[-1]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "abscissa": list(self.abscissa),
            "values": list(self.values),
            "verdict": self.verdict,
            "slope": self.slope,
        }


def classify_trajectory(abscissa, values) -> tuple[str, float | None]:
    """Deterministic plateau/growing/inconclusive rule.

    Plateau when the increase over the last decade of the index range stays
    below 1e-3 of the final value; growing when the last-decade values fit a
    log-log slope above 0.05; inconclusive otherwise.  The slope statistic
    is reported whenever it is computable.
    """
    values = list(map(float, values))
    abscissa = list(map(int, abscissa))
    final = values[-1]
    start = 0
    threshold = abscissa[-1] / 10.0
    for i, n in enumerate(abscissa):
        if n >= threshold:
            start = i
            break
    pts = [(n, v) for n, v in zip(abscissa[start:], values[start:]) if n > 0 and v > 0]
    slope = None
    if len(pts) >= 2:
        logs_n = np.log([n for n, _ in pts])
        logs_v = np.log([v for _, v in pts])
        slope = float(np.polyfit(logs_n, logs_v, 1)[0])
    if final == 0.0:
        return "plateau", slope
    increase = final - values[start]
    if increase < PLATEAU_RELATIVE * final:
        return "plateau", slope
    if slope is not None and slope > GROWTH_EXPONENT:
        return "growing", slope
    return "inconclusive", slope


def _as_report(abscissa, values) -> TrajectoryReport:
    verdict, slope = classify_trajectory(abscissa, values)
    return TrajectoryReport(
        abscissa=tuple(int(n) for n in abscissa),
        values=tuple(float(v) for v in values),
        verdict=verdict,
        slope=slope,
    )


def _witness_samples(g, M: int) -> np.ndarray:
    if isinstance(g, WitnessFunction):
        if g.dim != 1:
            raise ValueError("operator probes are one-dimensional")
        if g.points_per_axis != M:
            raise ResolutionError(
                f"witness realized at {g.points_per_axis} points, probe grid is {M}"
            )
        return np.asarray(g.samples)
    if isinstance(g, TrigPoly):
        return np.asarray(g.to_grid(M).samples)
    raise TypeError("witness must be a WitnessFunction or TrigPoly")


def _rearranged_modes(sigma: Permutation, N_max: int) -> list[list[int]]:
    """Frequency batch added at each step N: images of {-N..N} minus earlier ones."""
    batches = [[sigma.apply(0)]]
    seen = {sigma.apply(0)}
    for N in range(1, N_max + 1):
        batch = []
        for n in (N, -N):
            m = sigma.apply(n)
            if m not in seen:
                seen.add(m)
                batch.append(m)
        batches.append(batch)
    return batches


def sot_trajectory(
    f: TrigPoly,
    g,
    sigma: Permutation,
    N_max: int,
    M: int,
) -> TrajectoryReport:
    """||S_{sigma,N}[f] g - f g||_2 on the grid, for N = 0..N_max.

    The value is exactly zero (up to accumulation rounding, well below 1e-9)
    from the first N whose rearranged index set covers the support of f.
    """
    if f.dim != 1:
        raise ValueError("sot_trajectory requires dim = 1")
    needed = max(
        [f.degree] + [abs(sigma.apply(n)) for n in range(-N_max, N_max + 1)]
    )
    if M < 2 * needed + 1:
        raise ResolutionError(f"grid M={M} does not resolve frequencies up to {needed}")
    g_samples = _witness_samples(g, M)
    f_samples = np.asarray(f.to_grid(M).samples)
    target = f_samples * g_samples
    t = np.arange(M) / M
    running = np.zeros(M, dtype=complex)
    values = []
    for batch in _rearranged_modes(sigma, N_max):
        for m in batch:
            c = f[(m,)]
            if c != 0:
                running = running + c * np.exp(2j * math.pi * m * t)
        diff = running * g_samples - target
        values.append(math.sqrt(float(np.mean(np.abs(diff) ** 2))))
    return _as_report(range(N_max + 1), values)


def condition_iv_profile(f: TrigPoly, sigma: Permutation, N_max: int, M: int) -> list[float]:
    """Certified sup-norm upper bounds of S_{sigma,N}[f] for N = 0..N_max."""
    if f.dim != 1:
        raise ValueError("condition_iv_profile requires dim = 1")
    needed = max(
        [f.degree] + [abs(sigma.apply(n)) for n in range(-N_max, N_max + 1)]
    )
    if M < 2 * needed + 1:
        raise ResolutionError(f"grid M={M} does not resolve frequencies up to {needed}")
    t = np.arange(M) / M
    running = np.zeros(M, dtype=complex)
    uppers = []
    current_degree = 0
    for batch in _rearranged_modes(sigma, N_max):
        for m in batch:
            c = f[(m,)]
            if c != 0:
                running = running + c * np.exp(2j * math.pi * m * t)
                current_degree = max(current_degree, abs(m))
        uppers.append(float(np.max(np.abs(running))) / math.cos(math.pi * current_degree / M))
    return uppers


def condition_iv_probe(f: TrigPoly, sigma: Permutation, N_max: int, M: int) -> float:
    """max over N <= N_max of the certified sup-norm upper bound of S_{sigma,N}[f]."""
    return max(condition_iv_profile(f, sigma, N_max, M))


def brp_profile(T: TrigPoly, g, sets, M: int) -> list[float]:
    """||S_J[T] g||_2 on the grid for each frequency set J in the list."""
    if T.dim != 1:
        raise ValueError("brp_profile requires dim = 1")
    if M < 2 * T.degree + 1:
        raise ResolutionError(f"grid M={M} does not resolve degree {T.degree}")
    g_samples = _witness_samples(g, M)
    t = np.arange(M) / M
    values = []
    for J in sets:
        restricted = T.restrict(J.elements if hasattr(J, "elements") else J)
        samples = np.zeros(M, dtype=complex)
        for (m,), c in restricted.coeffs.items():
            samples += c * np.exp(2j * math.pi * m * t)
        prod = samples * g_samples
        values.append(math.sqrt(float(np.mean(np.abs(prod) ** 2))))
    return values


def exhaustion_index(T: TrigPoly, sigma: Permutation) -> int:
    """Smallest N with sigma({-N..N}) covering the support of T."""
    inverse = sigma.invert()
    return max((abs(inverse.apply(m)) for (m,) in T.support), default=0)


def brp_estimate(g, T: TrigPoly, sigma: Permutation, M: int) -> float:
    """Empirical ratio sup_N ||S_{sigma,N}[T] g||_2 / upper(sup_norm(T)).

    The sweep runs N from 0 to the exhaustion index of T under sigma, after
    which the partial sums are constant.
    """
    if len(T) == 0:
        raise ValueError("bounded-rearrangement ratio is undefined for the zero polynomial")
    n_star = exhaustion_index(T, sigma)
    needed = max(
        [T.degree] + [abs(sigma.apply(n)) for n in range(-n_star, n_star + 1)]
    )
    if M < 2 * needed + 1:
        raise ResolutionError(f"grid M={M} does not resolve frequencies up to {needed}")
    g_samples = _witness_samples(g, M)
    t = np.arange(M) / M
    running = np.zeros(M, dtype=complex)
    best = 0.0
    for batch in _rearranged_modes(sigma, n_star):
        for m in batch:
            c = T[(m,)]
            if c != 0:
                running = running + c * np.exp(2j * math.pi * m * t)
        prod = running * g_samples
        best = max(best, math.sqrt(float(np.mean(np.abs(prod) ** 2))))
    return best / T.sup_norm(M).upper


def wot_summability(
    f: TrigPoly,
    g,
    h,
    N_max: int,
    M: int,
) -> TrajectoryReport:
    """Partial sums A_N = sum_{|n|<=N} |f^(n)| |psi^(n)| with psi = conj(g) h.

    psi's coefficients are computed by quadrature from the pointwise product
    of the witness samples, so the probe sees exactly what the grid sees.
    The totals are invariant under any reordering and under sign flips of
    f's coefficients, absolute values being taken throughout.
    """
    if f.dim != 1:
        raise ValueError("wot_summability requires dim = 1")
    if M < 2 * N_max + 1:
        raise ResolutionError(f"band {N_max} needs M >= {2 * N_max + 1}, got {M}")
    g_samples = _witness_samples(g, M)
    h_samples = _witness_samples(h, M)
    psi = TorusGrid(1, M, np.conj(g_samples) * h_samples)
    psi_hat = coeffs_from_grid(psi, N_max)
    a = 0.0
    values = []
    for N in range(N_max + 1):
        for n in ((0,),) if N == 0 else ((N,), (-N,)):
            a += abs(f[n]) * abs(psi_hat[n])
        values.append(a)
    return _as_report(range(N_max + 1), values)

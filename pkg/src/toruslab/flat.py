"""Search for flat sign polynomials sum_{n=0}^{N} eps_n e_n.

Parseval forces the sup norm of any +/-1 sign polynomial to be at least
sqrt(N+1); the flatness ratio is the certified sup-norm enclosure divided by
that floor, so a ratio of [1, 1] would be perfectly flat.  The Rudin-Shapiro
recursion supplies the classical sqrt(2) ceiling; per-N exhaustive search is
feasible through N = 24 after quotienting by the global-flip and
index-reversal symmetries, and simulated annealing takes over beyond that.

Every search optimizes the certified UPPER bound of the ratio, never the
raw grid maximum, so reported constants stay sound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvariantError, ResolutionError
from .summation import SignSequence

__all__ = [
    "AnnealConfig",
    "FlatnessReport",
    "rudin_shapiro",
    "rudin_shapiro_vector",
    "default_grid",
    "flatness_ratio",
    "c0_exhaustive",
    "c0_anneal",
]

EXHAUSTIVE_LIMIT = 24
PARSEVAL_SLACK = 1e-9

SCHEMA_VERSION = 1


def rudin_shapiro_vector(k: int) -> np.ndarray:
    """Rudin-Shapiro sign vector of length 2**k as +/-1 ints."""
    if not 0 <= k <= 20:
        raise ValueError("k must be between 0 and 20")
    p = np.array([1], dtype=np.int64)
    q = np.array([1], dtype=np.int64)
    for _ in range(k):
        p, q = np.concatenate([p, q]), np.concatenate([p, -q])
    return p


def rudin_shapiro(k: int) -> SignSequence:
    """Rudin-Shapiro signs on {0 .. 2**k - 1}."""
    return SignSequence.from_list(rudin_shapiro_vector(k).tolist())


def default_grid(N: int) -> int:
    """Default certification grid 32*(N+1): the factor 1/cos(pi*N/M) stays below 1.005."""
    return 32 * (N + 1)


def _sign_vector(signs, N: int | None = None) -> np.ndarray:
    if isinstance(signs, SignSequence):
        if N is None:
            if len(signs) == 0:
                raise ValueError("empty sign sequence")
            N = max(n for (n,) in signs.table)
        vec = np.array(signs.as_vector(N), dtype=np.int64)
    else:
        vec = np.asarray(list(signs), dtype=np.int64)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError("signs must be a nonempty 1-d +/-1 sequence")
    if not np.all(np.abs(vec) == 1):
        raise ValueError("signs must all be -1 or +1")
    return vec


def _grid_abs(eps: np.ndarray, M: int) -> np.ndarray:
    """|sum eps_n e_n| on the M-point grid via one padded FFT."""
    spectrum = np.zeros(M, dtype=complex)
    spectrum[: eps.size] = eps
    return np.abs(np.fft.ifft(spectrum) * M)


# Above this grid size, evaluate coset by coset instead of one huge FFT.
_DENSE_GRID_LIMIT = 1 << 22


def _max_abs_on_grid(eps: np.ndarray, M: int) -> float:
    """max_j |sum_n eps_n exp(2 pi i n j / M)| without materializing huge grids.

    When M factors as L * M_inner with M_inner >= len(eps), the M-grid splits
    into L cosets of the M_inner-grid; each coset is one small padded FFT of
    a twisted coefficient vector.  This keeps very fine certification grids
    (needed to pin ratios to ~1e-7) cheap in time and memory.
    """
    if M <= _DENSE_GRID_LIMIT:
        return float(np.max(_grid_abs(eps, M)))
    inner = 1 << max(int(np.ceil(np.log2(2 * eps.size))), 1)
    while M % inner != 0:
        inner += 1  # fall back to any divisor-compatible size >= 2*len(eps)
        if inner > M:
            return float(np.max(_grid_abs(eps, M)))
    cosets = M // inner
    n = np.arange(eps.size)
    best = 0.0
    for r in range(cosets):
        twisted = eps * np.exp(2j * math.pi * n * r / M)
        spectrum = np.zeros(inner, dtype=complex)
        spectrum[: eps.size] = twisted
        best = max(best, float(np.max(np.abs(np.fft.fft(spectrum)))))
    return best


def flatness_ratio(signs, M: int | None = None) -> tuple[float, float]:
    """Certified enclosure [lower, upper] of ||sum eps_n e_n||_inf / sqrt(N+1).

    Accepts a SignSequence on {0..N} or any +/-1 sequence.  Requires M > 2N.
    The lower end can never drop below 1 (up to rounding): for M >= 2N+1 the
    grid maximum dominates the exact quadrature L2 norm sqrt(N+1).
    """
    eps = _sign_vector(signs)
    N = eps.size - 1
    if M is None:
        M = default_grid(N)
    if M <= 2 * N:
        raise ResolutionError(f"flatness certification of degree {N} needs M > {2 * N}, got {M}")
    lower_sup = _max_abs_on_grid(eps, M)
    upper_sup = lower_sup / math.cos(math.pi * N / M)
    root = math.sqrt(N + 1.0)
    return lower_sup / root, upper_sup / root


@dataclass(frozen=True)
class AnnealConfig:
    """Schedule for the single-flip Metropolis search."""

    steps: int = 200_000
    t0: float = 0.1
    cooling: float = 0.9995
    restarts: int = 4


@dataclass(frozen=True)
class FlatnessReport:
    """Outcome of one flatness computation or search."""

    N: int
    signs: SignSequence
    ratio_lower: float
    ratio_upper: float
    method: str
    points_per_axis: int
    seed: int | None = None

    def __post_init__(self):
        if self.ratio_lower < 1.0 - PARSEVAL_SLACK:
            raise InvariantError(
                f"flatness ratio lower bound {self.ratio_lower} fell below the Parseval floor"
            )

    @property
    def signs_string(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs.as_vector(self.N))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "N": self.N,
            "method": self.method,
            "seed": self.seed,
            "points_per_axis": self.points_per_axis,
            "ratio": [self.ratio_lower, self.ratio_upper],
            "signs": self.signs_string,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)


def _report(eps: np.ndarray, M: int, method: str, seed: int | None = None) -> FlatnessReport:
    lower, upper = flatness_ratio(eps, M)
    return FlatnessReport(
        N=eps.size - 1,
        signs=SignSequence.from_list(int(s) for s in eps),
        ratio_lower=lower,
        ratio_upper=upper,
        method=method,
        points_per_axis=M,
        seed=seed,
    )


def _canonical_mask_filter(masks: np.ndarray, bits: np.ndarray, n_bits: int) -> np.ndarray:
    """Keep only orbit representatives under global flip and index reversal.

    Both operations leave |p| pointwise invariant, so restricting the scan
    to the minimal mask of each four-element orbit loses nothing and cuts
    the work roughly by four.
    """
    full = (1 << n_bits) - 1
    weights = 1 << np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    rev = bits @ weights
    flip = masks ^ full
    flip_rev = rev ^ full
    canon = np.minimum(np.minimum(masks, flip), np.minimum(rev, flip_rev))
    return masks == canon


def c0_exhaustive(N: int, M: int | None = None, batch: int = 4096) -> FlatnessReport:
    """Minimal certified-upper flatness ratio over all sign patterns of length N+1.

    The scan runs over canonical representatives of the flip/reversal
    symmetry classes; the winner is the pattern minimizing
    (upper ratio, lexicographic signs), which makes the result independent
    of batching.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if N > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive search is limited to N <= {EXHAUSTIVE_LIMIT} "
            f"(2**{N + 1} candidates); use c0_anneal for larger N"
        )
    if M is None:
        M = default_grid(N)
    if M <= 2 * N:
        raise ResolutionError(f"need M > {2 * N}, got {M}")
    n_bits = N + 1
    exponent = np.exp(
        2j * math.pi * np.outer(np.arange(n_bits), np.arange(M)) / M
    )
    cos_factor = math.cos(math.pi * N / M)
    root = math.sqrt(N + 1.0)
    positions = np.arange(n_bits, dtype=np.int64)
    best_key: tuple[float, tuple[int, ...]] | None = None
    for start in range(0, 1 << n_bits, batch):
        masks = np.arange(start, min(start + batch, 1 << n_bits), dtype=np.int64)
        bits = (masks[:, None] >> positions) & 1
        keep = _canonical_mask_filter(masks, bits, n_bits)
        if not np.any(keep):
            continue
        eps = (1 - 2 * bits[keep]).astype(float)
        values = eps @ exponent
        uppers = np.max(np.abs(values), axis=1) / (cos_factor * root)
        for ratio, row in zip(uppers, eps):
            key = (float(ratio), tuple(int(s) for s in row))
            if best_key is None or key < best_key:
                best_key = key
    assert best_key is not None
    return _report(np.array(best_key[1], dtype=np.int64), M, method="exhaustive")


class _Phases:
    """Rows exp(2*pi*i*j*t) on the M-grid, tabulated only when that is cheap."""

    def __init__(self, n: int, M: int):
        self.n = n
        self.M = M
        self._table = None
        if n * M <= (1 << 22):
            self._table = np.exp(2j * math.pi * np.outer(np.arange(n), np.arange(M)) / M)

    def rows(self, idx: np.ndarray) -> np.ndarray:
        if self._table is not None:
            return self._table[idx]
        return np.exp(
            (2j * math.pi / self.M) * np.asarray(idx, dtype=float)[:, None] * np.arange(self.M)
        )

    def row(self, j: int) -> np.ndarray:
        if self._table is not None:
            return self._table[j]
        return np.exp((2j * math.pi / self.M) * j * np.arange(self.M))


def _chain_values(eps: np.ndarray, M: int) -> np.ndarray:
    """Grid values for each row of a (chains, N+1) sign matrix."""
    spectrum = np.zeros((eps.shape[0], M), dtype=complex)
    spectrum[:, : eps.shape[1]] = eps
    return np.fft.ifft(spectrum, axis=1) * M


def _polish(eps: np.ndarray, phases: _Phases, cos_root: float) -> tuple[np.ndarray, float]:
    """Deterministic steepest-descent sweep over single flips until stable."""
    eps = eps.copy()
    values = _chain_values(eps[None, :], phases.M)[0]
    energy = float(np.max(np.abs(values))) / cos_root
    improved = True
    while improved:
        improved = False
        for j in range(eps.size):
            trial = values - 2.0 * eps[j] * phases.row(j)
            trial_energy = float(np.max(np.abs(trial))) / cos_root
            if trial_energy < energy - 1e-15:
                values = trial
                eps[j] = -eps[j]
                energy = trial_energy
                improved = True
    return eps, energy


def c0_anneal(
    N: int,
    schedule: AnnealConfig = AnnealConfig(),
    seed: int = 0,
    M: int | None = None,
    warm_start: SignSequence | None = None,
) -> FlatnessReport:
    """Simulated annealing over sign patterns, minimizing the certified upper ratio.

    All restarts run as independent Metropolis chains in lockstep (one
    proposed single flip per chain per step, geometric cooling), each ending
    with a deterministic local-descent polish; the best chain wins by
    (upper ratio, lexicographic signs).  The result is a deterministic
    function of (N, schedule, seed, M, warm_start).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if M is None:
        M = default_grid(N)
    if M <= 2 * N:
        raise ResolutionError(f"need M > {2 * N}, got {M}")
    rng = np.random.default_rng(seed)
    n = N + 1
    chains = max(1, schedule.restarts)
    if warm_start is not None:
        start = _sign_vector(warm_start, N)
        eps = np.tile(start, (chains, 1)).astype(float)
    else:
        eps = (1 - 2 * rng.integers(0, 2, size=(chains, n))).astype(float)
    phases = _Phases(n, M)
    cos_root = math.cos(math.pi * N / M) * math.sqrt(float(n))
    values = _chain_values(eps, M)
    energy = np.max(np.abs(values), axis=1) / cos_root
    best_eps = eps.copy()
    best_energy = energy.copy()
    temperature = schedule.t0
    rows = np.arange(chains)
    for _ in range(schedule.steps):
        flips = rng.integers(0, n, size=chains)
        step = -2.0 * eps[rows, flips]
        trial = values + step[:, None] * phases.rows(flips)
        trial_energy = np.max(np.abs(trial), axis=1) / cos_root
        delta = trial_energy - energy
        accept = delta <= 0
        hot = ~accept
        if np.any(hot):
            accept[hot] = rng.random(int(hot.sum())) < np.exp(-delta[hot] / temperature)
        if np.any(accept):
            values[accept] = trial[accept]
            eps[rows[accept], flips[accept]] *= -1.0
            energy[accept] = trial_energy[accept]
            better = energy < best_energy
            if np.any(better):
                best_energy[better] = energy[better]
                best_eps[better] = eps[better]
        temperature *= schedule.cooling
    best_key = None
    for r in range(chains):
        polished, polished_energy = _polish(best_eps[r].astype(np.int64), phases, cos_root)
        key = (polished_energy, tuple(int(s) for s in polished))
        if best_key is None or key < best_key:
            best_key = key
    return _report(np.array(best_key[1], dtype=np.int64), M, method="anneal", seed=seed)

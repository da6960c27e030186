"""Numerical experiments with rearranged Fourier series on the torus.

Sparse trigonometric polynomials with certified norms, partial-sum and
sign-flip operators, finite permutations and exhaustions, flat-polynomial
searches, explicit restricted-norm lower-bound constructions, and finite
probes of strong/weak operator-topology convergence.
"""

__version__ = "0.1.0"

from .errors import ConfigError, InvariantError, ResolutionError
from .trig import NormCertificate, TorusGrid, TrigPoly, coeffs_from_grid
from .summation import (
    FreqSet,
    SignSequence,
    dirichlet_one_sided,
    fejer,
    fejer_mean,
    partial_sum,
    rearranged_partial_sum,
    sign_flip_sum,
    symmetric_box,
    symmetric_partial_sum,
    vallee_poussin_mean,
)
from .rearrange import (
    Exhaustion,
    Permutation,
    ball_exhaustion,
    block_permutation,
    box_exhaustion,
    custom_exhaustion,
    cycle,
    greedy_order,
    random_permutation,
    swap,
)
from .flat import (
    AnnealConfig,
    FlatnessReport,
    c0_anneal,
    c0_exhaustive,
    flatness_ratio,
    rudin_shapiro,
    rudin_shapiro_vector,
)
from .bounds import (
    BoundReport,
    BoxUnion,
    WienerGateReport,
    corollary512_sweep,
    density_window,
    restricted_l2_gauss,
    restricted_l2_spectral,
    sweep_constant,
    tensor_verify,
    thm59_construct,
    thm59_verify,
    wiener_gate,
)
from .probes import (
    TrajectoryReport,
    WitnessFunction,
    brp_estimate,
    brp_profile,
    classify_trajectory,
    condition_iv_probe,
    condition_iv_profile,
    l4_witness,
    sot_trajectory,
    wot_summability,
)
from .experiments import ExperimentConfig, RunManifest, run

__all__ = [name for name in dir() if not name.startswith("_")]

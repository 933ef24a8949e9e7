"""primelab: a numerical laboratory for truncated divisor sums and prime moments.

The package evaluates, at desk scale and with exact-arithmetic cross-checks:

* the truncated divisor-sum approximants lambda_R(n) and LambdaBig_R(n),
* Hardy-Littlewood singular series and their level constants,
* correlation sums of the approximants over shift patterns,
* window moments of psi_R and of psi over short intervals, their exact
  rearrangement through correlation sums, and mixed moments,
* five mean-value lemmas for multiplicative functions on x-ladders,
* a coupled two-scale experiment probing the sign of the third moment.
"""

from __future__ import annotations

from ._backend import HAS_NUMBA, resolve_backend
from .tables import ArithTables, build_tables, load_tables, save_tables
from .approximants import (
    ApproximantWeights,
    biglambda_R_range,
    build_weights,
    lambda_R_direct,
    lambda_R_range,
    lambda_R_range_exact,
    psi_R,
    script_L,
    script_L_float,
)
from .singular import (
    SingularValue,
    constant_C,
    gallagher_sum,
    singular_S2_range,
    singular_Sn,
    singular_vector,
)
from .correlations import (
    CorrelationResult,
    ShiftPattern,
    psi_tuple,
    s2_reduced,
    s_k,
    s_tilde_k,
)
from .moments import (
    FirstMomentReport,
    MomentReport,
    OmegaExperiment,
    coupled_C,
    first_moment_identity,
    h_from_lambda,
    mixed_moment,
    moment_psi,
    moment_psiR,
    omega_experiment,
)
from .lemmas import (
    LemmaReport,
    MonicPolyPair,
    lemma1,
    lemma2,
    lemma3,
    lemma4,
    lemma4_log,
    lemma5,
    multiplicative_values,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximantWeights",
    "ArithTables",
    "CorrelationResult",
    "FirstMomentReport",
    "HAS_NUMBA",
    "LemmaReport",
    "MomentReport",
    "MonicPolyPair",
    "OmegaExperiment",
    "ShiftPattern",
    "SingularValue",
    "__version__",
    "biglambda_R_range",
    "build_tables",
    "build_weights",
    "constant_C",
    "coupled_C",
    "first_moment_identity",
    "gallagher_sum",
    "h_from_lambda",
    "lambda_R_direct",
    "lambda_R_range",
    "lambda_R_range_exact",
    "lemma1",
    "lemma2",
    "lemma3",
    "lemma4",
    "lemma4_log",
    "lemma5",
    "load_tables",
    "mixed_moment",
    "moment_psi",
    "moment_psiR",
    "multiplicative_values",
    "omega_experiment",
    "psi_R",
    "psi_tuple",
    "resolve_backend",
    "s2_reduced",
    "s_k",
    "s_tilde_k",
    "save_tables",
    "script_L",
    "script_L_float",
    "singular_S2_range",
    "singular_Sn",
    "singular_vector",
]

"""Random permutations built by repeatedly taking the minimum of k uniform draws.

Exposes the data types, the sampler, choice strategies, permutation statistics
and the exact oracles. Hot loops live in :mod:`kcm.kernels`, which picks a
compiled backend when one is importable.
"""
__version__ = "0.1.0"

from .core import (
    DeckState,
    OrderStatisticSet,
    Permutation,
    RelativeSeq,
    ValidationError,
    permutation_to_relative,
    relative_to_permutation,
)
from .sampler import (
    ConfigError,
    DrawTrace,
    SamplerConfig,
    derive_seed,
    sample_kcm,
    sample_kcm_batch,
    sample_relative,
    sample_relative_batch,
    sample_trace,
)
from .strategies import STRATEGIES, ChoiceStrategy, ContractViolation, coupled_run, get_strategy, replay
from .statistics import (
    asymptotic_constants,
    count_inversions,
    exact_step_moments,
    exact_total_moments,
    greedy_lower_bound,
    inversion_profile,
    lis_length,
    perturb_relative,
    reinsertion_distance,
)
from .oracle import ExactPmf, SizeError, enumerate_strategy, exact_E_L, exact_pmf_I
from .kernels import BACKEND

__all__ = [name for name in dir() if not name.startswith("_")]

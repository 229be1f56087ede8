"""Diversified re-ranking by sliding spectrum decomposition, with a DPP baseline."""
from .core import (
    ALGORITHMS,
    ConfigError,
    DegenerateEmbeddingError,
    InputError,
    ItemCandidate,
    NumericalError,
    OverConstrainedError,
    PreparedPool,
    RerankConfig,
    RerankError,
    RerankReport,
    StepRecord,
    validate_pool,
)
from .dpp import DppKernel, build_kernel, dpp_greedy, dpp_greedy_window, dpp_pipeline
from .engine import rerank
from .metrics import SessionLog, ilad, mrt
from .preprocess import (
    RawPool,
    filter_constraints,
    pool_from_arrays,
    prepare,
    prepare_embedding,
    standardize_qualities,
)
from .ssd import SelectionState, mgs_step, revert_projection, ssd_no_window, ssd_star, ssd_window

__version__ = "0.1.0"

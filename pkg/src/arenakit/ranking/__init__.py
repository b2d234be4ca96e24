"""Pairwise preference ranking engine.

Pure functions of their inputs plus explicit seeds; all returned values are
immutable and safe to share across threads.
"""

from ._backend import backend_name
from .baselines import bt_mle, elo, progress_ranking
from .em import NonFiniteParameterError, fit_em, fit_em_partial, m_step
from .metrics import mmrv, pearson_r, rank_from_scores
from .model import (
    e_step,
    grad_hess,
    loglik,
    marginal_prob,
    outcome_probs,
    penalized_loglik,
    q_objective,
)
from .types import (
    EmConfig,
    FitResult,
    ModelParams,
    Outcome,
    PackedDataset,
    PreferenceRecord,
    RankingScores,
    Responsibilities,
    pack_dataset,
)

__all__ = [
    "EmConfig",
    "FitResult",
    "ModelParams",
    "NonFiniteParameterError",
    "Outcome",
    "PackedDataset",
    "PreferenceRecord",
    "RankingScores",
    "Responsibilities",
    "backend_name",
    "bt_mle",
    "e_step",
    "elo",
    "fit_em",
    "fit_em_partial",
    "grad_hess",
    "loglik",
    "m_step",
    "marginal_prob",
    "mmrv",
    "outcome_probs",
    "pack_dataset",
    "pearson_r",
    "penalized_loglik",
    "progress_ranking",
    "q_objective",
    "rank_from_scores",
]

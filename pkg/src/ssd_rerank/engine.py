"""Single entry point dispatching a prepared pool to the configured engine."""
from __future__ import annotations

from .core import PreparedPool, RerankConfig, RerankReport
from .dpp import dpp_pipeline
from .ssd import ssd_no_window, ssd_star, ssd_window

ENGINES = {
    "ssd-nowindow": ssd_no_window,
    "ssd-window": ssd_window,
    "ssd-star": ssd_star,
    "dpp-nowindow": dpp_pipeline,
    "dpp-window": dpp_pipeline,
}


def rerank(pool: PreparedPool, config: RerankConfig) -> RerankReport:
    return ENGINES[config.algorithm](pool, config)

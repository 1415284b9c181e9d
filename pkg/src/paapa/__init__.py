"""Simulation and exact analysis of graphs grown by mixed preferential and
anti-preferential attachment."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    EdgeRecord, GraphState, ModelParams, Observer, Variant, grow, init_graph, step,
)
from .samplers import AttachmentRule, attach_probability  # noqa: E402
from .seeding import derive_seed  # noqa: E402

__all__ = [
    "__version__", "AttachmentRule", "EdgeRecord", "GraphState", "ModelParams",
    "Observer", "Variant", "attach_probability", "derive_seed", "grow",
    "init_graph", "step",
]

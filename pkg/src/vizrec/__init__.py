"""vizrec: visualization-plan recommendation over data-lake discovery results."""

from .config import EngineConfig
from .errors import VizrecError
from .recommender import VisualizationRecommender
from .tables import (
    AlignmentMap,
    LakeTable,
    TypedColumn,
    baseline_align,
    infer_dtype,
    load_alignment,
    load_table,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentMap",
    "EngineConfig",
    "LakeTable",
    "TypedColumn",
    "VisualizationRecommender",
    "VizrecError",
    "baseline_align",
    "infer_dtype",
    "load_alignment",
    "load_table",
    "__version__",
]

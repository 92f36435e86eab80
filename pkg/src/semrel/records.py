"""Shared record types: scene bundles, metric rows, fixations."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import BBox, ImageDims

# neighborhood policies
ADJACENT_OVERLAP = "adjacent"
ALL_OTHERS = "all"
POLICIES = (ADJACENT_OVERLAP, ALL_OTHERS)

METRIC_COLUMNS = (
    "obj_image_vissim",
    "objs_vissim",
    "overall_vissim",
    "sent_semsim",
    "words_semsim",
    "concepts_semsim",
    "overall_semsim",
    "sum_vissem_sim",
)


@dataclass
class ObjectRecord:
    object_id: str
    name: str
    bbox: BBox
    embedding: np.ndarray
    name_text_embedding: Optional[np.ndarray] = None


@dataclass
class SceneBundle:
    image_id: str
    dims: ImageDims
    caption: str
    embedding_dim: int
    image_embedding: np.ndarray
    objects: list
    caption_sentence_embeddings: Optional[list] = None
    image_path: Optional[str] = None
    provenance: Optional[dict] = None

    def object_by_id(self, object_id: str):
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        return None


@dataclass
class MetricRow:
    """Per-object metric values; None marks a missing value."""
    image_id: str
    object_id: str
    name: str
    obj_image_vissim: Optional[float] = None
    objs_vissim: Optional[float] = None
    overall_vissim: Optional[float] = None
    sent_semsim: Optional[float] = None
    words_semsim: Optional[float] = None
    concepts_semsim: Optional[float] = None
    overall_semsim: Optional[float] = None
    sum_vissem_sim: Optional[float] = None
    proportion: float = 0.0
    saliency: Optional[float] = None
    position: str = "center"


@dataclass
class MetricTable:
    rows: list
    diagnostics: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


@dataclass
class FixationRecord:
    image_id: str
    object_id: str
    participant: str
    total_duration_ms: float
    fixation_count: int

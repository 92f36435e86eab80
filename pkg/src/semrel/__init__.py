"""Contextual relevance metrics for captioned scenes.

The package turns a captioned, object-annotated image into per-object
relevance scores (visual and language-based similarity against the
scene), adds bottom-up saliency from a spectral-residual map, and
quantifies how well each score explains eye-movement responses with
penalized additive models compared by AIC.
"""

__version__ = "0.1.0"

from .errors import SemrelError
from .geometry import BBox, ImageDims
from .records import FixationRecord, MetricRow, MetricTable, ObjectRecord, SceneBundle

__all__ = [
    "SemrelError",
    "BBox", "ImageDims",
    "FixationRecord", "MetricRow", "MetricTable", "ObjectRecord", "SceneBundle",
    "__version__",
]

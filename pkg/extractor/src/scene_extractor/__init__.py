"""Scene-bundle extraction: detect, crop, embed, export.

Produces bundle JSON documents (plus grayscale P5 images and a manifest)
that the downstream relevance-metrics tooling consumes purely as files.
"""

from .backends import Detection, SyntheticBackend, TransformersBackend
from .config import CROP_PADDING, ExtractorConfig
from .errors import ExtractorError, ModelLoadError, NoObjectsDetected
from .pipeline import extract_batch, extract_bundle, split_sentences

__all__ = [
    "CROP_PADDING",
    "Detection",
    "ExtractorConfig",
    "ExtractorError",
    "ModelLoadError",
    "NoObjectsDetected",
    "SyntheticBackend",
    "TransformersBackend",
    "extract_batch",
    "extract_bundle",
    "split_sentences",
]

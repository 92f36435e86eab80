"""Extraction settings.

Crops are taken with zero padding around the detected box; the constant
exists so the choice is recorded in every bundle's provenance rather than
buried in the code.
"""

from dataclasses import dataclass
from pathlib import Path

CROP_PADDING = 0

DEFAULT_JOINT_ENCODER = "openai/clip-vit-base-patch32"
DEFAULT_SENTENCE_ENCODER = "sentence-transformers/all-MiniLM-L6-v2"


@dataclass(frozen=True)
class ExtractorConfig:
    """What to run and where to put the results.

    detector_threshold keeps only detections with confidence strictly
    above it and must lie in the open interval (0, 1).  The encoder
    fields are model identifiers understood by the chosen backend.
    """

    output_dir: Path
    detector_threshold: float = 0.7
    joint_encoder: str = DEFAULT_JOINT_ENCODER
    sentence_encoder: str = DEFAULT_SENTENCE_ENCODER

    def __post_init__(self):
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        t = self.detector_threshold
        if not isinstance(t, (int, float)) or not (0.0 < float(t) < 1.0):
            raise ValueError(f"detector_threshold must be in (0, 1), got {t!r}")
        if not self.joint_encoder or not isinstance(self.joint_encoder, str):
            raise ValueError("joint_encoder must be a nonempty string")
        if not self.sentence_encoder or not isinstance(self.sentence_encoder, str):
            raise ValueError("sentence_encoder must be a nonempty string")

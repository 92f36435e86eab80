"""Model backends: object detection plus image and text encoders.

A backend bundles the three model roles behind three methods:

    detect(rgb)      -> list[Detection]   confidence-scored named boxes
    embed_image(rgb) -> 1-D float vector  joint image-text encoder
    embed_text(text) -> 1-D float vector  sentence encoder

`rgb` is an HxWx3 uint8 array.  Embeddings are returned as produced by the
model, unnormalized.  TransformersBackend wraps pretrained checkpoints and
raises ModelLoadError when they cannot be loaded; SyntheticBackend derives
everything deterministically from the pixels and text, needs no downloads,
and is what the tests run against.
"""

import hashlib

import numpy as np

from .errors import ModelLoadError


class Detection:
    """One detected object: a label, a confidence, and a pixel box."""

    __slots__ = ("name", "score", "x", "y", "w", "h")

    def __init__(self, name, score, x, y, w, h):
        self.name = str(name)
        self.score = float(score)
        self.x = float(x)
        self.y = float(y)
        self.w = float(w)
        self.h = float(h)

    def __repr__(self):
        return (f"Detection({self.name!r}, {self.score:.3f}, "
                f"x={self.x}, y={self.y}, w={self.w}, h={self.h})")


def _luma(rgb: np.ndarray) -> np.ndarray:
    arr = np.asarray(rgb, dtype=np.float64) / 255.0
    return 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]


def _block_means(gray: np.ndarray, rows: int, cols: int) -> np.ndarray:
    out = np.empty(rows * cols, dtype=np.float64)
    i = 0
    for chunk in np.array_split(gray, rows, axis=0):
        for block in np.array_split(chunk, cols, axis=1):
            out[i] = float(block.mean()) if block.size else 0.0
            i += 1
    return out


class SyntheticBackend:
    """Deterministic stand-in models derived from pixels and bytes.

    The detector proposes one box per image quadrant, scored by the
    quadrant's mean luminance and named from a fixed label palette, so
    brightness controls what survives a confidence threshold.  Image
    embeddings are block-mean grids of the crop; text embeddings hash each
    token through sha256.  Same inputs, same outputs, on any machine.
    """

    labels = ("person", "dog", "ball", "car")

    def __init__(self, joint_dim: int = 8, text_dim: int = 6):
        if joint_dim < 2 or text_dim < 2:
            raise ValueError("embedding dims must be at least 2")
        self.joint_dim = int(joint_dim)
        self.text_dim = int(text_dim)

    def describe(self) -> str:
        return f"synthetic(joint_dim={self.joint_dim}, text_dim={self.text_dim})"

    def detect(self, rgb: np.ndarray):
        gray = _luma(rgb)
        h, w = gray.shape
        h2, w2 = h // 2, w // 2
        quads = (
            (0, 0, w2, h2),
            (w2, 0, w - w2, h2),
            (0, h2, w2, h - h2),
            (w2, h2, w - w2, h - h2),
        )
        out = []
        for i, (x, y, qw, qh) in enumerate(quads):
            if qw <= 0 or qh <= 0:
                continue
            patch = gray[y:y + qh, x:x + qw]
            out.append(Detection(self.labels[i], float(patch.mean()), x, y, qw, qh))
        return out

    def embed_image(self, rgb: np.ndarray) -> np.ndarray:
        gray = _luma(rgb)
        # a 2 x (dim/2) grid of block means, plus the residual slots filled
        # with global moments so odd dims still work
        cols = max(self.joint_dim // 2, 1)
        vec = _block_means(gray, 2, cols)
        if vec.size < self.joint_dim:
            extra = np.array([gray.mean(), gray.std()], dtype=np.float64)
            vec = np.concatenate([vec, extra])
        return vec[:self.joint_dim].copy()

    def embed_text(self, text: str) -> np.ndarray:
        tokens = [t for t in text.lower().split() if t.strip()]
        if not tokens:
            return np.zeros(self.text_dim, dtype=np.float64)
        acc = np.zeros(self.text_dim, dtype=np.float64)
        for tok in tokens:
            digest = hashlib.sha256(tok.encode("utf-8")).digest()
            need = self.text_dim * 8
            while len(digest) < need:
                digest += hashlib.sha256(digest).digest()
            words = np.frombuffer(digest[:need], dtype="<u8")
            acc += words.astype(np.float64) / float(2 ** 64)
        return acc / len(tokens)


class TransformersBackend:
    """Pretrained checkpoints via the transformers library.

    Heavy imports happen inside load(), so constructing the backend is
    free and environments without torch can still use the rest of the
    package.  Any import or checkpoint failure surfaces as ModelLoadError.
    """

    def __init__(self, joint_encoder: str, sentence_encoder: str,
                 detector: str = "facebook/detr-resnet-50", device: str = "cpu"):
        self.joint_encoder_id = joint_encoder
        self.sentence_encoder_id = sentence_encoder
        self.detector_id = detector
        self.device = device
        self._models = None

    def describe(self) -> str:
        return (f"transformers(detector={self.detector_id}, "
                f"joint={self.joint_encoder_id}, sentence={self.sentence_encoder_id})")

    def load(self):
        if self._models is not None:
            return
        try:
            import torch
            from transformers import (
                AutoImageProcessor,
                AutoModel,
                AutoModelForObjectDetection,
                AutoProcessor,
                AutoTokenizer,
            )

            det_proc = AutoImageProcessor.from_pretrained(self.detector_id)
            det = AutoModelForObjectDetection.from_pretrained(self.detector_id)
            joint_proc = AutoProcessor.from_pretrained(self.joint_encoder_id)
            joint = AutoModel.from_pretrained(self.joint_encoder_id)
            sent_tok = AutoTokenizer.from_pretrained(self.sentence_encoder_id)
            sent = AutoModel.from_pretrained(self.sentence_encoder_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load pretrained models: {exc}") from exc
        for model in (det, joint, sent):
            model.to(self.device)
            model.eval()
        self._models = {
            "torch": torch,
            "det_proc": det_proc, "det": det,
            "joint_proc": joint_proc, "joint": joint,
            "sent_tok": sent_tok, "sent": sent,
        }

    def detect(self, rgb: np.ndarray):
        self.load()
        m = self._models
        torch = m["torch"]
        with torch.no_grad():
            inputs = m["det_proc"](images=rgb, return_tensors="pt").to(self.device)
            outputs = m["det"](**inputs)
            h, w = rgb.shape[:2]
            sizes = torch.tensor([[h, w]])
            # threshold 0 here; the pipeline applies the configured cutoff
            results = m["det_proc"].post_process_object_detection(
                outputs, threshold=0.0, target_sizes=sizes)[0]
        id2label = m["det"].config.id2label
        out = []
        for score, label, box in zip(results["scores"], results["labels"], results["boxes"]):
            x0, y0, x1, y1 = (float(v) for v in box)
            out.append(Detection(id2label[int(label)], float(score),
                                 x0, y0, x1 - x0, y1 - y0))
        return out

    def embed_image(self, rgb: np.ndarray) -> np.ndarray:
        self.load()
        m = self._models
        torch = m["torch"]
        with torch.no_grad():
            inputs = m["joint_proc"](images=rgb, return_tensors="pt").to(self.device)
            feats = m["joint"].get_image_features(**inputs)
        return feats[0].cpu().numpy().astype(np.float64)

    def embed_text(self, text: str) -> np.ndarray:
        self.load()
        m = self._models
        torch = m["torch"]
        with torch.no_grad():
            enc = m["sent_tok"](text, return_tensors="pt",
                                truncation=True, padding=True).to(self.device)
            hidden = m["sent"](**enc).last_hidden_state
            mask = enc["attention_mask"].unsqueeze(-1)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return pooled[0].cpu().numpy().astype(np.float64)

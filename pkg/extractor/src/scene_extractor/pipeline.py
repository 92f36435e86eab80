"""From an image and a caption to a scene-bundle JSON on disk.

The flow per image: decode, detect objects, keep detections with
confidence strictly above the configured threshold, clip boxes to the
image, crop each box (zero padding, recorded in provenance), embed the
whole image and every crop with the joint encoder, embed object names and
caption sentences with the sentence encoder, export the image as a
grayscale P5 next to the bundle, and write the bundle JSON.

When nothing clears the threshold the bundle is still written with an
empty object list (downstream validation rejects it), a UserWarning is
issued, and NoObjectsDetected is raised with the written path attached.
"""

import json
import math
import os
import re
import warnings
from pathlib import Path

import numpy as np

from .config import CROP_PADDING, ExtractorConfig
from .errors import ExtractorError, NoObjectsDetected
from .pgm import rgb_to_gray, write_grayscale_p5

TOOL_VERSION = "0.1.0"

_ID_SAFE = re.compile(r"[^A-Za-z0-9_-]+")
_SENTENCE_SPLIT = re.compile(r"[.!?;]+")


def split_sentences(caption: str) -> list:
    return [part.strip() for part in _SENTENCE_SPLIT.split(caption) if part.strip()]


def image_id_from_path(path) -> str:
    stem = _ID_SAFE.sub("_", Path(path).stem).strip("_")
    return stem or "image"


def sanitize_name(name: str) -> str:
    # bundle names may hold spaces but never commas or line breaks
    cleaned = " ".join(str(name).replace(",", " ").split())
    return cleaned or "object"


def load_rgb(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise ExtractorError(f"cannot decode image {path}: {exc}") from None


def _crop_indices(x, y, w, h, width, height):
    p = CROP_PADDING
    c0 = max(int(math.floor(x)) - p, 0)
    r0 = max(int(math.floor(y)) - p, 0)
    c1 = min(int(math.ceil(x + w)) + p, width)
    r1 = min(int(math.ceil(y + h)) + p, height)
    return r0, r1, c0, c1


def _vector(arr, what: str) -> list:
    vec = np.asarray(arr, dtype=np.float64).reshape(-1)
    if vec.size == 0 or not np.all(np.isfinite(vec)):
        raise ExtractorError(f"{what}: backend returned a non-finite or empty vector")
    return [float(v) for v in vec]


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_doc(doc: dict, path: Path) -> None:
    _atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def extract_bundle(image_path, caption: str, config: ExtractorConfig,
                   backend, image_id: str | None = None) -> Path:
    """Run the pipeline for one image; returns the written bundle path."""
    if not isinstance(caption, str) or not caption.strip():
        raise ValueError("caption must be a nonempty string")
    rgb = load_rgb(image_path)
    height, width = rgb.shape[:2]
    if image_id is None:
        image_id = image_id_from_path(image_path)

    out_dir = Path(config.output_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    pgm_rel = f"images/{image_id}.pgm"
    write_grayscale_p5(rgb_to_gray(rgb), out_dir / pgm_rel)
    bundle_path = out_dir / f"{image_id}.json"

    kept = []
    for det in backend.detect(rgb):
        if det.score <= config.detector_threshold:
            continue
        x0 = max(det.x, 0.0)
        y0 = max(det.y, 0.0)
        x1 = min(det.x + det.w, float(width))
        y1 = min(det.y + det.h, float(height))
        if x1 - x0 <= 0.0 or y1 - y0 <= 0.0:
            continue
        kept.append((det, (x0, y0, x1 - x0, y1 - y0)))

    image_embedding = _vector(backend.embed_image(rgb), "image_embedding")
    dim = len(image_embedding)
    sentence_vecs = [_vector(backend.embed_text(s), f"caption_sentence_embeddings[{i}]")
                     for i, s in enumerate(split_sentences(caption))]

    doc = {
        "image_id": image_id,
        "width": int(width),
        "height": int(height),
        "caption": caption,
        "embedding_dim": dim,
        "image_embedding": image_embedding,
        "image_path": pgm_rel,
        "caption_sentence_embeddings": sentence_vecs,
        "provenance": {
            "tool": f"scene-extractor {TOOL_VERSION}",
            "backend": backend.describe(),
            "detector_threshold": float(config.detector_threshold),
            "crop_padding": CROP_PADDING,
            "joint_encoder": config.joint_encoder,
            "sentence_encoder": config.sentence_encoder,
        },
        "objects": [],
    }

    if not kept:
        _write_doc(doc, bundle_path)
        warnings.warn(f"{image_id}: no detection above threshold "
                      f"{config.detector_threshold}; bundle will fail validation",
                      UserWarning, stacklevel=2)
        raise NoObjectsDetected(
            f"no objects detected in {image_path} above {config.detector_threshold}",
            bundle_path=bundle_path)

    text_dim = None
    for i, (det, box) in enumerate(kept):
        r0, r1, c0, c1 = _crop_indices(*box, width, height)
        crop = rgb[r0:r1, c0:c1]
        embedding = _vector(backend.embed_image(crop), f"objects[{i}].embedding")
        if len(embedding) != dim:
            raise ExtractorError(
                f"objects[{i}].embedding: joint encoder returned dim "
                f"{len(embedding)}, image has {dim}")
        name = sanitize_name(det.name)
        name_vec = _vector(backend.embed_text(name), f"objects[{i}].name_text_embedding")
        if text_dim is None:
            text_dim = len(name_vec)
        elif len(name_vec) != text_dim:
            raise ExtractorError(
                f"objects[{i}].name_text_embedding: sentence encoder "
                f"returned dim {len(name_vec)}, expected {text_dim}")
        doc["objects"].append({
            "object_id": f"obj_{i}",
            "name": name,
            "bbox": {"x": box[0], "y": box[1], "w": box[2], "h": box[3]},
            "embedding": embedding,
            "name_text_embedding": name_vec,
        })
    for i, vec in enumerate(sentence_vecs):
        if text_dim is not None and len(vec) != text_dim:
            raise ExtractorError(
                f"caption_sentence_embeddings[{i}]: dim {len(vec)}, "
                f"names use {text_dim}")

    _write_doc(doc, bundle_path)
    return bundle_path


def extract_batch(items, config: ExtractorConfig, backend) -> Path:
    """Process (image_path, caption) pairs; returns the manifest path.

    Per-image failures (undecodable input, nothing detected) are recorded
    in the manifest and do not stop the batch.  ModelLoadError propagates:
    if the models cannot load, nothing else can succeed.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundles = []
    failures = []
    seen = {}
    for image_path, caption in items:
        image_id = image_id_from_path(image_path)
        n = seen.get(image_id, 0)
        seen[image_id] = n + 1
        if n:
            image_id = f"{image_id}_{n + 1}"
        try:
            path = extract_bundle(image_path, caption, config, backend,
                                  image_id=image_id)
            bundles.append(path.name)
        except NoObjectsDetected as exc:
            failures.append({"image": str(image_path), "error": str(exc),
                             "bundle": exc.bundle_path.name})
        except (ExtractorError, ValueError) as exc:
            failures.append({"image": str(image_path), "error": str(exc)})
    manifest = {
        "tool": f"scene-extractor {TOOL_VERSION}",
        "detector_threshold": float(config.detector_threshold),
        "joint_encoder": config.joint_encoder,
        "sentence_encoder": config.sentence_encoder,
        "backend": backend.describe(),
        "bundles": bundles,
        "failures": failures,
    }
    manifest_path = out_dir / "manifest.json"
    _write_doc(manifest, manifest_path)
    return manifest_path

"""Reading and writing of scene bundles, fixation logs and metric tables.

A scene bundle is a single JSON document describing one captioned image:
identifiers, pixel dimensions, the caption, an image embedding, and one
entry per annotated object (id, name, box, embedding, optional name text
embedding).  Reading is strict about structure and lenient about extras:
unknown keys produce warnings, never errors, so bundles written by newer
producers keep loading.

Fixation logs and metric tables are plain headed CSV.  Floats are
written with repr-exact precision (%.17g) so a write/read round trip is
value identical; missing metric values serialize as empty fields.
"""

import json
import math
import os
import re
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BadHeader,
    BadRow,
    DimensionMismatch,
    DuplicateKey,
    IoError,
    ParseError,
    SchemaError,
)
from .geometry import BBox, DegenerateBox, ImageDims, clip_to_image
from .records import METRIC_COLUMNS, FixationRecord, MetricRow, ObjectRecord, SceneBundle

ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")

_KNOWN_TOP_KEYS = {
    "image_id", "width", "height", "caption", "embedding_dim",
    "image_embedding", "objects", "caption_sentence_embeddings",
    "image_path", "provenance",
}
_KNOWN_OBJECT_KEYS = {"object_id", "name", "bbox", "embedding", "name_text_embedding"}
_KNOWN_BBOX_KEYS = {"x", "y", "w", "h"}


@dataclass
class ValidationReport:
    """Everything wrong (errors) or suspicious (warnings) about a bundle.

    Each entry is a (path, message) pair where path points into the
    document, e.g. "objects[2].embedding".
    """
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> str:
        lines = []
        for path, msg in self.errors:
            lines.append(f"error: {path}: {msg}")
        for path, msg in self.warnings:
            lines.append(f"warning: {path}: {msg}")
        if not lines:
            lines.append("ok")
        return "\n".join(lines)


class _Collector:
    """Sink for validation findings; either raises on the first error or
    accumulates all of them into a ValidationReport."""

    def __init__(self, fail_fast: bool):
        self.fail_fast = fail_fast
        self.report = ValidationReport()

    def error(self, path: str, message: str, exc_cls=SchemaError) -> None:
        if self.fail_fast:
            raise exc_cls(f"{path}: {message}")
        self.report.errors.append((path, message))

    def warn(self, path: str, message: str) -> None:
        if self.fail_fast:
            warnings.warn(f"{path}: {message}", stacklevel=3)
        else:
            self.report.warnings.append((path, message))


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _check_vector(value, path: str, expected_dim: Optional[int], col: _Collector):
    """Validate one embedding list; returns the array or None on failure."""
    if not isinstance(value, list):
        col.error(path, f"expected a list of numbers, got {type(value).__name__}")
        return None
    if expected_dim is not None and len(value) != expected_dim:
        col.error(path, f"has {len(value)} values, expected {expected_dim}",
                  exc_cls=DimensionMismatch)
        return None
    bad = [i for i, v in enumerate(value)
           if not _is_number(v) or not math.isfinite(v)]
    if bad:
        col.error(path, f"value at index {bad[0]} is not a finite number")
        return None
    if len(value) == 0:
        col.error(path, "is empty")
        return None
    return np.asarray(value, dtype=np.float64)


def _check_id(value, path: str, col: _Collector) -> Optional[str]:
    if not isinstance(value, str):
        col.error(path, f"expected a string, got {type(value).__name__}")
        return None
    if not ID_PATTERN.match(value):
        col.error(path, f"{value!r} does not match [A-Za-z0-9_-]+")
        return None
    return value


def _walk_bundle(doc, col: _Collector, base_dir: Optional[str]) -> Optional[SceneBundle]:
    if not isinstance(doc, dict):
        col.error("$", f"bundle root must be a JSON object, got {type(doc).__name__}")
        return None

    for key in sorted(set(doc) - _KNOWN_TOP_KEYS):
        col.warn(key, "unknown key ignored")

    image_id = None
    if "image_id" not in doc:
        col.error("image_id", "missing")
    else:
        image_id = _check_id(doc["image_id"], "image_id", col)

    dims = None
    size = {}
    for key in ("width", "height"):
        if key not in doc:
            col.error(key, "missing")
        elif not _is_int(doc[key]) or doc[key] < 1:
            col.error(key, f"must be an integer >= 1, got {doc[key]!r}")
        else:
            size[key] = doc[key]
    if len(size) == 2:
        dims = ImageDims(size["width"], size["height"])

    caption = ""
    if "caption" not in doc:
        col.error("caption", "missing")
    elif not isinstance(doc["caption"], str):
        col.error("caption", f"expected a string, got {type(doc['caption']).__name__}")
    else:
        caption = doc["caption"]

    embedding_dim = None
    if "embedding_dim" not in doc:
        col.error("embedding_dim", "missing")
    elif not _is_int(doc["embedding_dim"]) or doc["embedding_dim"] < 1:
        col.error("embedding_dim", f"must be an integer >= 1, got {doc['embedding_dim']!r}")
    else:
        embedding_dim = doc["embedding_dim"]

    image_embedding = None
    if "image_embedding" not in doc:
        col.error("image_embedding", "missing")
    else:
        image_embedding = _check_vector(doc["image_embedding"], "image_embedding",
                                        embedding_dim, col)

    text_dim = None          # all text embeddings must agree among themselves
    text_dim_path = None

    def check_text_vector(value, path):
        nonlocal text_dim, text_dim_path
        vec = _check_vector(value, path, None, col)
        if vec is None:
            return None
        if text_dim is None:
            text_dim = vec.shape[0]
            text_dim_path = path
            return vec
        if vec.shape[0] != text_dim:
            col.error(path, f"has {vec.shape[0]} values but {text_dim_path} has {text_dim}; "
                            "text embeddings must share one dimension",
                      exc_cls=DimensionMismatch)
            return None
        return vec

    objects = []
    seen_ids = {}
    if "objects" not in doc:
        col.error("objects", "missing")
    elif not isinstance(doc["objects"], list):
        col.error("objects", f"expected a list, got {type(doc['objects']).__name__}")
    elif len(doc["objects"]) == 0:
        col.error("objects", "must contain at least one object")
    else:
        for i, entry in enumerate(doc["objects"]):
            prefix = f"objects[{i}]"
            if not isinstance(entry, dict):
                col.error(prefix, f"expected an object, got {type(entry).__name__}")
                continue
            for key in sorted(set(entry) - _KNOWN_OBJECT_KEYS):
                col.warn(f"{prefix}.{key}", "unknown key ignored")

            object_id = None
            if "object_id" not in entry:
                col.error(f"{prefix}.object_id", "missing")
            else:
                object_id = _check_id(entry["object_id"], f"{prefix}.object_id", col)
            if object_id is not None:
                if object_id in seen_ids:
                    col.error(f"{prefix}.object_id",
                              f"{object_id!r} already used by objects[{seen_ids[object_id]}]")
                    object_id = None
                else:
                    seen_ids[object_id] = i

            name = None
            if "name" not in entry:
                col.error(f"{prefix}.name", "missing")
            elif not isinstance(entry["name"], str) or not entry["name"].strip():
                col.error(f"{prefix}.name", "must be a nonempty string")
            elif any(c in entry["name"] for c in ",\n\r"):
                col.error(f"{prefix}.name", "must not contain commas or line breaks")
            else:
                name = entry["name"]

            bbox = None
            if "bbox" not in entry:
                col.error(f"{prefix}.bbox", "missing")
            elif not isinstance(entry["bbox"], dict):
                col.error(f"{prefix}.bbox", "expected an object with x, y, w, h")
            else:
                raw = entry["bbox"]
                for key in sorted(set(raw) - _KNOWN_BBOX_KEYS):
                    col.warn(f"{prefix}.bbox.{key}", "unknown key ignored")
                vals = {}
                for key in ("x", "y", "w", "h"):
                    if key not in raw:
                        col.error(f"{prefix}.bbox.{key}", "missing")
                    elif not _is_number(raw[key]) or not math.isfinite(raw[key]):
                        col.error(f"{prefix}.bbox.{key}", f"must be a finite number, got {raw[key]!r}")
                    else:
                        vals[key] = float(raw[key])
                if len(vals) == 4:
                    if vals["w"] <= 0 or vals["h"] <= 0:
                        col.error(f"{prefix}.bbox", f"width and height must be positive, "
                                                    f"got w={vals['w']}, h={vals['h']}")
                    else:
                        bbox = BBox(vals["x"], vals["y"], vals["w"], vals["h"])

            if bbox is not None and dims is not None:
                inside = (bbox.x >= 0 and bbox.y >= 0 and
                          bbox.x + bbox.w <= dims.width and bbox.y + bbox.h <= dims.height)
                try:
                    clipped = clip_to_image(bbox, dims)
                except DegenerateBox:
                    col.error(f"{prefix}.bbox", "lies entirely outside the image")
                    bbox = None
                else:
                    if not inside:
                        col.warn(f"{prefix}.bbox", "extends past the image edge; clipped")
                    bbox = clipped

            embedding = None
            if "embedding" not in entry:
                col.error(f"{prefix}.embedding", "missing")
            else:
                embedding = _check_vector(entry["embedding"], f"{prefix}.embedding",
                                          embedding_dim, col)

            name_text_embedding = None
            if "name_text_embedding" in entry and entry["name_text_embedding"] is not None:
                name_text_embedding = check_text_vector(
                    entry["name_text_embedding"], f"{prefix}.name_text_embedding")

            if None not in (object_id, name, bbox) and embedding is not None:
                objects.append(ObjectRecord(
                    object_id=object_id, name=name, bbox=bbox,
                    embedding=embedding, name_text_embedding=name_text_embedding,
                ))

    sentence_embeddings = None
    if "caption_sentence_embeddings" in doc and doc["caption_sentence_embeddings"] is not None:
        raw = doc["caption_sentence_embeddings"]
        if not isinstance(raw, list):
            col.error("caption_sentence_embeddings",
                      f"expected a list of vectors, got {type(raw).__name__}")
        else:
            sentence_embeddings = []
            for i, value in enumerate(raw):
                vec = check_text_vector(value, f"caption_sentence_embeddings[{i}]")
                if vec is not None:
                    sentence_embeddings.append(vec)

    image_path = None
    if "image_path" in doc and doc["image_path"] is not None:
        if not isinstance(doc["image_path"], str) or not doc["image_path"]:
            col.error("image_path", "must be a nonempty string when present")
        else:
            image_path = doc["image_path"]
            if base_dir is not None and not os.path.isabs(image_path):
                image_path = os.path.join(base_dir, image_path)

    provenance = None
    if "provenance" in doc and doc["provenance"] is not None:
        if not isinstance(doc["provenance"], dict):
            col.error("provenance", "must be an object when present")
        else:
            provenance = doc["provenance"]

    if col.report.errors:
        return None
    if image_id is None or dims is None or embedding_dim is None or image_embedding is None:
        return None
    if not objects:
        return None
    return SceneBundle(
        image_id=image_id, dims=dims, caption=caption,
        embedding_dim=embedding_dim, image_embedding=image_embedding,
        objects=objects, caption_sentence_embeddings=sentence_embeddings,
        image_path=image_path, provenance=provenance,
    )


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def read_bundle(path: str) -> SceneBundle:
    """Load and validate a scene bundle, failing on the first defect.

    Relative image_path entries resolve against the bundle's directory.
    Boxes that poke past the image edge are clipped with a warning; boxes
    entirely outside, wrong-length embeddings, duplicate or ill-formed
    ids, and missing fields are errors.
    """
    doc = _load_json(path)
    col = _Collector(fail_fast=True)
    bundle = _walk_bundle(doc, col, base_dir=os.path.dirname(os.path.abspath(path)))
    if bundle is None:
        # fail-fast mode raises at the first error, so reaching here means
        # construction failed without a recorded defect; treat as schema rot
        raise SchemaError(f"{path}: bundle could not be constructed")
    return bundle


def validate_bundle(path: str) -> ValidationReport:
    """Like read_bundle but exhaustive: every defect becomes a report entry.

    Never raises for data problems; an unreadable or syntactically broken
    file yields a report with a single error entry.
    """
    try:
        doc = _load_json(path)
    except (IoError, ParseError) as exc:
        report = ValidationReport()
        report.errors.append(("$", str(exc)))
        return report
    col = _Collector(fail_fast=False)
    _walk_bundle(doc, col, base_dir=os.path.dirname(os.path.abspath(path)))
    return col.report


def write_bundle(bundle: SceneBundle, path: str) -> None:
    """Serialize a bundle to JSON; reading it back yields equal values.

    Floats rely on shortest round-trip decimal printing, optionals are
    omitted when absent, and key order is fixed so identical bundles
    produce identical bytes.
    """
    doc = {
        "image_id": bundle.image_id,
        "width": bundle.dims.width,
        "height": bundle.dims.height,
        "caption": bundle.caption,
        "embedding_dim": bundle.embedding_dim,
        "image_embedding": [float(v) for v in bundle.image_embedding],
        "objects": [],
    }
    for obj in bundle.objects:
        entry = {
            "object_id": obj.object_id,
            "name": obj.name,
            "bbox": {"x": float(obj.bbox.x), "y": float(obj.bbox.y),
                     "w": float(obj.bbox.w), "h": float(obj.bbox.h)},
            "embedding": [float(v) for v in obj.embedding],
        }
        if obj.name_text_embedding is not None:
            entry["name_text_embedding"] = [float(v) for v in obj.name_text_embedding]
        doc["objects"].append(entry)
    if bundle.caption_sentence_embeddings is not None:
        doc["caption_sentence_embeddings"] = [
            [float(v) for v in vec] for vec in bundle.caption_sentence_embeddings
        ]
    if bundle.image_path is not None:
        doc["image_path"] = bundle.image_path
    if bundle.provenance is not None:
        doc["provenance"] = bundle.provenance
    text = json.dumps(doc, indent=1, allow_nan=False, sort_keys=False)
    _write_text_atomic(path, text + "\n")


# --- fixation CSV ---

FIXATION_HEADER = "image_id,object_id,participant,total_duration_ms,fixation_count"


def read_fixations(path: str) -> list:
    """Parse a fixation log; one row per (image, object, participant).

    Strict: exact header, id-grammar fields, nonnegative finite duration,
    nonnegative integer count, and no duplicated key triple.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise BadHeader(f"{path}: empty file, expected header {FIXATION_HEADER!r}")
    if lines[0] != FIXATION_HEADER:
        raise BadHeader(f"{path}: header {lines[0]!r} != {FIXATION_HEADER!r}")
    records = []
    seen = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise BadRow(lineno, f"expected 5 fields, got {len(parts)}")
        image_id, object_id, participant, dur_s, cnt_s = parts
        for label, value in (("image_id", image_id), ("object_id", object_id),
                             ("participant", participant)):
            if not ID_PATTERN.match(value):
                raise BadRow(lineno, f"{label} {value!r} does not match [A-Za-z0-9_-]+")
        try:
            duration = float(dur_s)
        except ValueError:
            raise BadRow(lineno, f"total_duration_ms {dur_s!r} is not a number") from None
        if not math.isfinite(duration) or duration < 0:
            raise BadRow(lineno, f"total_duration_ms must be finite and >= 0, got {dur_s}")
        try:
            count = int(cnt_s)
        except ValueError:
            raise BadRow(lineno, f"fixation_count {cnt_s!r} is not an integer") from None
        if count < 0:
            raise BadRow(lineno, f"fixation_count must be >= 0, got {count}")
        key = (image_id, object_id, participant)
        if key in seen:
            raise DuplicateKey(lineno, f"key {key!r} already seen on line {seen[key]}")
        seen[key] = lineno
        records.append(FixationRecord(image_id=image_id, object_id=object_id,
                                      participant=participant,
                                      total_duration_ms=duration,
                                      fixation_count=count))
    return records


def write_fixations(records: list, path: str) -> None:
    lines = [FIXATION_HEADER]
    for r in records:
        lines.append(f"{r.image_id},{r.object_id},{r.participant},"
                     f"{format(r.total_duration_ms, '.17g')},{r.fixation_count}")
    _write_text_atomic(path, "\n".join(lines) + "\n")


# --- metric table CSV ---

METRIC_TABLE_HEADER = (
    "image_id", "object_id", "name",
    *METRIC_COLUMNS,
    "proportion", "saliency", "position",
)

_FLOAT_FIELDS = set(METRIC_COLUMNS) | {"proportion", "saliency"}


def _fmt_opt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(value, ".17g")


def write_metric_table(rows: list, path: str) -> None:
    """Write metric rows as CSV in the fixed 14-column order.

    Names may contain spaces but not commas or line breaks; ids obey the
    id grammar, so no field ever needs quoting.
    """
    lines = [",".join(METRIC_TABLE_HEADER)]
    for r in rows:
        if any(c in r.name for c in ",\n\r"):
            raise ValueError(f"object name {r.name!r} contains a comma or line break")
        fields = [r.image_id, r.object_id, r.name]
        for column in METRIC_COLUMNS:
            fields.append(_fmt_opt(getattr(r, column)))
        fields.append(format(r.proportion, ".17g"))
        fields.append(_fmt_opt(r.saliency))
        fields.append(r.position)
        lines.append(",".join(fields))
    _write_text_atomic(path, "\n".join(lines) + "\n")


def read_metric_table(path: str) -> list:
    """Parse a metric CSV back into rows; exact header, empty = missing."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise BadHeader(f"{path}: empty file")
    header = lines[0].split(",")
    expected = list(METRIC_TABLE_HEADER)
    if header != expected:
        extra = [c for c in header if c not in expected]
        missing = [c for c in expected if c not in header]
        detail = []
        if extra:
            detail.append(f"unknown column(s) {extra}")
        if missing:
            detail.append(f"missing column(s) {missing}")
        if not detail:
            detail.append("columns are out of order")
        raise ParseError(f"{path}: bad header: " + "; ".join(detail))
    rows = []
    from .geometry import ALL_POSITIONS
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(expected):
            raise BadRow(lineno, f"expected {len(expected)} fields, got {len(parts)}")
        values = dict(zip(expected, parts))
        kwargs = {"image_id": values["image_id"], "object_id": values["object_id"],
                  "name": values["name"]}
        for label in ("image_id", "object_id"):
            if not ID_PATTERN.match(values[label]):
                raise BadRow(lineno, f"{label} {values[label]!r} does not match [A-Za-z0-9_-]+")
        for column in _FLOAT_FIELDS:
            text = values[column]
            if text == "":
                if column == "proportion":
                    raise BadRow(lineno, "proportion must not be empty")
                kwargs[column] = None
                continue
            try:
                kwargs[column] = float(text)
            except ValueError:
                raise BadRow(lineno, f"{column} {text!r} is not a number") from None
        if values["position"] not in ALL_POSITIONS:
            raise BadRow(lineno, f"position {values['position']!r} is not one of the nine labels")
        kwargs["position"] = values["position"]
        rows.append(MetricRow(**kwargs))
    return rows


def _write_text_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    tmp = os.path.join(directory, f".{os.path.basename(path)}.tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise IoError(f"cannot write {path}: {exc}") from exc

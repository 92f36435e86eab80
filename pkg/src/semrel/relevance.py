"""Contextual relevance metrics for captioned scenes.

Eight per-object scores relate an annotated object to the rest of its
scene.  Three are visual (embedding similarities against the image and
the neighboring objects), three are language-side (caption sentences and
neighbor names through a word-vector store), and two are sums bridging
the two channels.  Every metric is either a float or missing (None);
missingness propagates through sums and is never silently replaced by
zero.  The only zeros produced are genuine empty-neighborhood sums.
"""

import re
from typing import Optional

from .errors import UnknownObject, ZeroVector
from .geometry import is_adjacent, position, proportion
from .lexicon import WordVectorStore, fallback_sentence_embedding, lookup_name
from .records import (
    ADJACENT_OVERLAP,
    ALL_OTHERS,
    METRIC_COLUMNS,
    MetricRow,
    MetricTable,
    ObjectRecord,
    POLICIES,
    SceneBundle,
)
from .saliency import SRParams, load_gray, object_saliency, spectral_residual
from .vecmath import cosine, l2_norm

_SENTENCE_SPLIT = re.compile(r"[.!?;]+")


def _bump(diag: Optional[dict], key: str, amount: int = 1) -> None:
    if diag is not None:
        diag[key] = diag.get(key, 0) + amount


def _check_policy(policy: str) -> None:
    if policy not in POLICIES:
        raise ValueError(f"unknown neighborhood policy {policy!r}; expected one of {POLICIES}")


def split_sentences(caption: str) -> list:
    """Split a caption into sentences on ., !, ? and ;, dropping empties."""
    return [part.strip() for part in _SENTENCE_SPLIT.split(caption) if part.strip()]


def neighbors(scene: SceneBundle, target_id: str, policy: str) -> list:
    """Objects in the scene that count as context for the target.

    "adjacent" keeps only objects whose boxes overlap the target box with
    strictly positive area; "all" keeps every other object.  Order follows
    the bundle.  The target itself is never included, even if another
    object carries an identical box.
    """
    _check_policy(policy)
    target = scene.object_by_id(target_id)
    if target is None:
        raise UnknownObject(f"object id {target_id!r} not present in scene {scene.image_id!r}")
    out = []
    for obj in scene.objects:
        if obj.object_id == target_id:
            continue
        if policy == ADJACENT_OVERLAP and not is_adjacent(target.bbox, obj.bbox):
            continue
        out.append(obj)
    return out


def obj_image_vissim(obj: ObjectRecord, scene: SceneBundle, diag: Optional[dict] = None) -> Optional[float]:
    """Cosine similarity between the object crop embedding and the whole image."""
    try:
        return cosine(obj.embedding, scene.image_embedding)
    except ZeroVector:
        _bump(diag, "zero_norm_image_pairs")
        return None


def objs_vissim(
    obj: ObjectRecord,
    scene: SceneBundle,
    policy: str = ADJACENT_OVERLAP,
    include_image_term: bool = False,
    diag: Optional[dict] = None,
) -> Optional[float]:
    """Summed visual similarity of the object to its scene neighbors.

    A zero-norm target embedding makes the value missing.  Zero-norm
    neighbors are skipped and counted; an empty usable neighborhood sums
    to 0.0.  With include_image_term=True the whole-image similarity is
    folded into the same sum, a documented reading variant kept for
    audits; the image embedding is then treated like one more neighbor.
    """
    if l2_norm(obj.embedding) == 0.0:
        _bump(diag, "zero_norm_targets")
        return None
    total = 0.0
    for other in neighbors(scene, obj.object_id, policy):
        try:
            total += cosine(obj.embedding, other.embedding)
        except ZeroVector:
            _bump(diag, "zero_norm_vision_neighbors")
    if include_image_term:
        try:
            total += cosine(obj.embedding, scene.image_embedding)
        except ZeroVector:
            _bump(diag, "zero_norm_vision_neighbors")
    return total


def _name_embedding(obj: ObjectRecord, store: Optional[WordVectorStore]):
    if obj.name_text_embedding is not None:
        return obj.name_text_embedding
    if store is None:
        return None
    return fallback_sentence_embedding(store, obj.name)


def _sentence_embeddings(scene: SceneBundle, store: Optional[WordVectorStore]) -> list:
    if scene.caption_sentence_embeddings is not None:
        return list(scene.caption_sentence_embeddings)
    if store is None:
        return []
    out = []
    for sentence in split_sentences(scene.caption):
        vec = fallback_sentence_embedding(store, sentence)
        if vec is not None:
            out.append(vec)
    return out


def sent_semsim(
    obj: ObjectRecord,
    scene: SceneBundle,
    store: Optional[WordVectorStore] = None,
    diag: Optional[dict] = None,
) -> Optional[float]:
    """Best cosine match between the object name and any caption sentence.

    The name embedding comes from the bundle when provided, otherwise it
    is rebuilt from the word-vector store.  Missing when no name
    embedding exists, when the caption yields no usable sentence, or when
    every candidate pair degenerates to a zero norm.
    """
    name_vec = _name_embedding(obj, store)
    if name_vec is None:
        _bump(diag, "missing_name_embeddings")
        return None
    if l2_norm(name_vec) == 0.0:
        _bump(diag, "zero_norm_name_embeddings")
        return None
    best = None
    for sent_vec in _sentence_embeddings(scene, store):
        try:
            score = cosine(name_vec, sent_vec)
        except ZeroVector:
            _bump(diag, "zero_norm_sentence_embeddings")
            continue
        if best is None or score > best:
            best = score
    if best is None:
        _bump(diag, "captions_without_usable_sentences")
    return best


def _summed_name_similarity(
    obj: ObjectRecord,
    scene: SceneBundle,
    store: WordVectorStore,
    policy: str,
    diag: Optional[dict],
    miss_target_key: str,
    miss_neighbor_key: str,
) -> Optional[float]:
    target_vec = lookup_name(store, obj.name)
    if target_vec is None:
        _bump(diag, miss_target_key)
        return None
    if l2_norm(target_vec) == 0.0:
        _bump(diag, miss_target_key)
        return None
    total = 0.0
    for other in neighbors(scene, obj.object_id, policy):
        other_vec = lookup_name(store, other.name)
        if other_vec is None:
            _bump(diag, miss_neighbor_key)
            continue
        try:
            total += cosine(target_vec, other_vec)
        except ZeroVector:
            _bump(diag, miss_neighbor_key)
    return total


def words_semsim(
    obj: ObjectRecord,
    scene: SceneBundle,
    store: WordVectorStore,
    policy: str = ALL_OTHERS,
    diag: Optional[dict] = None,
) -> Optional[float]:
    """Summed name-to-name similarity against the language neighborhood.

    Missing when the target name is out of vocabulary; out-of-vocabulary
    neighbors are skipped and counted.  An empty usable neighborhood sums
    to 0.0, which is a real value, not a stand-in for missing.
    """
    return _summed_name_similarity(
        obj, scene, store, policy, diag,
        "oov_word_targets", "oov_word_neighbors",
    )


def concepts_semsim(
    obj: ObjectRecord,
    scene: SceneBundle,
    concept_store: WordVectorStore,
    policy: str = ALL_OTHERS,
    diag: Optional[dict] = None,
) -> Optional[float]:
    """words_semsim computed against an alternate vector store."""
    return _summed_name_similarity(
        obj, scene, concept_store, policy, diag,
        "oov_concept_targets", "oov_concept_neighbors",
    )


def _maybe_sum(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return a + b


def compute_metric_row(
    obj: ObjectRecord,
    scene: SceneBundle,
    store: Optional[WordVectorStore] = None,
    concept_store: Optional[WordVectorStore] = None,
    vision_policy: str = ADJACENT_OVERLAP,
    language_policy: str = ALL_OTHERS,
    include_image_term: bool = False,
    saliency_value: Optional[float] = None,
    diag: Optional[dict] = None,
) -> MetricRow:
    """All eight metrics plus control predictors for one object.

    The three sum metrics are assembled from the parts computed here, in
    this call, so the identities overall_vissim == obj_image_vissim +
    objs_vissim (and the two semantic sums) hold exactly whenever the
    parts are present.
    """
    v_img = obj_image_vissim(obj, scene, diag=diag)
    v_objs = objs_vissim(obj, scene, policy=vision_policy,
                         include_image_term=include_image_term, diag=diag)
    s_sent = sent_semsim(obj, scene, store, diag=diag)
    s_words = words_semsim(obj, scene, store, policy=language_policy, diag=diag) if store is not None else None
    s_concepts = (concepts_semsim(obj, scene, concept_store, policy=language_policy, diag=diag)
                  if concept_store is not None else None)
    overall_sem = _maybe_sum(s_sent, s_words)
    row = MetricRow(
        image_id=scene.image_id,
        object_id=obj.object_id,
        name=obj.name,
        obj_image_vissim=v_img,
        objs_vissim=v_objs,
        overall_vissim=_maybe_sum(v_img, v_objs),
        sent_semsim=s_sent,
        words_semsim=s_words,
        concepts_semsim=s_concepts,
        overall_semsim=overall_sem,
        sum_vissem_sim=_maybe_sum(overall_sem, v_img),
        proportion=proportion(obj.bbox, scene.dims),
        saliency=saliency_value,
        position=position(obj.bbox, scene.dims),
    )
    for column in METRIC_COLUMNS:
        if getattr(row, column) is None:
            _bump(diag, f"missing_{column}")
    return row


def compute_metric_table(
    scene: SceneBundle,
    store: Optional[WordVectorStore] = None,
    concept_store: Optional[WordVectorStore] = None,
    vision_policy: str = ADJACENT_OVERLAP,
    language_policy: str = ALL_OTHERS,
    include_image_term: bool = False,
    sr_params: Optional[SRParams] = None,
    saliency_reduce: str = "mean",
) -> MetricTable:
    """Metric rows for every object in the scene, in bundle order.

    Saliency is filled only when the bundle references an image file; the
    file's dimensions must agree with the bundle's declared dimensions.
    Diagnostics count every skip and missing value encountered.
    """
    _check_policy(vision_policy)
    _check_policy(language_policy)
    if not scene.objects:
        raise UnknownObject(f"scene {scene.image_id!r} has no objects")
    smap = None
    if scene.image_path is not None:
        img = load_gray(scene.image_path)
        if (img.width, img.height) != (scene.dims.width, scene.dims.height):
            raise ValueError(
                f"image file is {img.width}x{img.height} but bundle declares "
                f"{scene.dims.width}x{scene.dims.height}"
            )
        smap = spectral_residual(img, sr_params if sr_params is not None else SRParams())
    diag: dict = {}
    rows = []
    for obj in scene.objects:
        sal = None
        if smap is not None:
            sal = object_saliency(smap, obj.bbox, reduce=saliency_reduce)
            if sal is None:
                _bump(diag, "boxes_without_pixels")
        rows.append(compute_metric_row(
            obj, scene, store=store, concept_store=concept_store,
            vision_policy=vision_policy, language_policy=language_policy,
            include_image_term=include_image_term,
            saliency_value=sal, diag=diag,
        ))
    metadata = {
        "vision_policy": vision_policy,
        "language_policy": language_policy,
        "include_image_term": include_image_term,
        "saliency_reduce": saliency_reduce,
        "saliency_source": scene.image_path,
    }
    return MetricTable(rows=rows, diagnostics=diag, metadata=metadata)

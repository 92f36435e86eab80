import numpy as np
import pytest

from semrel.geometry import BBox, ImageDims
from semrel.lexicon import WordVectorStore
from semrel.records import ObjectRecord, SceneBundle


@pytest.fixture
def tiny_store():
    entries = {
        "dog": np.array([1.0, 0.0, 0.0]),
        "cat": np.array([0.9, 0.1, 0.0]),
        "ball": np.array([0.0, 1.0, 0.0]),
        "red": np.array([0.0, 0.0, 1.0]),
        "a": np.array([0.1, 0.1, 0.8]),
    }
    return WordVectorStore(3, entries, len(entries))


def make_scene(objects=None, caption="A dog chases a ball. The cat sleeps.",
               image_embedding=None, dims=(64, 48), sentence_embeddings=None,
               image_path=None):
    if objects is None:
        objects = [
            ObjectRecord("obj_0", "dog", BBox(2, 2, 20, 20),
                         np.array([1.0, 0.8, 0.1, 0.0])),
            ObjectRecord("obj_1", "ball", BBox(15, 10, 12, 12),
                         np.array([0.2, 1.0, 0.0, 0.3])),
            ObjectRecord("obj_2", "cat", BBox(40, 30, 20, 16),
                         np.array([0.9, 0.7, 0.2, 0.1])),
        ]
    if image_embedding is None:
        image_embedding = np.array([1.0, 1.0, 0.0, 0.0])
    return SceneBundle(
        image_id="img_a", dims=ImageDims(*dims), caption=caption,
        embedding_dim=image_embedding.shape[0], image_embedding=image_embedding,
        objects=objects, caption_sentence_embeddings=sentence_embeddings,
        image_path=image_path,
    )


@pytest.fixture
def scene():
    return make_scene()

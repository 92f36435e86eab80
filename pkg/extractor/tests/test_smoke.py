"""Ten generated scenes through the whole pipeline, gated by the
downstream validator: every emitted bundle must come back clean."""

import json
import subprocess
import sys

import pytest

from scene_extractor import ExtractorConfig, SyntheticBackend, extract_batch

from conftest import paint_scene

SCENES = [
    ("street", (0,), (96, 64), "A person waits. A car passes."),
    ("park", (1, 2), (128, 96), "A dog chases a ball."),
    ("yard", (3,), (64, 64), "A car in the driveway."),
    ("field", (0, 3), (120, 80), "A person throws; a dog runs."),
    ("court", (1,), (96, 96), "Someone serves a ball!"),
    ("garage", (2, 3), (160, 96), "A ball sits near a car."),
    ("porch", (0, 1), (96, 48), "A person and a dog rest."),
    ("lot", (2,), (80, 64), "One ball, nothing else?"),
    ("lane", (1, 3), (112, 64), "A dog follows a car."),
    ("plaza", (0, 2), (144, 96), "A person walks. A ball rolls. A dog barks."),
]


@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("smoke")
    items = []
    for name, quads, size, caption in SCENES:
        items.append((paint_scene(root / f"{name}.png", quads, size=size), caption))
    config = ExtractorConfig(output_dir=root / "out")
    manifest_path = extract_batch(items, config, SyntheticBackend())
    return config.output_dir, json.loads(manifest_path.read_text())


def test_all_ten_images_produced_bundles(smoke_run):
    _, manifest = smoke_run
    assert manifest["failures"] == []
    assert len(manifest["bundles"]) == 10
    assert manifest["bundles"] == [f"{name}.json" for name, *_ in SCENES]


def test_every_bundle_validates_clean(smoke_run, capsys):
    out_dir, manifest = smoke_run
    failures = []
    for name in manifest["bundles"]:
        result = subprocess.run(
            [sys.executable, "-m", "semrel.cli", "validate",
             "--bundle", str(out_dir / name)],
            capture_output=True, text=True)
        if result.returncode != 0 or result.stdout.strip() != "ok":
            failures.append((name, result.stdout, result.stderr))
    with capsys.disabled():
        print(f"[{'FAIL' if failures else 'PASS'}] 10-image smoke set: "
              f"{10 - len(failures)}/10 bundles validate clean", flush=True)
    assert failures == []


def test_embedding_dims_uniform_in_every_bundle(smoke_run):
    out_dir, manifest = smoke_run
    for name in manifest["bundles"]:
        doc = json.loads((out_dir / name).read_text())
        dim = doc["embedding_dim"]
        assert len(doc["image_embedding"]) == dim
        assert all(len(o["embedding"]) == dim for o in doc["objects"])
        text_dims = {len(o["name_text_embedding"]) for o in doc["objects"]}
        text_dims |= {len(v) for v in doc["caption_sentence_embeddings"]}
        assert len(text_dims) == 1


def test_object_ids_are_indexed(smoke_run):
    out_dir, manifest = smoke_run
    for name in manifest["bundles"]:
        doc = json.loads((out_dir / name).read_text())
        assert [o["object_id"] for o in doc["objects"]] == \
            [f"obj_{i}" for i in range(len(doc["objects"]))]


def test_p5_exports_exist_and_match_dims(smoke_run):
    out_dir, manifest = smoke_run
    for name in manifest["bundles"]:
        doc = json.loads((out_dir / name).read_text())
        data = (out_dir / doc["image_path"]).read_bytes()
        header = b"P5\n%d %d\n255\n" % (doc["width"], doc["height"])
        assert data.startswith(header)
        assert len(data) == len(header) + doc["width"] * doc["height"]

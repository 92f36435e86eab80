"""Acceptance gate: one test per headline criterion.

Each test times its own body, enforces the stated tolerance, and prints
a single PASS/FAIL line straight to the real stdout so the result is
visible even under pytest's capture.
"""

import dataclasses
import json
import math
import sys
import time

import numpy as np
import pytest

from semrel.bundleio import (
    read_bundle,
    read_fixations,
    read_metric_table,
    validate_bundle,
    write_bundle,
    write_fixations,
    write_metric_table,
)
from semrel.cli import main
from semrel.errors import ZeroVector
from semrel.gammlite import (
    EvaluationConfig,
    SmoothTermSpec,
    bspline_basis,
    evaluate_metrics,
    fit_penalized,
    select_lambdas,
    simulate_benchmark,
)
from semrel.lexicon import load_vec_file
from semrel.records import FixationRecord, MetricRow
from semrel.relevance import compute_metric_row
from semrel.saliency import GrayImage, SRParams, fft2, gaussian_kernel, spectral_residual
from semrel.vecmath import cosine

from conftest import make_scene


# pytest's default fd-level capture swallows even sys.__stdout__, so the
# pass/fail lines route around it via the capture manager when present
_CAPMAN = None


@pytest.fixture(autouse=True)
def _capture_bypass(request):
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def announce(name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {name}: {detail}"
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(line, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)


# ---------------------------------------------------------------- A1

def test_algebraic_identity_suite(tiny_store):
    start = time.perf_counter()
    ok = True
    try:
        rng = np.random.default_rng(0)
        for _ in range(200):
            u = rng.standard_normal(8)
            v = rng.standard_normal(8)
            c = cosine(u, v)
            assert -1.0 <= c <= 1.0
            assert cosine(v, u) == c
            assert abs(cosine(3.7 * u, 0.2 * v) - c) <= 1e-12
        with pytest.raises(ZeroVector):
            cosine(np.zeros(4), np.ones(4))

        scene = make_scene()
        row = compute_metric_row(scene.objects[0], scene, store=tiny_store,
                                 concept_store=tiny_store)
        assert row.overall_vissim == row.obj_image_vissim + row.objs_vissim
        assert row.overall_semsim == row.sent_semsim + row.words_semsim
        assert row.sum_vissem_sim == row.overall_semsim + row.obj_image_vissim
        sim_rows, _ = simulate_benchmark(3, 50)
        for r in sim_rows:
            assert r.overall_vissim == r.obj_image_vissim + r.objs_vissim
            assert r.overall_semsim == r.sent_semsim + r.words_semsim
            assert r.sum_vissem_sim == r.overall_semsim + r.obj_image_vissim

        # a missing part makes every sum that uses it missing
        bare = compute_metric_row(scene.objects[0], scene)
        assert bare.words_semsim is None
        assert bare.overall_semsim is None
        assert bare.sum_vissem_sim is None
        assert bare.overall_vissim is not None
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0
    except BaseException:
        ok = False
        raise
    finally:
        announce("algebraic identities", ok,
                 f"cosine bounds, sum identities, missing propagation "
                 f"({time.perf_counter() - start:.2f}s < 1s)")


# ---------------------------------------------------------------- A2

def _dft_matrix(n, sign):
    j = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(j, j) / n)


def _reference_sr(pixels, params):
    h, w = pixels.shape
    if pixels.max() - pixels.min() < 1e-12:
        return np.zeros_like(pixels)
    F = _dft_matrix(h, -1) @ pixels.astype(complex) @ _dft_matrix(w, -1)
    L = np.log(np.abs(F) + params.log_epsilon)
    phase = np.angle(F)
    r = params.kernel_radius
    k = gaussian_kernel(params.gaussian_sigma, r)
    window = np.outer(k, k)
    pad = np.pad(L, r, mode="edge")
    Ls = np.zeros_like(L)
    for i in range(h):
        for j in range(w):
            Ls[i, j] = np.sum(window * pad[i:i + 2 * r + 1, j:j + 2 * r + 1])
    G = np.exp(L - Ls) * np.exp(1j * phase)
    back = (_dft_matrix(h, 1) @ G @ _dft_matrix(w, 1)) / (h * w)
    S = np.abs(back) ** 2
    lo, hi = S.min(), S.max()
    if hi - lo < 1e-12:
        return np.zeros_like(S)
    return (S - lo) / (hi - lo)


def test_saliency_oracle_equivalence():
    start = time.perf_counter()
    ok = True
    worst = 0.0
    try:
        params = SRParams()
        rng = np.random.default_rng(2024)
        for _ in range(10):
            px = rng.uniform(size=(64, 64))
            got = np.asarray(spectral_residual(GrayImage(64, 64, px)).values)
            want = _reference_sr(px, params)
            worst = max(worst, float(np.abs(got - want).max()))
        assert worst < 1e-6

        px = rng.uniform(size=(64, 64))
        base = np.asarray(spectral_residual(GrayImage(64, 64, px)).values)
        rolled = np.roll(np.roll(px, 8, axis=0), 8, axis=1)
        shifted = np.asarray(spectral_residual(GrayImage(64, 64, rolled)).values)
        shift_err = float(np.abs(np.roll(np.roll(base, 8, axis=0), 8, axis=1)
                                 - shifted).max())
        assert shift_err < 1e-9

        flat = spectral_residual(GrayImage(64, 64, np.full((64, 64), 0.7)))
        assert np.asarray(flat.values).max() == 0.0

        elapsed = time.perf_counter() - start
        assert elapsed < 10.0
    except BaseException:
        ok = False
        raise
    finally:
        announce("saliency oracle equivalence", ok,
                 f"max |diff| {worst:.2e} < 1e-6 on 10 fixtures, shift ok, "
                 f"constant -> zeros ({time.perf_counter() - start:.2f}s < 10s)")


# ---------------------------------------------------------------- A3

def test_fft_inversion_identity():
    start = time.perf_counter()
    ok = True
    worst = 0.0
    try:
        rng = np.random.default_rng(77)
        for h in (8, 16, 32, 64):
            for w in (8, 64):
                grid = rng.standard_normal((h, w)) + 1j * rng.standard_normal((h, w))
                back = fft2(fft2(grid), inverse=True)
                rel = float(np.abs(back - grid).max() / np.abs(grid).max())
                worst = max(worst, rel)
        assert worst < 1e-9
    except BaseException:
        ok = False
        raise
    finally:
        announce("fft inversion", ok,
                 f"max relative error {worst:.2e} < 1e-9 on 8x8..64x64 "
                 f"({time.perf_counter() - start:.2f}s)")


# ---------------------------------------------------------------- A4

def test_gamm_recovery():
    start = time.perf_counter()
    ok = True
    rmse = math.nan
    gain = math.nan
    try:
        rng = np.random.default_rng(123)
        n = 500
        x = rng.uniform(0, 2 * np.pi, size=n)
        z = np.sin(x) + 0.1 * rng.standard_normal(n)
        basis = bspline_basis(x, SmoothTermSpec("x"))
        blocks = [np.ones((n, 1)), basis.design(x)]
        penalties = [None, basis.penalty()]
        lambdas, _ = select_lambdas(blocks, penalties, z)
        fit = fit_penalized(blocks, penalties, z, lambdas)
        null_fit = fit_penalized(blocks[:1], penalties[:1], z, [None])

        grid = basis.grid(400)
        curve = fit.coefficients[0] + basis.design(grid) @ fit.coefficients[1:]
        truth = np.sin(grid)
        rmse = float(np.sqrt(np.mean(
            ((curve - curve.mean()) - (truth - truth.mean())) ** 2)))
        gain = null_fit.aic - fit.aic
        assert rmse < 0.05
        assert gain > 100.0

        recomputed = fit.n_used * math.log(fit.rss / fit.n_used) \
            + 2.0 * (fit.edf_total + 1.0)
        assert abs(fit.aic - recomputed) < 1e-9

        basis2 = bspline_basis(2.0 * x - 7.0, SmoothTermSpec("x"))
        blocks2 = [np.ones((n, 1)), basis2.design(2.0 * x - 7.0)]
        penalties2 = [None, basis2.penalty()]
        fit2 = fit_penalized(blocks2, penalties2, z, lambdas)
        assert abs(fit.rss - fit2.rss) < 1e-8 * max(1.0, fit.rss)
        assert abs(fit.edf_total - fit2.edf_total) < 1e-8

        elapsed = time.perf_counter() - start
        assert elapsed < 30.0
    except BaseException:
        ok = False
        raise
    finally:
        announce("gamm recovery", ok,
                 f"rmse {rmse:.4f} < 0.05, aic gain {gain:.1f} > 100, "
                 f"aic identity and affine invariance hold "
                 f"({time.perf_counter() - start:.2f}s < 30s)")


# ---------------------------------------------------------------- A5 + A6

@pytest.fixture(scope="module")
def benchmark_report():
    start = time.perf_counter()
    rows, fixations = simulate_benchmark(42, 2000)
    report = evaluate_metrics(rows, fixations, EvaluationConfig())
    return report, time.perf_counter() - start


def test_benchmark_discrimination(benchmark_report):
    report, elapsed = benchmark_report
    ok = True
    details = []
    try:
        assert len(report.sections) == 2
        for section in report.sections:
            by_name = {c.metric: c for c in section.comparisons}
            driver = by_name["sum_vissem_sim"]
            noise = by_name["concepts_semsim"]
            assert driver.delta_aic < -50.0
            assert driver.rank == 1
            assert noise.delta_aic > -10.0
            assert section.base_refit_delta == 0.0
            details.append(f"{section.response}: driver {driver.delta_aic:.1f}, "
                           f"noise {noise.delta_aic:+.2f}")
        assert elapsed < 60.0
    except BaseException:
        ok = False
        raise
    finally:
        announce("benchmark discrimination", ok,
                 "; ".join(details) + f"; base refit delta 0.0 "
                 f"({elapsed:.2f}s < 60s)")


def test_benchmark_ordering_correspondence(benchmark_report):
    report, _ = benchmark_report
    ok = True
    details = []
    try:
        for section in report.sections:
            by_name = {c.metric: c for c in section.comparisons}
            d_sum = by_name["sum_vissem_sim"].delta_aic
            d_sem = by_name["overall_semsim"].delta_aic
            d_img = by_name["obj_image_vissim"].delta_aic
            assert d_sum < d_sem < d_img
            details.append(f"{section.response}: {d_sum:.1f} < {d_sem:.1f} "
                           f"< {d_img:.1f}")
    except BaseException:
        ok = False
        raise
    finally:
        announce("ordering correspondence", ok, "; ".join(details))


# ---------------------------------------------------------------- A7

def test_formats_and_vec_load(tmp_path):
    start = time.perf_counter()
    ok = True
    load_s = math.nan
    try:
        # bundle round trip
        scene = make_scene(sentence_embeddings=[np.array([0.1, 0.2, 0.3])])
        bpath = tmp_path / "b.json"
        write_bundle(scene, str(bpath))
        back = read_bundle(str(bpath))
        assert back.image_id == scene.image_id
        np.testing.assert_array_equal(back.image_embedding, scene.image_embedding)
        for got, want in zip(back.objects, scene.objects):
            np.testing.assert_array_equal(got.embedding, want.embedding)
        assert validate_bundle(str(bpath)).ok

        # validation exhaustiveness: six injected defects, six error entries
        doc = json.loads(bpath.read_text())
        doc["image_id"] = "img 1"
        doc["width"] = 0
        doc["caption"] = 7
        doc["objects"][0]["embedding"] = [1.0]
        doc["objects"][1]["name"] = "a, b"
        doc["objects"][2]["bbox"]["w"] = -1
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        report = validate_bundle(str(bad))
        assert len(report.errors) == 6

        # metric and fixation CSV round trips are value identical
        rows, fixations = simulate_benchmark(9, 20)
        rows[0] = dataclasses.replace(rows[0], saliency=None, words_semsim=None,
                                      overall_semsim=None, sum_vissem_sim=None)
        mpath = tmp_path / "m.csv"
        write_metric_table(rows, str(mpath))
        assert read_metric_table(str(mpath)) == rows
        fpath = tmp_path / "f.csv"
        write_fixations(fixations, str(fpath))
        assert read_fixations(str(fpath)) == fixations

        # 10k x 300 word-vector fixture loads in under a second
        rng = np.random.default_rng(5)
        mat = rng.standard_normal((10_000, 300))
        lines = ["10000 300"]
        for i in range(10_000):
            lines.append(f"tok{i} " + " ".join("%.5f" % v for v in mat[i]))
        vpath = tmp_path / "big.vec"
        vpath.write_text("\n".join(lines) + "\n", encoding="utf-8")
        t0 = time.perf_counter()
        store = load_vec_file(str(vpath))
        load_s = time.perf_counter() - t0
        assert len(store) == 10_000 and store.dim == 300
        assert load_s < 1.0
    except BaseException:
        ok = False
        raise
    finally:
        announce("format round trips", ok,
                 f"bundle/CSV round trips exact, 6/6 defects reported, "
                 f"vec load {load_s:.2f}s < 1s "
                 f"({time.perf_counter() - start:.2f}s)")


# ---------------------------------------------------------------- A8

def test_cli_determinism(tmp_path, monkeypatch):
    start = time.perf_counter()
    ok = True
    try:
        monkeypatch.delenv("RELEVANCE_THREADS", raising=False)
        vec = tmp_path / "w.vec"
        vec.write_text("2 3\ndog 1 0 0\nball 0 1 0\n", encoding="utf-8")
        bundle = tmp_path / "b.json"
        write_bundle(make_scene(), str(bundle))

        outputs = []
        for tag in ("one", "two"):
            droot = tmp_path / tag
            droot.mkdir()
            m = droot / "metrics.csv"
            assert main(["metrics", "--bundle", str(bundle), "--wordvec",
                         str(vec), "--out", str(m)]) == 0
            sm = droot / "sim_metrics.csv"
            sf = droot / "sim_fixations.csv"
            assert main(["simulate", "--seed", "42", "--n-scenes", "25",
                         "--out-metrics", str(sm), "--out-fixations", str(sf)]) == 0
            rep = droot / "report.txt"
            assert main(["evaluate", "--metrics", str(sm), "--fixations", str(sf),
                         "--response", "duration", "--out", str(rep)]) == 0
            effect_bytes = b"".join(p.read_bytes() for p in
                                    sorted((droot / "report.txt.effects").iterdir()))
            outputs.append((m.read_bytes(),
                            (droot / "metrics.csv.diagnostics.json").read_bytes(),
                            sm.read_bytes(), sf.read_bytes(),
                            rep.read_bytes(), effect_bytes))
        assert outputs[0] == outputs[1]
    except BaseException:
        ok = False
        raise
    finally:
        announce("cli determinism", ok,
                 f"metrics, simulate, evaluate outputs byte-identical across runs "
                 f"({time.perf_counter() - start:.2f}s)")

"""Command-line batch driver.

    scene-extract --captions captions.tsv --out DIR [--threshold 0.7]
                  [--backend synthetic|transformers] [--joint-encoder ID]
                  [--sentence-encoder ID]

captions.tsv holds one image per line: a path (relative paths resolve
against the TSV's directory), a tab, and the caption.  Exit codes: 0 when
at least one bundle was emitted, 1 for usage errors, 2 for data or model
errors (unreadable caption file, models unavailable, nothing extracted).
"""

import argparse
import json
import sys
from pathlib import Path

from .backends import SyntheticBackend, TransformersBackend
from .config import DEFAULT_JOINT_ENCODER, DEFAULT_SENTENCE_ENCODER, ExtractorConfig
from .errors import ExtractorError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_captions(path: Path):
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ExtractorError(f"cannot read captions file {path}: {exc}") from None
    items = []
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ExtractorError(f"{path}:{i}: expected <image>\\t<caption>")
        image, caption = line.split("\t", 1)
        image = image.strip()
        if not image or not caption.strip():
            raise ExtractorError(f"{path}:{i}: empty image path or caption")
        items.append((path.parent / image, caption.strip()))
    if not items:
        raise ExtractorError(f"{path}: no image/caption lines")
    return items


def main(argv=None) -> int:
    parser = _Parser(prog="scene-extract",
                     description="produce scene bundles from images and captions")
    parser.add_argument("--captions", required=True,
                        help="TSV of image path and caption, one per line")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threshold", type=float, default=0.7,
                        help="detector confidence cutoff, in (0, 1)")
    parser.add_argument("--backend", choices=("synthetic", "transformers"),
                        default="transformers")
    parser.add_argument("--joint-encoder", default=DEFAULT_JOINT_ENCODER)
    parser.add_argument("--sentence-encoder", default=DEFAULT_SENTENCE_ENCODER)
    args = parser.parse_args(argv)

    try:
        config = ExtractorConfig(output_dir=args.out,
                                 detector_threshold=args.threshold,
                                 joint_encoder=args.joint_encoder,
                                 sentence_encoder=args.sentence_encoder)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.backend == "synthetic":
        backend = SyntheticBackend()
    else:
        backend = TransformersBackend(joint_encoder=config.joint_encoder,
                                      sentence_encoder=config.sentence_encoder)

    from .pipeline import extract_batch

    try:
        items = _read_captions(Path(args.captions))
        manifest_path = extract_batch(items, config, backend)
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    n_ok = len(manifest["bundles"])
    n_fail = len(manifest["failures"])
    print(f"wrote {n_ok} bundles to {args.out} ({n_fail} failures); "
          f"manifest at {manifest_path}")
    for failure in manifest["failures"]:
        print(f"failed: {failure['image']}: {failure['error']}", file=sys.stderr)
    return 0 if n_ok else 2


if __name__ == "__main__":
    sys.exit(main())

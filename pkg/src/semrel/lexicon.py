"""Word-vector text files and name/sentence resolution.

Files follow the common text format: a "count dim" header line, then one
token and dim space-separated floats per line. The same loader serves both
the general word-vector store and the alternate concepts store.
"""

import string
import warnings

import numpy as np

from .errors import BadLine, IoError, MalformedHeader
from .vecmath import mean_vector

_PUNCT_TABLE = str.maketrans({c: " " for c in string.punctuation})


class WordVectorStore:
    """Immutable token -> vector mapping; tokens are lowercase."""

    def __init__(self, dim: int, entries: dict, declared_count: int):
        self.dim = dim
        self.entries = entries
        self.declared_count = declared_count

    def __len__(self):
        return len(self.entries)

    def get(self, token: str):
        return self.entries.get(token)


def _parse_lines_slow(lines, dim):
    """Line-by-line parse used when the vectorized fast path fails.

    Produces the exact offending line number. Line numbers are 1-based and
    include the header (data starts at line 2).
    """
    tokens = []
    rows = []
    for lineno, line in lines:
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise BadLine(lineno, f"expected {dim + 1} fields, got {len(parts)}")
        try:
            row = [float(p) for p in parts[1:]]
        except ValueError:
            raise BadLine(lineno, "non-numeric vector component") from None
        if not all(np.isfinite(row)):
            raise BadLine(lineno, "non-finite vector component")
        tokens.append(parts[0])
        rows.append(row)
    return tokens, np.asarray(rows, dtype=np.float64).reshape(len(rows), dim)


def load_vec_file(path) -> WordVectorStore:
    """Parse a word-vector text file.

    A count that disagrees with the header and duplicate tokens (first
    occurrence kept) are warnings, not errors: published vector files
    frequently carry both defects.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None

    lines = text.split("\n")
    header = lines[0].split(" ")
    if len(header) != 2:
        raise MalformedHeader(f"expected 'count dim' header, got {lines[0]!r}")
    try:
        declared_count = int(header[0])
        dim = int(header[1])
    except ValueError:
        raise MalformedHeader(f"non-integer header fields in {lines[0]!r}") from None
    if dim < 1 or declared_count < 0:
        raise MalformedHeader(f"bad header values in {lines[0]!r}")

    numbered = [(i + 2, ln) for i, ln in enumerate(lines[1:]) if ln != ""]

    # Fast path: one split per line plus a single bulk float parse. Any
    # field-count or numeric problem drops to the slow path for an exact
    # line diagnosis.
    tokens = []
    numeric_parts = []
    ok = True
    for lineno, line in numbered:
        cut = line.find(" ")
        if cut <= 0 or line.count(" ") != dim:
            ok = False
            break
        tokens.append(line[:cut])
        numeric_parts.append(line[cut + 1:])
    if ok:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DeprecationWarning)
            flat = np.fromstring("\n".join(numeric_parts), dtype=np.float64, sep=" ")
        if flat.size == len(numbered) * dim and np.isfinite(flat).all():
            matrix = flat.reshape(len(numbered), dim)
        else:
            ok = False
    if not ok:
        tokens, matrix = _parse_lines_slow(numbered, dim)

    entries = {}
    for i, token in enumerate(tokens):
        key = token.lower()
        if key in entries:
            warnings.warn(f"{path}: duplicate token {key!r}, keeping first occurrence")
            continue
        entries[key] = matrix[i]
    if len(entries) != declared_count:
        warnings.warn(
            f"{path}: header declares {declared_count} entries, parsed {len(entries)}")
    return WordVectorStore(dim, entries, declared_count)


def lookup_name(store: WordVectorStore, name: str):
    """Resolve an object name to a vector, or None when out of vocabulary.

    Multiword names (e.g. "potted plant") average the constituent tokens that
    are present in the store.
    """
    parts = name.lower().split()
    found = [store.get(p) for p in parts]
    found = [v for v in found if v is not None]
    if not found:
        return None
    if len(found) == 1:
        return found[0]
    return mean_vector(found)


def fallback_sentence_embedding(store: WordVectorStore, text: str):
    """Mean vector over in-vocabulary tokens of a sentence, or None.

    Tokenization lowercases and splits on whitespace and ASCII punctuation.
    """
    cleaned = text.lower().translate(_PUNCT_TABLE)
    found = [store.get(t) for t in cleaned.split()]
    found = [v for v in found if v is not None]
    if not found:
        return None
    if len(found) == 1:
        return found[0]
    return mean_vector(found)

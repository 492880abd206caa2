"""Raw book ingestion: cleaning, paragraph segmentation and token extraction.

The output of this module is an :class:`OrganizedText`, the ordered list of
paragraphs reduced to role-tagged lemmas. Role tags come either from an
external annotation sidecar (subject / verb / direct-object, as produced by a
dependency parser with coreference resolution) or from a heuristic fallback
that keeps every non-stopword token, stemmed, with the ``fallback`` role.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import snowballstemmer

ROLES = ("subject", "verb", "direct-object")
FALLBACK = "fallback"

#: Lines whose trimmed content starts with CHAPTER/Chapter or is a bare Roman numeral.
DEFAULT_CHAPTER_REGEX = r"^\s*(?:CHAPTER|Chapter)\b.*$|^\s*[IVXLCDM]+\.?\s*$"

_BLANK_RUN = re.compile(r"\n[ \t\r\f\v]*\n\s*")
_WORD = re.compile(r"[^\W\d_]+")
_APOSTROPHES = re.compile(r"['’‘]")


class DegenerateInputError(ValueError):
    """Input text has no usable content (empty, or too short for the pipeline)."""


class AnnotationError(ValueError):
    """Malformed or misaligned annotation sidecar."""


@dataclass(frozen=True)
class RawBook:
    id: str
    text: str
    genres: tuple[str, ...] = ()

    @classmethod
    def from_path(cls, path: str | Path, genres: Iterable[str] = ()) -> "RawBook":
        path = Path(path)
        return cls(book_id_from_path(path), path.read_text(encoding="utf-8"), tuple(genres))


@dataclass(frozen=True)
class Paragraph:
    index: int
    tokens: tuple[tuple[str, str], ...]

    @property
    def lemmas(self) -> list[str]:
        return [lemma for lemma, _ in self.tokens]


@dataclass(frozen=True)
class OrganizedText:
    book_id: str
    paragraphs: tuple[Paragraph, ...]
    provenance: str = FALLBACK
    shuffle_seed: int | None = None

    def __len__(self) -> int:
        return len(self.paragraphs)

    def to_json(self, meta: dict | None = None) -> str:
        payload = {
            "bookId": self.book_id,
            "provenance": self.provenance,
            "shuffleSeed": self.shuffle_seed,
            "paragraphs": [[list(tok) for tok in p.tokens] for p in self.paragraphs],
        }
        if meta is not None:
            payload["meta"] = meta
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "OrganizedText":
        payload = json.loads(text)
        paragraphs = tuple(
            Paragraph(i, tuple((lemma, role) for lemma, role in toks))
            for i, toks in enumerate(payload["paragraphs"])
        )
        return cls(payload["bookId"], paragraphs, payload["provenance"], payload.get("shuffleSeed"))


def book_id_from_path(path: str | Path) -> str:
    """``corpus/moby_dick.txt`` -> ``moby_dick``; everything after the first dot is dropped."""
    return Path(path).name.split(".", 1)[0]


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("textrecur").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return load_stopwords_text(text)


def load_stopwords_text(text: str) -> frozenset[str]:
    words = (line.strip().lower() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_stopwords(path: str | Path) -> frozenset[str]:
    return load_stopwords_text(Path(path).read_text(encoding="utf-8"))


def clean_text(raw: RawBook | str, chapter_regex: str = DEFAULT_CHAPTER_REGEX) -> str:
    """Remove underscores and chapter-marker lines.

    Marker lines are emptied rather than deleted, so a marker sitting between
    two paragraphs still separates them.

    Raises
    ------
    DegenerateInputError
        If nothing but whitespace is left.
    """
    text = raw.text if isinstance(raw, RawBook) else raw
    if not text.strip():
        raise DegenerateInputError("empty book text")
    text = text.replace("\r\n", "\n").replace("\r", "\n").replace("_", "")
    text = re.sub(chapter_regex, "", text, flags=re.MULTILINE)
    if not text.strip():
        raise DegenerateInputError("book text is empty after cleaning")
    return text


def segment_paragraphs(cleaned: str) -> list[str]:
    if not cleaned.strip():
        raise DegenerateInputError("no text to segment")
    paragraphs = [p.strip() for p in _BLANK_RUN.split(cleaned)]
    paragraphs = [p for p in paragraphs if p]
    if not paragraphs:
        raise DegenerateInputError("no paragraphs found")
    return paragraphs


_STEMMER = snowballstemmer.stemmer("english")


def fallback_tokens(paragraph: str, stopwords: frozenset[str] | None = None) -> list[tuple[str, str]]:
    """Lowercase, drop punctuation and stopwords, stem what is left."""
    if stopwords is None:
        stopwords = default_stopwords()
    words = _WORD.findall(_APOSTROPHES.sub("", paragraph.lower()))
    kept = [w for w in words if w not in stopwords]
    return [(stem, FALLBACK) for stem in _STEMMER.stemWords(kept) if stem]


def _normalize_lemma(lemma: str) -> str:
    return lemma.replace("_", "").strip().lower()


def extract_tokens(
    paragraph: str,
    annotation: Sequence[Sequence[str]] | None = None,
    index: int = 0,
    stopwords: frozenset[str] | None = None,
) -> Paragraph:
    """Reduce one paragraph to its role-tagged lemmas.

    With an annotation record the parser's ``(lemma, role)`` pairs are used
    as given (lowercased); otherwise the heuristic fallback applies.
    """
    if not paragraph.strip():
        raise DegenerateInputError(f"paragraph {index} is empty")
    if annotation is None:
        return Paragraph(index, tuple(fallback_tokens(paragraph, stopwords)))
    tokens = []
    for lemma, role in annotation:
        if role not in ROLES:
            raise AnnotationError(f"paragraph {index}: unknown role {role!r}")
        lemma = _normalize_lemma(lemma)
        if lemma:
            tokens.append((lemma, role))
    return Paragraph(index, tuple(tokens))


def load_sidecar(path: str | Path) -> list[list[tuple[str, str]]]:
    """Read ``<book>.annotations.jsonl``: one ``{"tokens": [[lemma, role], ...]}`` per line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                tokens = [(str(lemma), str(role)) for lemma, role in obj["tokens"]]
            except (ValueError, KeyError, TypeError) as exc:
                raise AnnotationError(f"{path}:{lineno}: {exc}") from exc
            for _, role in tokens:
                if role not in ROLES:
                    raise AnnotationError(f"{path}:{lineno}: unknown role {role!r}")
            records.append(tokens)
    return records


def sidecar_path(book_path: str | Path) -> Path:
    book_path = Path(book_path)
    return book_path.with_name(book_id_from_path(book_path) + ".annotations.jsonl")


def organize(
    raw: RawBook,
    annotations: Sequence[Sequence[Sequence[str]]] | None = None,
    chapter_regex: str = DEFAULT_CHAPTER_REGEX,
    stopwords: frozenset[str] | None = None,
) -> OrganizedText:
    """Clean, segment and tokenize a book into its organized text."""
    paragraphs = segment_paragraphs(clean_text(raw, chapter_regex))
    if annotations is not None and len(annotations) != len(paragraphs):
        raise AnnotationError(
            f"{raw.id}: sidecar has {len(annotations)} records but the cleaned book has "
            f"{len(paragraphs)} paragraphs"
        )
    out = []
    for i, text in enumerate(paragraphs):
        record = annotations[i] if annotations is not None else None
        out.append(extract_tokens(text, record, index=i, stopwords=stopwords))
    provenance = "annotated" if annotations is not None else FALLBACK
    return OrganizedText(raw.id, tuple(out), provenance)


def shuffle_paragraphs(o: OrganizedText, seed: int) -> OrganizedText:
    """Seeded Fisher-Yates permutation of the paragraphs; contents untouched."""
    if len(o) < 2:
        raise DegenerateInputError("need at least 2 paragraphs to shuffle")
    order = list(range(len(o)))
    random.Random(seed).shuffle(order)
    paragraphs = tuple(Paragraph(new, o.paragraphs[old].tokens) for new, old in enumerate(order))
    return replace(o, paragraphs=paragraphs, shuffle_seed=seed)

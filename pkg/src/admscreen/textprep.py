"""Cleaning, language detection, sentence segmentation, and tokenization.

All operations here are pure functions over corpus records, so they can run
in parallel across documents without coordination.
"""

from __future__ import annotations

import html
import re
import unicodedata
from dataclasses import dataclass, replace
from typing import Iterator

from .corpus import Document, Fragment, LanguageTag
from .errors import EmptyDocumentError

#: Sentence terminators: Latin full stop/bang/question plus the danda (U+0964)
#: used as the Bengali full stop. A newline also ends a fragment.
SENTENCE_TERMINATORS = frozenset({".", "!", "?", "।"})

#: Hook for future filtering; intentionally ships empty so the baseline
#: pipeline has no hidden knobs.
DEFAULT_STOPWORDS: frozenset[str] = frozenset()

_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_DROP_BLOCK_RE = re.compile(
    r"<(script|style|figcaption)\b[^>]*>.*?</\1\s*>", re.IGNORECASE | re.DOTALL
)
_TAG_RE = re.compile(r"</?[a-zA-Z!][^>]*>")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]

    def __post_init__(self):
        for token in self.tokens:
            if not token or any(ch.isspace() for ch in token):
                raise ValueError(f"invalid token {token!r}")

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def _strip_markup(text: str) -> str:
    # Entity unescaping can reintroduce tag-like text (e.g. "&lt;b&gt;"), so
    # iterate to a fixpoint; each pass never grows the string.
    current = text
    for _ in range(10):
        stripped = _COMMENT_RE.sub(" ", current)
        stripped = _DROP_BLOCK_RE.sub(" ", stripped)
        stripped = _TAG_RE.sub(" ", stripped)
        stripped = html.unescape(stripped)
        if stripped == current:
            break
        current = stripped
    return current


def _strip_control_chars(text: str) -> str:
    out = []
    for ch in text:
        if ch in "\n\t":
            out.append(ch)
        elif unicodedata.category(ch) == "Cc":
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def _collapse_whitespace(text: str) -> str:
    # Runs of spaces/tabs collapse to one space; blank lines disappear but
    # line breaks survive as fragment boundaries for the segmenter.
    lines = [" ".join(line.split()) for line in text.split("\n")]
    return "\n".join(line for line in lines if line)


def _remove_duplicated_title(body: str, title: str | None) -> str:
    if not title:
        return body
    normalized_title = " ".join(unicodedata.normalize("NFC", title).split())
    if not normalized_title:
        return body
    return body.replace(normalized_title, " ")


def clean_text(raw_text: str, title: str | None = None) -> str:
    """Markup-free, NFC-normalized, whitespace-collapsed text (may be empty)."""
    text = _strip_markup(raw_text)
    text = _strip_control_chars(text)
    text = unicodedata.normalize("NFC", text)
    text = _collapse_whitespace(text)
    text = _remove_duplicated_title(text, title)
    return _collapse_whitespace(text)


def clean_document(document: Document) -> Document:
    """Return the document with cleaned_text (and detected lang) filled in.

    Raises EmptyDocumentError when nothing but markup/images was present;
    such documents are excluded from analysis.
    """
    cleaned = clean_text(document.raw_text, document.title)
    if not cleaned:
        raise EmptyDocumentError(f"document {document.id!r} is empty after cleaning")
    return replace(document, cleaned_text=cleaned, lang=detect_language(cleaned))


_BENGALI_START, _BENGALI_END = 0x0980, 0x09FF
_LATIN_RANGES = ((0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x024F))


def _script_of(ch: str) -> str:
    cp = ord(ch)
    if _BENGALI_START <= cp <= _BENGALI_END:
        return "bengali"
    for start, end in _LATIN_RANGES:
        if start <= cp <= end:
            return "latin"
    return "other"


def detect_language(text: str) -> LanguageTag:
    """Classify by script ratio over letters only.

    >=90% of letters in one script decides that language; both Bengali and
    Latin at >=10% means mixed; anything else (including no letters at all)
    is unknown.
    """
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return LanguageTag.UNKNOWN
    bengali = sum(1 for ch in letters if _script_of(ch) == "bengali")
    latin = sum(1 for ch in letters if _script_of(ch) == "latin")
    total = len(letters)
    if bengali / total >= 0.9:
        return LanguageTag.BANGLA
    if latin / total >= 0.9:
        return LanguageTag.ENGLISH
    if bengali / total >= 0.1 and latin / total >= 0.1:
        return LanguageTag.MIXED
    return LanguageTag.UNKNOWN


def segment_fragments(document: Document) -> list[Fragment]:
    """Split cleaned text into sentence fragments, terminators attached.

    Fragment ids are `<doc_id>:<index>` so repeated runs over the same
    document are stable.
    """
    if document.cleaned_text is None:
        raise ValueError(f"document {document.id!r} must be cleaned before segmentation")
    pieces: list[str] = []
    buf: list[str] = []
    for ch in document.cleaned_text:
        if ch == "\n":
            pieces.append("".join(buf))
            buf = []
            continue
        buf.append(ch)
        if ch in SENTENCE_TERMINATORS:
            pieces.append("".join(buf))
            buf = []
    pieces.append("".join(buf))

    fragments: list[Fragment] = []
    for piece in pieces:
        text = piece.strip()
        if not text:
            continue
        index = len(fragments)
        fragments.append(
            Fragment(
                id=f"{document.id}:{index}",
                doc_id=document.id,
                index=index,
                text=text,
                lang=detect_language(text),
            )
        )
    return fragments


def _is_token_char(ch: str) -> bool:
    # Combining marks (Mn/Mc/Me) must stay inside tokens or Bangla words
    # like "টাকা" would shatter at their vowel signs.
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def tokenize(
    text: str,
    lang: LanguageTag | None = None,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> TokenSequence:
    """Split on whitespace/punctuation; Latin is lowercased, Bangla kept as-is.

    Digits stay as tokens. Raises ValueError on empty/whitespace-only input;
    punctuation-only input yields an empty sequence.
    """
    if not text.strip():
        raise ValueError("tokenize requires non-empty text")
    tokens: list[str] = []
    buf: list[str] = []
    for ch in text:
        if _is_token_char(ch):
            buf.append(ch)
        elif buf:
            tokens.append("".join(buf).lower())
            buf = []
    if buf:
        tokens.append("".join(buf).lower())
    if stopwords:
        tokens = [t for t in tokens if t not in stopwords]
    return TokenSequence(tuple(tokens))

"""Data model and persistence for documents, fragments, labels, and splits.

Corpus files are line-delimited JSON (UTF-8, NFC-normalized text fields):
document records carry ``{"kind": "doc", ...}`` and fragment records
``{"kind": "frag", ...}``. Label changes go to a separate append-only audit
log, one JSON object per line.

The class order (negative, neutral, positive) is fixed everywhere in this
package: confusion-matrix axes, score maps, and tie-breaking all use it.
"""

from __future__ import annotations

import json
import os
import random
import tempfile
import unicodedata
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .errors import CorpusFormatError, DuplicateIdError, NotFoundError

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from .classify import Prediction


class SentimentLabel(str, Enum):
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"


#: Canonical class order used for matrix indexing and tie-breaking.
CLASS_ORDER: tuple[SentimentLabel, ...] = (
    SentimentLabel.NEGATIVE,
    SentimentLabel.NEUTRAL,
    SentimentLabel.POSITIVE,
)


class DocumentSource(str, Enum):
    NEWS_FEED = "news_feed"
    SOCIAL_EXPORT = "social_export"
    MANUAL = "manual"


class LanguageTag(str, Enum):
    ENGLISH = "english"
    BANGLA = "bangla"
    MIXED = "mixed"
    UNKNOWN = "unknown"


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def parse_timestamp(value: str) -> datetime:
    # Python 3.10 fromisoformat does not accept a trailing Z.
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


@dataclass(frozen=True)
class Document:
    """One ingested news article or social post."""

    id: str
    source: DocumentSource
    origin_ref: str
    fetched_at: datetime
    raw_text: str
    title: str | None = None
    cleaned_text: str | None = None
    lang: LanguageTag | None = None

    def __post_init__(self):
        if not self.raw_text:
            raise ValueError(f"document {self.id!r} has empty raw_text")

    def to_record(self) -> dict:
        return {
            "kind": "doc",
            "id": self.id,
            "source": self.source.value,
            "origin_ref": self.origin_ref,
            "fetched_at": self.fetched_at.isoformat(),
            "title": _nfc_opt(self.title),
            "raw_text": _nfc(self.raw_text),
            "cleaned_text": _nfc_opt(self.cleaned_text),
            "lang": self.lang.value if self.lang else None,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Document":
        return cls(
            id=record["id"],
            source=DocumentSource(record["source"]),
            origin_ref=record["origin_ref"],
            fetched_at=parse_timestamp(record["fetched_at"]),
            raw_text=record["raw_text"],
            title=record.get("title"),
            cleaned_text=record.get("cleaned_text"),
            lang=LanguageTag(record["lang"]) if record.get("lang") else None,
        )


@dataclass(frozen=True)
class Fragment:
    """One sentence/fragment: the unit of classification and labeling."""

    id: str
    doc_id: str
    index: int
    text: str
    lang: LanguageTag
    label: SentimentLabel | None = None
    predicted: "Prediction | None" = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"fragment {self.id!r} has empty text")

    def to_record(self) -> dict:
        return {
            "kind": "frag",
            "id": self.id,
            "doc_id": self.doc_id,
            "index": self.index,
            "text": _nfc(self.text),
            "lang": self.lang.value,
            "label": self.label.value if self.label else None,
            "predicted": self.predicted.to_dict() if self.predicted else None,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Fragment":
        predicted = None
        if record.get("predicted"):
            from .classify import Prediction

            predicted = Prediction.from_dict(record["predicted"])
        return cls(
            id=record["id"],
            doc_id=record["doc_id"],
            index=record["index"],
            text=record["text"],
            lang=LanguageTag(record["lang"]),
            label=SentimentLabel(record["label"]) if record.get("label") else None,
            predicted=predicted,
        )


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class labeled counts; unlabeled fragments are reported separately."""

    counts: Mapping[SentimentLabel, int]
    total: int
    unlabeled: int = 0


@dataclass(frozen=True)
class DatasetSplit:
    train_ids: frozenset[str]
    test_ids: frozenset[str]
    seed: int
    test_fraction: float


@dataclass(frozen=True)
class LabelAuditEntry:
    fragment_id: str
    old: SentimentLabel | None
    new: SentimentLabel
    annotator: str
    at: datetime

    def to_record(self) -> dict:
        return {
            "fragment_id": self.fragment_id,
            "old": self.old.value if self.old else None,
            "new": self.new.value,
            "annotator": self.annotator,
            "at": self.at.isoformat(),
        }

    @classmethod
    def from_record(cls, record: dict) -> "LabelAuditEntry":
        return cls(
            fragment_id=record["fragment_id"],
            old=SentimentLabel(record["old"]) if record.get("old") else None,
            new=SentimentLabel(record["new"]),
            annotator=record["annotator"],
            at=parse_timestamp(record["at"]),
        )


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _nfc_opt(text: str | None) -> str | None:
    return _nfc(text) if text is not None else None


def load_corpus(path: str | Path) -> tuple[list[Document], list[Fragment]]:
    """Read a corpus file; returns documents and fragments in file order.

    Raises CorpusFormatError naming the offending line on malformed input
    and DuplicateIdError naming the id on a repeated identifier.
    """
    documents: list[Document] = []
    fragments: list[Fragment] = []
    doc_ids: set[str] = set()
    frag_ids: set[str] = set()
    frag_positions: set[tuple[str, int]] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw_line in enumerate(handle, start=1):
            line = raw_line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                kind = record["kind"]
                if kind == "doc":
                    doc = Document.from_record(record)
                elif kind == "frag":
                    frag = Fragment.from_record(record)
                else:
                    raise KeyError(f"unknown record kind {kind!r}")
            except DuplicateIdError:
                raise
            except Exception as exc:
                raise CorpusFormatError(f"line {lineno}: malformed record ({exc})") from exc
            if kind == "doc":
                if doc.id in doc_ids:
                    raise DuplicateIdError(f"duplicate document id {doc.id!r} (line {lineno})")
                doc_ids.add(doc.id)
                documents.append(doc)
            else:
                if frag.id in frag_ids:
                    raise DuplicateIdError(f"duplicate fragment id {frag.id!r} (line {lineno})")
                position = (frag.doc_id, frag.index)
                if position in frag_positions:
                    raise DuplicateIdError(
                        f"duplicate fragment position {position!r} (line {lineno})"
                    )
                frag_ids.add(frag.id)
                frag_positions.add(position)
                fragments.append(frag)
    return documents, fragments


def save_corpus(
    documents: Iterable[Document],
    fragments: Iterable[Fragment],
    path: str | Path,
) -> None:
    """Write a corpus file atomically (temp file + rename in the target dir)."""
    documents = list(documents)
    fragments = list(fragments)
    _check_unique(documents, fragments)
    path = Path(path)
    lines = [json.dumps(d.to_record(), ensure_ascii=False) for d in documents]
    lines += [json.dumps(f.to_record(), ensure_ascii=False) for f in fragments]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def atomic_write_text(path: Path, content: str) -> None:
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _check_unique(documents: Sequence[Document], fragments: Sequence[Fragment]) -> None:
    seen: set[str] = set()
    for doc in documents:
        if doc.id in seen:
            raise DuplicateIdError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
    seen = set()
    positions: set[tuple[str, int]] = set()
    for frag in fragments:
        if frag.id in seen:
            raise DuplicateIdError(f"duplicate fragment id {frag.id!r}")
        seen.add(frag.id)
        position = (frag.doc_id, frag.index)
        if position in positions:
            raise DuplicateIdError(f"duplicate fragment position {position!r}")
        positions.add(position)


def append_audit_entries(path: str | Path, entries: Iterable[LabelAuditEntry]) -> None:
    with open(path, "a", encoding="utf-8") as handle:
        for entry in entries:
            handle.write(json.dumps(entry.to_record(), ensure_ascii=False) + "\n")


def load_audit_log(path: str | Path) -> list[LabelAuditEntry]:
    entries: list[LabelAuditEntry] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                entries.append(LabelAuditEntry.from_record(json.loads(line)))
    return entries


class Corpus:
    """In-memory corpus store with an append-only label audit trail.

    Mutations return new Fragment values; the store itself serializes
    through whoever owns it (see the service module's single-writer rule).
    """

    def __init__(
        self,
        documents: Iterable[Document] = (),
        fragments: Iterable[Fragment] = (),
    ):
        documents = list(documents)
        fragments = list(fragments)
        _check_unique(documents, fragments)
        self.documents: dict[str, Document] = {d.id: d for d in documents}
        self.fragments: dict[str, Fragment] = {f.id: f for f in fragments}
        self.audit: list[LabelAuditEntry] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "Corpus":
        documents, fragments = load_corpus(path)
        return cls(documents, fragments)

    def save(self, path: str | Path) -> None:
        save_corpus(self.documents.values(), self.fragments.values(), path)

    def apply_label(
        self,
        fragment_id: str,
        label: SentimentLabel,
        annotator: str,
        at: datetime | None = None,
    ) -> Fragment:
        """Set a fragment's label, recording the change in the audit trail."""
        fragment = self.fragments.get(fragment_id)
        if fragment is None:
            raise NotFoundError(f"unknown fragment id {fragment_id!r}")
        entry = LabelAuditEntry(
            fragment_id=fragment_id,
            old=fragment.label,
            new=label,
            annotator=annotator,
            at=at or utc_now(),
        )
        updated = replace(fragment, label=label)
        self.fragments[fragment_id] = updated
        self.audit.append(entry)
        return updated

    def audit_for(self, fragment_id: str) -> list[LabelAuditEntry]:
        return [e for e in self.audit if e.fragment_id == fragment_id]


def class_distribution(fragments: Iterable[Fragment]) -> ClassDistribution:
    """Count labeled fragments per class; unlabeled ones are tallied apart."""
    counts = {label: 0 for label in CLASS_ORDER}
    unlabeled = 0
    for fragment in fragments:
        if fragment.label is None:
            unlabeled += 1
        else:
            counts[fragment.label] += 1
    return ClassDistribution(counts=counts, total=sum(counts.values()), unlabeled=unlabeled)


def _round_half_up(value: Decimal) -> int:
    return int(value.to_integral_value(rounding=ROUND_HALF_UP))


def stratified_split(
    fragments: Iterable[Fragment],
    test_fraction: float,
    seed: int,
) -> DatasetSplit:
    """Deterministic per-class split of labeled fragments.

    Each class with support n contributes round-half-up(n * test_fraction)
    fragments to the test set, chosen by a seeded shuffle of the sorted ids,
    so the split depends only on the id->label mapping, the fraction, and the
    seed. Unlabeled fragments are excluded. If the per-class rounding drifts
    more than 1 from round-half-up(N * test_fraction), the largest class
    gives up or takes one fragment to compensate.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    labeled = [f for f in fragments if f.label is not None]
    by_class: dict[SentimentLabel, list[str]] = {label: [] for label in CLASS_ORDER}
    for fragment in labeled:
        by_class[fragment.label].append(fragment.id)

    fraction = Decimal(repr(float(test_fraction)))
    targets = {
        label: _round_half_up(len(ids) * fraction)
        for label, ids in by_class.items()
        if ids
    }
    if targets:
        global_target = _round_half_up(len(labeled) * fraction)
        drift = sum(targets.values()) - global_target
        if abs(drift) > 1:
            largest = max(targets, key=lambda label: (len(by_class[label]), label.value))
            targets[largest] = max(0, targets[largest] - (1 if drift > 0 else -1))

    test_ids: set[str] = set()
    for label in CLASS_ORDER:
        ids = sorted(by_class[label])
        if not ids:
            continue
        rng = random.Random(f"{seed}:{label.value}")
        rng.shuffle(ids)
        take = min(targets[label], len(ids))
        test_ids.update(ids[:take])
    train_ids = {f.id for f in labeled} - test_ids
    return DatasetSplit(
        train_ids=frozenset(train_ids),
        test_ids=frozenset(test_ids),
        seed=seed,
        test_fraction=float(test_fraction),
    )

"""Screening service: corpus management, screening runs, labeling and triage
queues, and evaluation runs over an append-only event store.

All mutations serialize through one lock (single-writer); reads take a
consistent snapshot under the same lock. The HTTP layer in webapp.py is a
thin shell over ScreeningService, so tests can drive the service directly.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .classify import (
    Prediction,
    PredictionSource,
    RemoteAdapterConfig,
    ScreenBatchResult,
    screen_batch,
    train_baseline,
)
from .corpus import (
    CLASS_ORDER,
    Corpus,
    Document,
    DocumentSource,
    Fragment,
    LabelAuditEntry,
    SentimentLabel,
    load_corpus,
    parse_timestamp,
    stratified_split,
    utc_now,
)
from .errors import (
    ConflictError,
    EmptyDocumentError,
    NotFoundError,
    TrainingError,
)
from .metrics import (
    EvalReport,
    RunMetadata,
    build_eval_report,
    report_to_dict,
)
from .store import EventStore
from .textprep import clean_document, segment_fragments


class TriageStatus(str, Enum):
    PENDING = "pending"
    ESCALATED = "escalated"
    DISMISSED = "dismissed"


_DECISION_TO_STATUS = {
    "escalate": TriageStatus.ESCALATED,
    "dismiss": TriageStatus.DISMISSED,
}


@dataclass(frozen=True)
class TriageItem:
    item_id: str
    fragment_id: str
    run_id: str
    prediction: Prediction
    status: TriageStatus
    created_at: datetime
    decided_by: str | None = None
    decided_at: datetime | None = None

    def __post_init__(self):
        decided = self.status is not TriageStatus.PENDING
        if decided != (self.decided_by is not None) or decided != (self.decided_at is not None):
            raise ValueError("decided_by/decided_at must be set exactly when status != pending")

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "fragment_id": self.fragment_id,
            "run_id": self.run_id,
            "prediction": self.prediction.to_dict(),
            "status": self.status.value,
            "created_at": self.created_at.isoformat(),
            "decided_by": self.decided_by,
            "decided_at": self.decided_at.isoformat() if self.decided_at else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TriageItem":
        return cls(
            item_id=data["item_id"],
            fragment_id=data["fragment_id"],
            run_id=data["run_id"],
            prediction=Prediction.from_dict(data["prediction"]),
            status=TriageStatus(data["status"]),
            created_at=parse_timestamp(data["created_at"]),
            decided_by=data.get("decided_by"),
            decided_at=parse_timestamp(data["decided_at"]) if data.get("decided_at") else None,
        )


@dataclass(frozen=True)
class EvalRunRecord:
    run_id: str
    dataset_id: str
    classifier: dict
    fraction: float
    seed: int
    created_at: datetime
    pairs: tuple[tuple[str, SentimentLabel, SentimentLabel], ...]
    report: EvalReport
    errors: tuple[tuple[str, str], ...] = ()

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "dataset_id": self.dataset_id,
            "classifier": self.classifier,
            "fraction": self.fraction,
            "seed": self.seed,
            "created_at": self.created_at.isoformat(),
            "pairs": [
                [frag_id, predicted.value, actual.value]
                for frag_id, predicted, actual in self.pairs
            ],
            "errors": [list(item) for item in self.errors],
            "partial": self.partial,
            "report": report_to_dict(self.report),
        }


def classifier_id(descriptor: dict) -> str:
    kind = descriptor.get("kind", "baseline")
    if kind == "baseline":
        return f"baseline(alpha={descriptor.get('alpha', 1.0)})"
    if kind == "remote":
        return f"remote({descriptor.get('model_name', 'unknown')})"
    if kind == "precomputed":
        return "precomputed"
    return kind


@dataclass(frozen=True)
class _PrecomputedClassifier:
    """Evaluates predictions produced outside this service (e.g. an external
    model whose outputs were exported) against the stored labels."""

    predictions: dict

    def predict(self, fragment: Fragment) -> Prediction:
        value = self.predictions.get(fragment.id)
        if value is None:
            raise NotFoundError(f"no precomputed prediction for fragment {fragment.id!r}")
        label = SentimentLabel(value)
        scores = {c: 1.0 if c is label else 0.0 for c in CLASS_ORDER}
        return Prediction(label=label, scores=scores, source=PredictionSource.REMOTE)


def build_classifier(descriptor: dict, training_fragments: Sequence[Fragment]):
    kind = descriptor.get("kind", "baseline")
    if kind == "baseline":
        return train_baseline(training_fragments, float(descriptor.get("alpha", 1.0)))
    if kind == "remote":
        return RemoteAdapterConfig(
            endpoint=descriptor["endpoint"],
            model_name=descriptor.get("model_name", "default"),
            prompt_template=descriptor.get("prompt_template")
            or RemoteAdapterConfig.__dataclass_fields__["prompt_template"].default,
            timeout=float(descriptor.get("timeout", 10.0)),
            max_retries=int(descriptor.get("max_retries", 2)),
        )
    if kind == "precomputed":
        return _PrecomputedClassifier(predictions=dict(descriptor.get("predictions", {})))
    raise ValueError(f"unknown classifier kind {kind!r}")


def evaluate_fragments(
    fragments: Iterable[Fragment],
    classifier_descriptor: dict,
    fraction: float,
    seed: int,
    dataset_id: str = "default",
    timestamp: str | None = None,
) -> tuple[EvalReport, list[tuple[str, SentimentLabel, SentimentLabel]], list[tuple[str, str]]]:
    """Split -> train (for the baseline) -> predict the test set -> report.

    Deterministic for the baseline classifier given (fragments, fraction,
    seed): the test set is traversed in sorted-id order and the timestamp is
    isolated in metadata.
    """
    labeled = [f for f in fragments if f.label is not None]
    for label in CLASS_ORDER:
        if not any(f.label is label for f in labeled):
            raise TrainingError(
                f"dataset {dataset_id!r} has no {label.value} fragments; "
                f"labeled counts: " + ", ".join(
                    f"{c.value}={sum(1 for f in labeled if f.label is c)}" for c in CLASS_ORDER
                )
            )
    split = stratified_split(labeled, fraction, seed)
    by_id = {f.id: f for f in labeled}
    train = [by_id[i] for i in sorted(split.train_ids)]
    test = [by_id[i] for i in sorted(split.test_ids)]
    classifier = build_classifier(classifier_descriptor, train)
    result = screen_batch(classifier, test)
    pairs: list[tuple[str, SentimentLabel, SentimentLabel]] = []
    errors: list[tuple[str, str]] = []
    for item in result.items:
        if item.prediction is None:
            errors.append((item.fragment.id, item.error or "unknown error"))
        else:
            pairs.append((item.fragment.id, item.prediction.label, item.fragment.label))
    metadata = RunMetadata(
        classifier_id=classifier_id(classifier_descriptor),
        dataset_id=dataset_id,
        timestamp=timestamp if timestamp is not None else utc_now().isoformat(),
        seed=seed,
        fraction=fraction,
    )
    report = build_eval_report([(p, a) for _, p, a in pairs], metadata)
    return report, pairs, errors


class ScreeningService:
    """Single-writer service state; pass store=None for an ephemeral instance."""

    def __init__(self, store: EventStore | None = None, dataset_id: str = "default"):
        self.store = store
        self.dataset_id = dataset_id
        self.corpus = Corpus()
        self.triage_items: dict[str, TriageItem] = {}
        self.runs: dict[str, EvalRunRecord] = {}
        self._lock = threading.RLock()
        if store is not None:
            self._replay()

    # -- persistence ---------------------------------------------------

    def _append(self, family: str, event: dict) -> None:
        if self.store is not None:
            self.store.append(family, event)

    def _replay(self) -> None:
        for event in self.store.read_all("corpus"):
            if event["event"] == "doc":
                doc = Document.from_record(event["record"])
                self.corpus.documents[doc.id] = doc
            elif event["event"] == "frag":
                frag = Fragment.from_record(event["record"])
                self.corpus.fragments[frag.id] = frag
        for event in self.store.read_all("labels"):
            entry = LabelAuditEntry.from_record(event)
            self.corpus.audit.append(entry)
            fragment = self.corpus.fragments.get(entry.fragment_id)
            if fragment is not None:
                self.corpus.fragments[entry.fragment_id] = replace(fragment, label=entry.new)
        for event in self.store.read_all("triage"):
            if event["event"] == "enqueued":
                item = TriageItem.from_dict(event["item"])
                self.triage_items.setdefault(item.item_id, item)
            elif event["event"] == "decided":
                item = self.triage_items.get(event["item_id"])
                if item is not None:
                    self.triage_items[item.item_id] = replace(
                        item,
                        status=TriageStatus(event["status"]),
                        decided_by=event["analyst"],
                        decided_at=parse_timestamp(event["at"]),
                    )
        for event in self.store.read_all("runs"):
            record = self._run_from_dict(event["record"])
            self.runs[record.run_id] = record

    def _run_from_dict(self, data: dict) -> EvalRunRecord:
        pairs = tuple(
            (frag_id, SentimentLabel(predicted), SentimentLabel(actual))
            for frag_id, predicted, actual in data["pairs"]
        )
        meta = data["report"]["metadata"]
        metadata = RunMetadata(
            classifier_id=meta["classifier_id"],
            dataset_id=meta["dataset_id"],
            timestamp=meta["timestamp"],
            seed=meta.get("seed"),
            fraction=meta.get("fraction"),
        )
        report = build_eval_report([(p, a) for _, p, a in pairs], metadata)
        return EvalRunRecord(
            run_id=data["run_id"],
            dataset_id=data["dataset_id"],
            classifier=data["classifier"],
            fraction=data["fraction"],
            seed=data["seed"],
            created_at=parse_timestamp(data["created_at"]),
            pairs=pairs,
            report=report,
            errors=tuple((f, m) for f, m in data.get("errors", [])),
        )

    # -- corpus --------------------------------------------------------

    def load_dataset(self, path: str | Path) -> dict:
        """Import a corpus file into the store (documents + fragments)."""
        documents, fragments = load_corpus(path)
        with self._lock:
            added_docs = added_frags = 0
            for doc in documents:
                if doc.id in self.corpus.documents:
                    continue
                self._append("corpus", {"event": "doc", "record": doc.to_record()})
                self.corpus.documents[doc.id] = doc
                added_docs += 1
            for frag in fragments:
                if frag.id in self.corpus.fragments:
                    continue
                self._append("corpus", {"event": "frag", "record": frag.to_record()})
                self.corpus.fragments[frag.id] = frag
                added_frags += 1
        return {"documents": added_docs, "fragments": added_frags}

    def add_documents(self, payloads: Sequence[dict]) -> dict:
        """Ingest raw documents: clean, segment, persist. Documents that come
        out empty after cleaning are skipped and counted."""
        with self._lock:
            added_docs: list[str] = []
            added_frags = 0
            skipped = 0
            for payload in payloads:
                raw_text = payload.get("raw_text", "")
                doc_id = payload.get("id") or f"doc-{uuid.uuid4().hex[:12]}"
                if doc_id in self.corpus.documents:
                    raise ConflictError(f"document id {doc_id!r} already exists")
                document = Document(
                    id=doc_id,
                    source=DocumentSource(payload.get("source", "manual")),
                    origin_ref=payload.get("origin_ref", ""),
                    fetched_at=utc_now(),
                    raw_text=raw_text,
                    title=payload.get("title"),
                )
                try:
                    document = clean_document(document)
                except EmptyDocumentError:
                    skipped += 1
                    continue
                fragments = segment_fragments(document)
                self._append("corpus", {"event": "doc", "record": document.to_record()})
                self.corpus.documents[document.id] = document
                for frag in fragments:
                    self._append("corpus", {"event": "frag", "record": frag.to_record()})
                    self.corpus.fragments[frag.id] = frag
                    added_frags += 1
                added_docs.append(document.id)
            return {
                "documents": len(added_docs),
                "fragments": added_frags,
                "skipped": skipped,
                "document_ids": added_docs,
            }

    def get_fragment(self, fragment_id: str) -> Fragment:
        fragment = self.corpus.fragments.get(fragment_id)
        if fragment is None:
            raise NotFoundError(f"unknown fragment id {fragment_id!r}")
        return fragment

    def apply_label(self, fragment_id: str, label: SentimentLabel, annotator: str) -> Fragment:
        with self._lock:
            fragment = self.get_fragment(fragment_id)
            entry = LabelAuditEntry(
                fragment_id=fragment_id,
                old=fragment.label,
                new=label,
                annotator=annotator,
                at=utc_now(),
            )
            self._append("labels", entry.to_record())
            updated = replace(fragment, label=label)
            self.corpus.fragments[fragment_id] = updated
            self.corpus.audit.append(entry)
            return updated

    def labeling_queue(self, cursor: str | None = None, page_size: int = 20) -> dict:
        with self._lock:
            unlabeled = [f for f in self.corpus.fragments.values() if f.label is None]
            offset = int(cursor) if cursor else 0
            page = unlabeled[offset : offset + page_size]
            next_cursor = str(offset + page_size) if offset + page_size < len(unlabeled) else None
            return {
                "items": page,
                "cursor": next_cursor,
                "total_unlabeled": len(unlabeled),
            }

    # -- screening and triage -------------------------------------------

    def screen(
        self,
        fragment_ids: Sequence[str] | None = None,
        texts: Sequence[str] | None = None,
        classifier_descriptor: dict | None = None,
        screen_id: str | None = None,
    ) -> dict:
        descriptor = classifier_descriptor or {"kind": "baseline", "alpha": 1.0}
        with self._lock:
            fragments: list[Fragment] = []
            if fragment_ids:
                fragments.extend(self.get_fragment(i) for i in fragment_ids)
            if texts:
                summary = self.add_documents(
                    [
                        {
                            "source": "manual",
                            "origin_ref": "screen:inline",
                            "raw_text": text,
                        }
                        for text in texts
                    ]
                )
                for doc_id in summary["document_ids"]:
                    fragments.extend(
                        f for f in self.corpus.fragments.values() if f.doc_id == doc_id
                    )
            if screen_id is None:
                key = "\x1f".join(sorted(f.id for f in fragments)) + repr(sorted(descriptor.items()))
                screen_id = "screen-" + hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]
            labeled = [f for f in self.corpus.fragments.values() if f.label is not None]
            classifier = build_classifier(descriptor, labeled)
            result = screen_batch(classifier, fragments)
            items = self.enqueue_for_review(result, screen_id)
            return {"screen_id": screen_id, "result": result, "enqueued": items}

    def enqueue_for_review(self, batch: ScreenBatchResult, run_id: str) -> list[TriageItem]:
        """One pending TriageItem per flagged (negative) fragment, idempotent
        per (fragment, run): re-enqueueing never duplicates."""
        with self._lock:
            items: list[TriageItem] = []
            for screened in batch.flagged:
                item_id = f"{run_id}:{screened.fragment.id}"
                existing = self.triage_items.get(item_id)
                if existing is not None:
                    items.append(existing)
                    continue
                item = TriageItem(
                    item_id=item_id,
                    fragment_id=screened.fragment.id,
                    run_id=run_id,
                    prediction=screened.prediction,
                    status=TriageStatus.PENDING,
                    created_at=utc_now(),
                )
                self._append("triage", {"event": "enqueued", "item": item.to_dict()})
                self.triage_items[item_id] = item
                items.append(item)
            return items

    def record_triage_decision(self, item_id: str, decision: str, analyst: str) -> TriageItem:
        if decision not in _DECISION_TO_STATUS:
            raise ValueError(f"decision must be escalate or dismiss, got {decision!r}")
        with self._lock:
            item = self.triage_items.get(item_id)
            if item is None:
                raise NotFoundError(f"unknown triage item {item_id!r}")
            if item.status is not TriageStatus.PENDING:
                raise ConflictError(
                    f"triage item {item_id!r} already decided ({item.status.value})"
                )
            now = utc_now()
            status = _DECISION_TO_STATUS[decision]
            self._append(
                "triage",
                {
                    "event": "decided",
                    "item_id": item_id,
                    "status": status.value,
                    "analyst": analyst,
                    "at": now.isoformat(),
                },
            )
            updated = replace(item, status=status, decided_by=analyst, decided_at=now)
            self.triage_items[item_id] = updated
            return updated

    def triage_queue(self, status: TriageStatus | None = TriageStatus.PENDING) -> list[TriageItem]:
        with self._lock:
            items = [
                item
                for item in self.triage_items.values()
                if status is None or item.status is status
            ]
            items.sort(key=lambda item: (item.created_at, item.item_id))  # oldest first
            return items

    # -- evaluation runs -------------------------------------------------

    def run_evaluation(
        self,
        dataset_id: str,
        classifier_descriptor: dict,
        fraction: float,
        seed: int,
    ) -> EvalRunRecord:
        if dataset_id != self.dataset_id:
            raise NotFoundError(f"unknown dataset {dataset_id!r}")
        with self._lock:
            report, pairs, errors = evaluate_fragments(
                self.corpus.fragments.values(),
                classifier_descriptor,
                fraction,
                seed,
                dataset_id=dataset_id,
            )
            run_id = f"run-{len(self.runs):04d}-{uuid.uuid4().hex[:8]}"
            record = EvalRunRecord(
                run_id=run_id,
                dataset_id=dataset_id,
                classifier=classifier_descriptor,
                fraction=fraction,
                seed=seed,
                created_at=utc_now(),
                pairs=tuple(pairs),
                report=report,
                errors=tuple(errors),
            )
            self._append("runs", {"event": "run", "record": record.to_dict()})
            self.runs[run_id] = record
            return record

    def get_run(self, run_id: str) -> EvalRunRecord:
        record = self.runs.get(run_id)
        if record is None:
            raise NotFoundError(f"unknown eval run {run_id!r}")
        return record

    def verify_run(self, run_id: str) -> bool:
        """Consistency check: every number in the stored report must be
        recomputable from the stored (predicted, actual) pairs."""
        record = self.get_run(run_id)
        recomputed = build_eval_report(
            [(p, a) for _, p, a in record.pairs], record.report.metadata
        )
        return report_to_dict(recomputed) == report_to_dict(record.report)

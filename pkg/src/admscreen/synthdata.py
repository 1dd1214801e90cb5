"""Deterministic synthetic bilingual corpus for offline evaluation runs.

The real screening corpora are operator data and are not shipped; this
generator builds a labeled English/Bangla fragment set with class-separable
vocabulary so the pipeline, splitter, and metrics can be exercised
end-to-end with known-good behavior. A pre-generated copy is bundled as
package data (data/synthetic_corpus.jsonl).
"""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

from .corpus import (
    CLASS_ORDER,
    Document,
    DocumentSource,
    Fragment,
    SentimentLabel,
    parse_timestamp,
    save_corpus,
)
from .textprep import detect_language

BUNDLED_NAME = "synthetic_corpus.jsonl"

_NEGATIVE_EN = (
    "fraud", "scam", "laundering", "stolen", "arrested", "penalty",
    "bribe", "embezzlement", "complaint", "blocked",
)
_NEGATIVE_BN = (
    "জালিয়াতি", "প্রতারণা", "পাচার", "দুর্নীতি", "চুরি",
    "গ্রেফতার", "জরিমানা", "ঘুষ", "অভিযোগ", "মামলা",
)
_POSITIVE_EN = (
    "excellent", "reliable", "helpful", "smooth", "convenient",
    "secure", "satisfied", "trusted", "improved", "fast",
)
_POSITIVE_BN = (
    "চমৎকার", "ভালো", "দ্রুত", "সহজ", "নিরাপদ",
    "সুবিধা", "ধন্যবাদ", "আস্থা", "উন্নতি", "সন্তুষ্ট",
)
_NEUTRAL_EN = (
    "agent", "account", "transaction", "balance", "wallet",
    "branch", "customer", "update", "notice", "weekly",
)
_NEUTRAL_BN = (
    "এজেন্ট", "অ্যাকাউন্ট", "লেনদেন", "টাকা", "গ্রাহক",
    "শাখা", "নোটিশ", "সাপ্তাহিক", "মোবাইল", "ব্যাংকিং",
)
_FILLER_EN = ("the", "service", "was", "for", "this", "today", "about", "report")
_FILLER_BN = ("আজ", "একটি", "এই", "নিয়ে", "খবর", "বাজার", "সেবা", "নতুন")

_CLASS_WORDS = {
    SentimentLabel.NEGATIVE: {"en": _NEGATIVE_EN, "bn": _NEGATIVE_BN},
    SentimentLabel.NEUTRAL: {"en": _NEUTRAL_EN, "bn": _NEUTRAL_BN},
    SentimentLabel.POSITIVE: {"en": _POSITIVE_EN, "bn": _POSITIVE_BN},
}
_FILLERS = {"en": _FILLER_EN, "bn": _FILLER_BN}

#: Class mix loosely mirrors a screening feed: mostly neutral, with enough
#: adverse/positive mass to train on. Majority class = 60%.
DEFAULT_MIX = {
    SentimentLabel.NEGATIVE: 60,
    SentimentLabel.NEUTRAL: 180,
    SentimentLabel.POSITIVE: 60,
}

_BASE_TIME = "2024-09-01T00:00:00+00:00"


def _fragment_text(rng: random.Random, label: SentimentLabel) -> str:
    script = rng.choice(("en", "bn", "mix"))
    if script == "mix":
        keyword_pool = _CLASS_WORDS[label]["en"] + _CLASS_WORDS[label]["bn"]
        filler_pool = _FILLER_EN + _FILLER_BN
        terminator = rng.choice((".", "।"))
    else:
        keyword_pool = _CLASS_WORDS[label][script]
        filler_pool = _FILLERS[script]
        terminator = "." if script == "en" else "।"
    words = rng.sample(keyword_pool, k=rng.randint(1, 3))
    words += rng.choices(filler_pool, k=rng.randint(2, 4))
    # A pinch of label noise: rarely borrow a word from another class so the
    # classifier has something to get wrong.
    if rng.random() < 0.05:
        other = rng.choice([c for c in CLASS_ORDER if c is not label])
        words.append(rng.choice(_CLASS_WORDS[other]["en"]))
    rng.shuffle(words)
    return " ".join(words) + terminator


def build_synthetic_corpus(
    seed: int = 42,
    mix: dict[SentimentLabel, int] | None = None,
    fragments_per_doc: int = 10,
) -> tuple[list[Document], list[Fragment]]:
    """Build the labeled corpus; identical (seed, mix) gives identical records."""
    rng = random.Random(f"synth:{seed}")
    mix = dict(mix or DEFAULT_MIX)
    labels: list[SentimentLabel] = []
    for label in CLASS_ORDER:
        labels.extend([label] * mix.get(label, 0))
    rng.shuffle(labels)

    base_time = parse_timestamp(_BASE_TIME)
    documents: list[Document] = []
    fragments: list[Fragment] = []
    for start in range(0, len(labels), fragments_per_doc):
        chunk = labels[start : start + fragments_per_doc]
        doc_id = f"synth-{len(documents):04d}"
        texts = [_fragment_text(rng, label) for label in chunk]
        raw_text = " ".join(texts)
        documents.append(
            Document(
                id=doc_id,
                source=DocumentSource.MANUAL,
                origin_ref=f"synthetic://{doc_id}",
                fetched_at=base_time,
                raw_text=raw_text,
                cleaned_text=raw_text,
            )
        )
        for index, (text, label) in enumerate(zip(texts, chunk)):
            fragments.append(
                Fragment(
                    id=f"{doc_id}:{index}",
                    doc_id=doc_id,
                    index=index,
                    text=text,
                    lang=detect_language(text),
                    label=label,
                )
            )
    return documents, fragments


def write_synthetic_corpus(path: str | Path, seed: int = 42) -> None:
    documents, fragments = build_synthetic_corpus(seed=seed)
    save_corpus(documents, fragments, path)


def bundled_corpus_path() -> Path:
    """Filesystem path of the bundled synthetic corpus."""
    return Path(str(resources.files("admscreen").joinpath("data", BUNDLED_NAME)))

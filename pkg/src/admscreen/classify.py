"""Sentiment classifiers: a trainable offline baseline and a remote adapter.

The baseline is a multinomial bag-of-words probabilistic model over the
shared English+Bangla vocabulary; it exists so evaluations run offline and
deterministically. The remote adapter calls any HTTP endpoint speaking the
simple {model, prompt} -> {text} JSON contract and insists on a one-word
answer.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Protocol

import requests

from .corpus import CLASS_ORDER, Fragment, SentimentLabel, atomic_write_text
from .errors import (
    ProtocolError,
    RemoteUnavailableError,
    ScreeningError,
    TrainingError,
)
from .textprep import tokenize

MODEL_FORMAT_VERSION = 1

# Default template is authored for this toolkit (operators may override);
# it instructs the constrained one-word output the adapter can verify.
DEFAULT_PROMPT_TEMPLATE = (
    "Classify the sentiment of the following sentence as exactly one word: "
    "positive, neutral, or negative. The sentence may be in English or Bangla.\n\n"
    "Sentence: {text}\n\nAnswer with one word only."
)


class PredictionSource(str, Enum):
    BASELINE = "baseline"
    REMOTE = "remote"


@dataclass(frozen=True)
class Prediction:
    """A classification outcome; scores are normalized probabilities."""

    label: SentimentLabel
    scores: Mapping[SentimentLabel, float]
    source: PredictionSource

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "scores": {label.value: self.scores[label] for label in CLASS_ORDER},
            "source": self.source.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Prediction":
        return cls(
            label=SentimentLabel(data["label"]),
            scores={SentimentLabel(k): v for k, v in data["scores"].items()},
            source=PredictionSource(data["source"]),
        )


@dataclass(frozen=True)
class BaselineModel:
    smoothing_alpha: float
    class_priors: Mapping[SentimentLabel, float]
    class_totals: Mapping[SentimentLabel, int]
    class_token_counts: Mapping[SentimentLabel, Mapping[str, int]]
    vocabulary: frozenset[str]

    def token_probability(self, label: SentimentLabel, token: str) -> float:
        """Additively smoothed P(token | class); unseen tokens get the
        smoothing mass but do not grow the vocabulary."""
        count = self.class_token_counts[label].get(token, 0)
        denominator = self.class_totals[label] + self.smoothing_alpha * len(self.vocabulary)
        return (count + self.smoothing_alpha) / denominator


def train_baseline(
    fragments: Iterable[Fragment],
    smoothing_alpha: float = 1.0,
) -> BaselineModel:
    """Fit priors and per-class token counts from labeled fragments.

    Requires at least one fragment per class; fragments with no tokens still
    count toward the priors. Deterministic for a given input multiset.
    """
    if smoothing_alpha <= 0:
        raise ValueError(f"smoothing_alpha must be positive, got {smoothing_alpha}")
    fragments = list(fragments)
    class_counts = {label: 0 for label in CLASS_ORDER}
    token_counts: dict[SentimentLabel, dict[str, int]] = {label: {} for label in CLASS_ORDER}
    totals = {label: 0 for label in CLASS_ORDER}
    vocabulary: set[str] = set()
    for fragment in fragments:
        if fragment.label is None:
            raise TrainingError(f"fragment {fragment.id!r} is unlabeled")
        class_counts[fragment.label] += 1
        for token in tokenize(fragment.text, fragment.lang):
            vocabulary.add(token)
            token_counts[fragment.label][token] = token_counts[fragment.label].get(token, 0) + 1
            totals[fragment.label] += 1
    for label in CLASS_ORDER:
        if class_counts[label] == 0:
            raise TrainingError(f"training data has no {label.value} examples")
    n = len(fragments)
    priors = {label: class_counts[label] / n for label in CLASS_ORDER}
    return BaselineModel(
        smoothing_alpha=smoothing_alpha,
        class_priors=priors,
        class_totals=totals,
        class_token_counts={label: dict(token_counts[label]) for label in CLASS_ORDER},
        vocabulary=frozenset(vocabulary),
    )


def _normalize_log_scores(log_scores: Mapping[SentimentLabel, float]) -> dict[SentimentLabel, float]:
    peak = max(log_scores.values())
    unnormalized = {label: math.exp(value - peak) for label, value in log_scores.items()}
    z = sum(unnormalized.values())
    return {label: value / z for label, value in unnormalized.items()}


def _argmax_in_class_order(scores: Mapping[SentimentLabel, float]) -> SentimentLabel:
    best = CLASS_ORDER[0]
    for label in CLASS_ORDER[1:]:
        if scores[label] > scores[best]:
            best = label
    return best


def predict_baseline(model: BaselineModel, fragment: Fragment) -> Prediction:
    """Log-domain posterior over the three classes; exact ties fall to the
    first class in canonical order (negative), failing toward investigation."""
    try:
        tokens = list(tokenize(fragment.text, fragment.lang))
    except ValueError:
        tokens = []
    log_scores = {}
    for label in CLASS_ORDER:
        score = math.log(model.class_priors[label])
        for token in tokens:
            score += math.log(model.token_probability(label, token))
        log_scores[label] = score
    return Prediction(
        label=_argmax_in_class_order(log_scores),
        scores=_normalize_log_scores(log_scores),
        source=PredictionSource.BASELINE,
    )


@dataclass(frozen=True)
class RemoteAdapterConfig:
    endpoint: str
    model_name: str
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    timeout: float = 10.0
    max_retries: int = 2
    backoff_base: float = 1.0

    def __post_init__(self):
        if self.prompt_template.count("{text}") != 1:
            raise ValueError("prompt_template must contain exactly one {text} slot")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


_VALID_ANSWERS = {label.value: label for label in SentimentLabel}


def classify_remote(config: RemoteAdapterConfig, fragment: Fragment) -> Prediction:
    """Send the prompt to the remote endpoint and parse its one-word answer.

    Transport failures and 5xx responses are retried with exponential
    backoff up to max_retries, then surfaced as RemoteUnavailableError.
    A response outside the contract raises ProtocolError carrying the raw
    payload.
    """
    prompt = config.prompt_template.replace("{text}", fragment.text)
    body = {"model": config.model_name, "prompt": prompt}
    last_failure: Exception | None = None
    for attempt in range(config.max_retries + 1):
        try:
            response = requests.post(config.endpoint, json=body, timeout=config.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_failure = exc
        else:
            if response.status_code >= 500:
                last_failure = RemoteUnavailableError(
                    f"server error {response.status_code} from {config.endpoint}"
                )
            else:
                return _parse_remote_response(response)
        if attempt < config.max_retries:
            time.sleep(config.backoff_base * (2**attempt))
    raise RemoteUnavailableError(
        f"remote classifier unavailable after {config.max_retries + 1} attempts: {last_failure}"
    )


def _parse_remote_response(response: "requests.Response") -> Prediction:
    raw = response.text
    if response.status_code != 200:
        raise ProtocolError(
            f"unexpected status {response.status_code} from remote classifier", raw_response=raw
        )
    try:
        payload = response.json()
        answer = payload["text"]
    except Exception as exc:
        raise ProtocolError(f"remote response is not {{text}} JSON: {exc}", raw_response=raw)
    normalized = str(answer).strip().lower()
    label = _VALID_ANSWERS.get(normalized)
    if label is None:
        raise ProtocolError(
            f"remote answer {answer!r} is not one of positive/neutral/negative",
            raw_response=raw,
        )
    scores = {c: 1.0 if c is label else 0.0 for c in CLASS_ORDER}
    return Prediction(label=label, scores=scores, source=PredictionSource.REMOTE)


class Classifier(Protocol):  # pragma: no cover - typing helper
    def predict(self, fragment: Fragment) -> Prediction: ...


@dataclass(frozen=True)
class ScreenedItem:
    fragment: Fragment
    prediction: Prediction | None
    error: str | None = None

    @property
    def flagged(self) -> bool:
        return self.prediction is not None and self.prediction.label is SentimentLabel.NEGATIVE


@dataclass(frozen=True)
class ScreenBatchResult:
    items: tuple[ScreenedItem, ...]

    @property
    def flagged(self) -> tuple[ScreenedItem, ...]:
        return tuple(item for item in self.items if item.flagged)

    @property
    def error_count(self) -> int:
        return sum(1 for item in self.items if item.error is not None)


def _predict_one(classifier, fragment: Fragment) -> Prediction:
    if isinstance(classifier, BaselineModel):
        return predict_baseline(classifier, fragment)
    if isinstance(classifier, RemoteAdapterConfig):
        return classify_remote(classifier, fragment)
    predict = getattr(classifier, "predict", None)
    if callable(predict):
        return predict(fragment)
    raise TypeError(f"unsupported classifier {type(classifier).__name__}")


def screen_batch(classifier, fragments: Iterable[Fragment]) -> ScreenBatchResult:
    """Classify every fragment; per-item failures are recorded in place so
    one bad remote call never aborts the batch. Output order = input order."""
    items: list[ScreenedItem] = []
    for fragment in fragments:
        try:
            prediction = _predict_one(classifier, fragment)
        except ScreeningError as exc:
            items.append(ScreenedItem(fragment=fragment, prediction=None, error=str(exc)))
        else:
            items.append(ScreenedItem(fragment=fragment, prediction=prediction))
    return ScreenBatchResult(items=tuple(items))


def save_model(model: BaselineModel, path: str | Path) -> None:
    """Versioned line-delimited parameter dump: one meta line, then one line
    per vocabulary token (sorted) with its per-class counts in canonical
    class order."""
    meta = {
        "kind": "meta",
        "format_version": MODEL_FORMAT_VERSION,
        "smoothing_alpha": model.smoothing_alpha,
        "classes": [label.value for label in CLASS_ORDER],
        "priors": [model.class_priors[label] for label in CLASS_ORDER],
        "class_totals": [model.class_totals[label] for label in CLASS_ORDER],
        "vocabulary_size": len(model.vocabulary),
    }
    lines = [json.dumps(meta, ensure_ascii=False)]
    for token in sorted(model.vocabulary):
        counts = [model.class_token_counts[label].get(token, 0) for label in CLASS_ORDER]
        lines.append(json.dumps({"kind": "token", "t": token, "c": counts}, ensure_ascii=False))
    atomic_write_text(Path(path), "".join(line + "\n" for line in lines))


def load_model(path: str | Path) -> BaselineModel:
    with open(path, "r", encoding="utf-8") as handle:
        meta = json.loads(handle.readline())
        if meta.get("kind") != "meta" or meta.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"{path}: not a model file of format version {MODEL_FORMAT_VERSION}")
        token_counts: dict[SentimentLabel, dict[str, int]] = {label: {} for label in CLASS_ORDER}
        vocabulary: set[str] = set()
        for line in handle:
            record = json.loads(line)
            vocabulary.add(record["t"])
            for label, count in zip(CLASS_ORDER, record["c"]):
                if count:
                    token_counts[label][record["t"]] = count
    if len(vocabulary) != meta["vocabulary_size"]:
        raise ValueError(f"{path}: vocabulary size mismatch")
    return BaselineModel(
        smoothing_alpha=meta["smoothing_alpha"],
        class_priors=dict(zip(CLASS_ORDER, meta["priors"])),
        class_totals=dict(zip(CLASS_ORDER, meta["class_totals"])),
        class_token_counts={label: dict(counts) for label, counts in token_counts.items()},
        vocabulary=frozenset(vocabulary),
    )

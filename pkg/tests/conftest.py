from __future__ import annotations

from datetime import datetime, timezone

import pytest

from admscreen.corpus import (
    CLASS_ORDER,
    Document,
    DocumentSource,
    Fragment,
    LanguageTag,
    SentimentLabel,
)
from admscreen.metrics import ConfusionMatrix3

# Published evaluation matrix used as the reference fixture throughout the
# suite: rows = predicted, columns = actual, order (negative, neutral,
# positive).
REFERENCE_ROWS = ((50, 23, 2), (32, 1603, 16), (0, 23, 17))

FIXED_TIME = datetime(2024, 9, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_document(doc_id="d1", raw_text="Some text.", **kwargs) -> Document:
    defaults = dict(
        id=doc_id,
        source=DocumentSource.MANUAL,
        origin_ref="test://fixture",
        fetched_at=FIXED_TIME,
        raw_text=raw_text,
    )
    defaults.update(kwargs)
    return Document(**defaults)


def make_fragment(
    frag_id="d1#0",
    text="Some text.",
    label: SentimentLabel | None = None,
    doc_id="d1",
    index=0,
    lang=LanguageTag.ENGLISH,
    **kwargs,
) -> Fragment:
    return Fragment(
        id=frag_id, doc_id=doc_id, index=index, text=text, lang=lang, label=label, **kwargs
    )


def reference_pairs() -> list[tuple[SentimentLabel, SentimentLabel]]:
    pairs = []
    for i, predicted in enumerate(CLASS_ORDER):
        for j, actual in enumerate(CLASS_ORDER):
            pairs.extend([(predicted, actual)] * REFERENCE_ROWS[i][j])
    return pairs


@pytest.fixture
def reference_matrix() -> ConfusionMatrix3:
    return ConfusionMatrix3.from_rows(REFERENCE_ROWS)


# ---------------------------------------------------------------------------
# Acceptance reporting: one pass/fail line per criterion after the run.

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call":
        _ACCEPTANCE_RESULTS[report.nodeid] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.failed:
        _ACCEPTANCE_RESULTS[report.nodeid] = "ERROR"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE_RESULTS):
        status = _ACCEPTANCE_RESULTS[nodeid]
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{status}: {name}")

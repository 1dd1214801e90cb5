from __future__ import annotations

import random

import pytest

from admscreen.corpus import LanguageTag
from admscreen.errors import EmptyDocumentError
from admscreen.textprep import (
    clean_document,
    clean_text,
    detect_language,
    segment_fragments,
    tokenize,
)

from conftest import make_document


class TestCleanDocument:
    def test_strips_tags_and_images(self):
        doc = make_document(raw_text="<p>Agent <b>fraud</b> reported</p><img alt='photo'>")
        assert clean_document(doc).cleaned_text == "Agent fraud reported"

    def test_plain_text_unchanged(self):
        doc = make_document(raw_text="Plain text stays put.")
        cleaned = clean_document(doc)
        assert cleaned.cleaned_text == "Plain text stays put."
        assert clean_document(cleaned).cleaned_text == cleaned.cleaned_text

    def test_only_image_raises(self):
        doc = make_document(raw_text="<img src='x.png' alt='just a photo'>")
        with pytest.raises(EmptyDocumentError):
            clean_document(doc)

    def test_figcaption_and_script_dropped(self):
        doc = make_document(
            raw_text="<figure><img alt='a'><figcaption>photo caption</figcaption></figure>"
            "<script>var x=1;</script>Body text."
        )
        assert clean_document(doc).cleaned_text == "Body text."

    def test_duplicated_title_removed(self):
        doc = make_document(raw_text="Big Fraud Case. Agent arrested.", title="Big Fraud Case.")
        assert clean_document(doc).cleaned_text == "Agent arrested."

    def test_control_chars_and_entities(self):
        doc = make_document(raw_text="Fish &amp; Chips\x00 shop")
        assert clean_document(doc).cleaned_text == "Fish & Chips shop"

    def test_idempotent_on_random_inputs(self):
        rng = random.Random(7)
        atoms = [
            "fraud", "টাকা", "agent", "পাচার", "&amp;", "&lt;b&gt;", "<p>", "</p>",
            "<img alt='x'>", "  ", "\n", ".", "!", "ељ", "<script>x</script>", "мир",
            "<b>", "</b>", "?", "&quot;", "\t", "১২৩",
        ]
        for _ in range(200):
            raw = "".join(rng.choices(atoms, k=rng.randint(1, 25)))
            once = clean_text(raw)
            assert clean_text(once) == once


class TestDetectLanguage:
    def test_bangla(self):
        assert detect_language("টাকা পাচার হচ্ছে") is LanguageTag.BANGLA

    def test_english(self):
        assert detect_language("Mobile banking fraud") is LanguageTag.ENGLISH

    def test_mixed_by_letter_count(self):
        text = "bKash এজেন্ট fraud করেছে"
        # Oracle: count letters per script directly.
        letters = [c for c in text if c.isalpha()]
        bengali = sum(1 for c in letters if 0x0980 <= ord(c) <= 0x09FF)
        latin = len(letters) - bengali
        assert bengali / len(letters) >= 0.1 and latin / len(letters) >= 0.1
        assert detect_language(text) is LanguageTag.MIXED

    def test_no_letters_unknown(self):
        assert detect_language("1234 !?") is LanguageTag.UNKNOWN

    def test_total_and_partitioned(self):
        rng = random.Random(13)
        pool = "abcXYZ টাকাপাচার 0123 ,.!? мирслово"
        for _ in range(300):
            text = "".join(rng.choices(pool, k=rng.randint(1, 30)))
            tag = detect_language(text)
            assert tag in set(LanguageTag)
            assert detect_language(text) is tag


class TestSegmentFragments:
    def test_two_scripts_two_fragments(self):
        doc = clean_document(make_document(raw_text="Good service. এজেন্ট টাকা চুরি করেছে।"))
        frags = segment_fragments(doc)
        assert [f.text for f in frags] == ["Good service.", "এজেন্ট টাকা চুরি করেছে।"]
        assert [f.lang for f in frags] == [LanguageTag.ENGLISH, LanguageTag.BANGLA]

    def test_no_terminator_whole_text(self):
        doc = clean_document(make_document(raw_text="No terminator here"))
        frags = segment_fragments(doc)
        assert len(frags) == 1
        assert frags[0].text == "No terminator here"

    def test_ordering_and_indices(self):
        doc = clean_document(make_document(raw_text="A! B? C."))
        frags = segment_fragments(doc)
        assert [f.text for f in frags] == ["A!", "B?", "C."]
        assert [f.index for f in frags] == [0, 1, 2]

    def test_newline_splits(self):
        doc = clean_document(make_document(raw_text="first line\nsecond line"))
        assert [f.text for f in segment_fragments(doc)] == ["first line", "second line"]

    def test_requires_cleaned_text(self):
        with pytest.raises(ValueError):
            segment_fragments(make_document(raw_text="not cleaned"))

    def test_content_preserved_ignoring_whitespace(self):
        rng = random.Random(5)
        words = ["fraud", "টাকা", "agent", "পাচার", "ok", "সেবা", "12"]
        terminators = [".", "!", "?", "।", " "]
        for _ in range(100):
            raw = ""
            for _ in range(rng.randint(1, 30)):
                raw += rng.choice(words) + rng.choice(terminators) + " "
            doc = make_document(raw_text=raw)
            try:
                doc = clean_document(doc)
            except EmptyDocumentError:
                continue
            frags = segment_fragments(doc)
            joined = "".join(f.text for f in frags)
            assert "".join(joined.split()) == "".join(doc.cleaned_text.split())


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tuple(tokenize("bKash Agent FRAUD!")) == ("bkash", "agent", "fraud")

    def test_bangla_danda_and_comma(self):
        assert tuple(tokenize("টাকা, পাচার।")) == ("টাকা", "পাচার")

    def test_whitespace_only_rejected(self):
        with pytest.raises(ValueError):
            tokenize(" ")
        with pytest.raises(ValueError):
            tokenize("")

    def test_digits_kept(self):
        assert tuple(tokenize("sent 500 taka")) == ("sent", "500", "taka")

    def test_punctuation_only_yields_empty(self):
        assert len(tokenize("...!?")) == 0

    def test_never_empty_tokens_and_bounded(self):
        rng = random.Random(23)
        pool = "abZ টাকা12 ,.!? ।&<>"
        for _ in range(300):
            text = "".join(rng.choices(pool, k=rng.randint(1, 40)))
            if not text.strip():
                continue
            tokens = tokenize(text)
            assert all(tok and not any(c.isspace() for c in tok) for tok in tokens)
            assert sum(len(t) for t in tokens) <= len(text)
            assert len(tokens) <= len(text)

"""Multilingual adverse-media screening toolkit (English/Bangla)."""

from .corpus import (
    CLASS_ORDER,
    ClassDistribution,
    Corpus,
    DatasetSplit,
    Document,
    DocumentSource,
    Fragment,
    LanguageTag,
    SentimentLabel,
    class_distribution,
    load_corpus,
    save_corpus,
    stratified_split,
)

__all__ = [
    "CLASS_ORDER",
    "ClassDistribution",
    "Corpus",
    "DatasetSplit",
    "Document",
    "DocumentSource",
    "Fragment",
    "LanguageTag",
    "SentimentLabel",
    "class_distribution",
    "load_corpus",
    "save_corpus",
    "stratified_split",
]

__version__ = "0.1.0"

"""Document acquisition: news feeds (RSS/Atom) and social-media export files.

Live platform scraping is out of scope; social sources come in as export
files (line-delimited JSON or a JSON array) with a configurable text field.
Feeds can also be read from a local file, which is how the tests fixture
them.
"""

from __future__ import annotations

import hashlib
import json
import time
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import requests

from .corpus import Document, DocumentSource, parse_timestamp, utc_now
from .errors import FeedParseError, FetchError

#: Starter include-keyword list for MFS-related screening runs. Authored for
#: this toolkit as operator guidance; filtering only happens when a keyword
#: list is explicitly passed.
DEFAULT_INCLUDE_KEYWORDS: tuple[str, ...] = (
    "bkash",
    "nagad",
    "rocket",
    "upay",
    "mobile banking",
    "mobile wallet",
    "mfs",
    "মোবাইল ব্যাংকিং",
    "এজেন্ট",
)

_ATOM_NS = "{http://www.w3.org/2005/Atom}"


@dataclass(frozen=True)
class SourceConfig:
    kind: DocumentSource
    location: str
    fetch_interval: float | None = None
    max_items: int | None = None
    text_field: str = "text"
    timestamp_field: str | None = "created_at"

    def __post_init__(self):
        if self.kind not in (DocumentSource.NEWS_FEED, DocumentSource.SOCIAL_EXPORT):
            raise ValueError(f"unsupported source kind {self.kind}")
        if not self.location:
            raise ValueError("source location must be set")
        if self.max_items is not None and self.max_items <= 0:
            raise ValueError("max_items must be positive")


@dataclass(frozen=True)
class SocialExportResult:
    documents: tuple[Document, ...]
    skipped: int


def _doc_id(*parts: str) -> str:
    digest = hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()
    return digest[:16]


def _fetch_bytes(location: str, retries: int, backoff: float) -> bytes:
    if not location.startswith(("http://", "https://")):
        return Path(location).read_bytes()
    last_error: Exception | None = None
    for attempt in range(retries):
        try:
            response = requests.get(location, timeout=30)
            response.raise_for_status()
            return response.content
        except requests.RequestException as exc:
            last_error = exc
            if attempt < retries - 1:
                time.sleep(backoff * (2**attempt))
    raise FetchError(f"could not fetch {location} after {retries} attempts: {last_error}")


def _element_text(element: ET.Element | None) -> str:
    if element is None:
        return ""
    return "".join(element.itertext()).strip()


def fetch_news_feed(
    config: SourceConfig,
    retries: int = 3,
    backoff: float = 1.0,
) -> list[Document]:
    """One Document per feed item, in feed order, empty items dropped.

    Document ids are content hashes so refetching the same fixture yields
    identical records apart from fetched_at.
    """
    if config.kind is not DocumentSource.NEWS_FEED:
        raise ValueError("fetch_news_feed requires a news_feed source")
    payload = _fetch_bytes(config.location, retries=retries, backoff=backoff)
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        position = getattr(exc, "position", None)
        where = f" at line {position[0]}, column {position[1]}" if position else ""
        raise FeedParseError(f"malformed feed {config.location}{where}: {exc}") from exc

    if root.tag == "rss" or root.tag == "channel":
        items = root.findall(".//item")
        entries = [
            (
                _element_text(item.find("title")),
                _element_text(item.find("link")),
                _element_text(item.find("description")) or _element_text(item.find("content")),
            )
            for item in items
        ]
    elif root.tag == f"{_ATOM_NS}feed":
        entries = []
        for entry in root.findall(f"{_ATOM_NS}entry"):
            link = entry.find(f"{_ATOM_NS}link")
            entries.append(
                (
                    _element_text(entry.find(f"{_ATOM_NS}title")),
                    link.get("href", "") if link is not None else "",
                    _element_text(entry.find(f"{_ATOM_NS}content"))
                    or _element_text(entry.find(f"{_ATOM_NS}summary")),
                )
            )
    else:
        raise FeedParseError(f"{config.location}: unrecognized feed root <{root.tag}>")

    documents: list[Document] = []
    fetched_at = utc_now()
    for position, (title, link, text) in enumerate(entries):
        if config.max_items is not None and len(documents) >= config.max_items:
            break
        if not text.strip():
            continue
        origin = link or f"{config.location}#{position}"
        documents.append(
            Document(
                id=_doc_id("feed", origin, title, text),
                source=DocumentSource.NEWS_FEED,
                origin_ref=origin,
                fetched_at=fetched_at,
                raw_text=text,
                title=title or None,
            )
        )
    return documents


def _load_export_posts(path: Path) -> list[dict]:
    content = path.read_text(encoding="utf-8").strip()
    if not content:
        raise FeedParseError(f"{path}: export file is empty")
    if content.startswith("["):
        try:
            posts = json.loads(content)
        except json.JSONDecodeError as exc:
            raise FeedParseError(f"{path}: invalid JSON array ({exc})") from exc
        if not isinstance(posts, list):
            raise FeedParseError(f"{path}: expected a JSON array of posts")
        return [post for post in posts if isinstance(post, dict)]
    posts = []
    for lineno, line in enumerate(content.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FeedParseError(f"{path} line {lineno}: invalid JSON ({exc})") from exc
        if isinstance(record, dict):
            posts.append(record)
    return posts


def parse_social_export(config: SourceConfig) -> SocialExportResult:
    """Parse an export file into Documents; empty-text posts are skipped and
    counted in the result."""
    if config.kind is not DocumentSource.SOCIAL_EXPORT:
        raise ValueError("parse_social_export requires a social_export source")
    path = Path(config.location)
    posts = _load_export_posts(path)

    documents: list[Document] = []
    skipped = 0
    now = utc_now()
    for position, post in enumerate(posts):
        if config.max_items is not None and len(documents) >= config.max_items:
            break
        text = post.get(config.text_field)
        if not isinstance(text, str) or not text.strip():
            skipped += 1
            continue
        fetched_at = now
        if config.timestamp_field and isinstance(post.get(config.timestamp_field), str):
            try:
                fetched_at = parse_timestamp(post[config.timestamp_field])
            except ValueError:
                pass
        documents.append(
            Document(
                id=_doc_id("social", str(path), str(position), text),
                source=DocumentSource.SOCIAL_EXPORT,
                origin_ref=f"{path}#{position}",
                fetched_at=fetched_at,
                raw_text=text,
            )
        )
    return SocialExportResult(documents=tuple(documents), skipped=skipped)


def _dedup_key(document: Document) -> str:
    base = document.cleaned_text if document.cleaned_text else document.raw_text
    return " ".join(unicodedata.normalize("NFC", base).split())


def deduplicate(documents: Iterable[Document]) -> list[Document]:
    """Collapse documents with identical normalized text to the earliest-
    fetched instance, keeping the position of each key's first occurrence."""
    order: list[str] = []
    best: dict[str, Document] = {}
    for document in documents:
        key = _dedup_key(document)
        if key not in best:
            order.append(key)
            best[key] = document
        elif document.fetched_at < best[key].fetched_at:
            best[key] = document
    return [best[key] for key in order]


def filter_by_keywords(
    documents: Iterable[Document],
    keywords: Sequence[str],
) -> list[Document]:
    """Keep documents whose text (or title) mentions any keyword,
    case-insensitively."""
    lowered = [k.lower() for k in keywords if k]
    kept = []
    for document in documents:
        haystack = " ".join(
            part for part in (document.title, document.raw_text, document.cleaned_text) if part
        ).lower()
        if any(keyword in haystack for keyword in lowered):
            kept.append(document)
    return kept

"""Tweet text preparation: clean, transliterate, then normalize.

The three stages run in that fixed order.  Cleaning drops URLs,
punctuation and control characters but deliberately keeps emoji and
combining marks alive, because the later stages need them: transliteration
consumes the marks (Devanagari matras, accents) and normalization turns
emoji into textual aliases.  Aliases are derived from the Unicode
character name and sanitized to lowercase words, so running the whole
pipeline on its own output changes nothing.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .translit import _is_devanagari, transliterate_char, transliterate_devanagari

_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_WS = re.compile(r"\s+")
_ALIAS_JUNK = re.compile(r"[^a-z0-9]+")

# pictographs, dingbats, transport, flags, misc symbols
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x1F1E6, 0x1F1FF),
)


def is_emoji(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _EMOJI_RANGES)


def emoji_alias(ch: str) -> str:
    try:
        name = unicodedata.name(ch)
    except ValueError:
        name = "emoji"
    alias = _ALIAS_JUNK.sub(" ", name.lower()).strip()
    return alias or "emoji"


def clean(text: str) -> str:
    """Drop URLs, punctuation, and control/format characters; tidy whitespace."""
    text = _URL.sub(" ", text)
    kept: list[str] = []
    for ch in text:
        if ch.isspace():
            kept.append(" ")
            continue
        category = unicodedata.category(ch)
        if category[0] in ("P", "C"):
            continue
        kept.append(ch)
    return _WS.sub(" ", "".join(kept)).strip()


def transliterate(text: str) -> str:
    """Romanize non-Latin scripts; emoji pass through for the next stage."""
    out: list[str] = []
    run: list[str] = []  # consecutive Devanagari, romanized as one syllabic unit

    def flush_run():
        if run:
            out.append(transliterate_devanagari("".join(run)))
            run.clear()

    for ch in text:
        if _is_devanagari(ch):
            run.append(ch)
            continue
        flush_run()
        if is_emoji(ch):
            out.append(ch)
        elif 0xFE00 <= ord(ch) <= 0xFE0F:  # variation selectors add nothing
            continue
        else:
            out.append(transliterate_char(ch))
    flush_run()
    return "".join(out)


def normalize(text: str) -> str:
    """Replace emoji with textual aliases, lowercase, tidy whitespace."""
    out: list[str] = []
    for ch in text:
        if is_emoji(ch):
            out.append(f" {emoji_alias(ch)} ")
        else:
            out.append(ch)
    return _WS.sub(" ", "".join(out).lower()).strip()


@dataclass(frozen=True)
class PreprocessedTweet:
    original: str
    cleaned: str


def preprocess(text: str) -> PreprocessedTweet:
    """Clean -> transliterate -> normalize, in that order; idempotent."""
    return PreprocessedTweet(
        original=text, cleaned=normalize(transliterate(clean(text)))
    )

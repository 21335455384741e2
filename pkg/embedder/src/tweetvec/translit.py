"""Romanization tables for non-Latin scripts.

The internal package mirror carries no transliteration library, so the
mapping ships here: hand-written tables for Devanagari (with inherent-vowel
handling), Cyrillic, Greek and Arabic, plus NFKD diacritic folding for
Latin-based scripts.  Characters outside every table (CJK and other
unmapped scripts) pass through unchanged; the goal is ASCII-dominant
output, not linguistic fidelity, and the chosen scheme is documented
rather than claimed exact.
"""

from __future__ import annotations

import unicodedata

DEVANAGARI_VOWELS = {
    "अ": "a", "आ": "aa", "इ": "i", "ई": "ii",
    "उ": "u", "ऊ": "uu", "ऋ": "ri", "ऌ": "li",
    "ए": "e", "ऐ": "ai", "ऑ": "o", "ओ": "o",
    "औ": "au",
}

DEVANAGARI_CONSONANTS = {
    "क": "k", "ख": "kh", "ग": "g", "घ": "gh", "ङ": "ng",
    "च": "ch", "छ": "chh", "ज": "j", "झ": "jh", "ञ": "ny",
    "ट": "t", "ठ": "th", "ड": "d", "ढ": "dh", "ण": "n",
    "त": "t", "थ": "th", "द": "d", "ध": "dh", "न": "n",
    "प": "p", "फ": "ph", "ब": "b", "भ": "bh", "म": "m",
    "य": "y", "र": "r", "ल": "l", "व": "v",
    "श": "sh", "ष": "sh", "स": "s", "ह": "h",
    "क़": "q", "ख़": "khh", "ग़": "ghh", "ज़": "z",
    "ड़": "dd", "ढ़": "rh", "फ़": "f", "य़": "y",
}

DEVANAGARI_MATRAS = {
    "ा": "aa", "ि": "i", "ी": "ii", "ु": "u",
    "ू": "uu", "ृ": "ri", "े": "e", "ै": "ai",
    "ो": "o", "ौ": "au",
}

DEVANAGARI_VIRAMA = "्"
DEVANAGARI_SIGNS = {"ं": "m", "ः": "h", "ँ": "n", "़": ""}
DEVANAGARI_DIGITS = {chr(0x0966 + k): str(k) for k in range(10)}

CYRILLIC = {
    "а": "a", "б": "b", "в": "v", "г": "g", "д": "d", "е": "e", "ё": "e",
    "ж": "zh", "з": "z", "и": "i", "й": "y", "к": "k", "л": "l", "м": "m",
    "н": "n", "о": "o", "п": "p", "р": "r", "с": "s", "т": "t", "у": "u",
    "ф": "f", "х": "kh", "ц": "ts", "ч": "ch", "ш": "sh", "щ": "shch",
    "ъ": "", "ы": "y", "ь": "", "э": "e", "ю": "yu", "я": "ya",
    "є": "ye", "і": "i", "ї": "yi", "ґ": "g",
}

GREEK = {
    "α": "a", "β": "v", "γ": "g", "δ": "d", "ε": "e", "ζ": "z", "η": "i",
    "θ": "th", "ι": "i", "κ": "k", "λ": "l", "μ": "m", "ν": "n", "ξ": "x",
    "ο": "o", "π": "p", "ρ": "r", "σ": "s", "ς": "s", "τ": "t", "υ": "y",
    "φ": "f", "χ": "ch", "ψ": "ps", "ω": "o",
}

ARABIC = {
    "ا": "a", "ب": "b", "ت": "t", "ث": "th",
    "ج": "j", "ح": "h", "خ": "kh", "د": "d",
    "ذ": "dh", "ر": "r", "ز": "z", "س": "s",
    "ش": "sh", "ص": "s", "ض": "d", "ط": "t",
    "ظ": "z", "ع": "", "غ": "gh", "ف": "f",
    "ق": "q", "ك": "k", "ل": "l", "م": "m",
    "ن": "n", "ه": "h", "و": "w", "ي": "y",
    "ء": "", "آ": "aa", "أ": "a", "ؤ": "u",
    "إ": "i", "ئ": "i", "ة": "h", "ى": "a",
}
ARABIC.update({chr(0x0660 + k): str(k) for k in range(10)})

_SIMPLE_TABLE = {**CYRILLIC, **GREEK, **ARABIC}


def _is_devanagari(ch: str) -> bool:
    return "ऀ" <= ch <= "ॿ"


def _fold_latin(ch: str) -> str:
    """NFKD-decompose and drop combining marks; non-ASCII survivors pass through."""
    decomposed = unicodedata.normalize("NFKD", ch)
    folded = "".join(c for c in decomposed if not unicodedata.combining(c))
    if folded and all(ord(c) < 128 for c in folded):
        return folded
    return ch


def transliterate_char(ch: str) -> str:
    if ord(ch) < 128:
        return ch
    if ch in _SIMPLE_TABLE:
        return _SIMPLE_TABLE[ch]
    lower = ch.lower()
    if lower in _SIMPLE_TABLE:
        return _SIMPLE_TABLE[lower]
    folded = _fold_latin(ch)
    # combining marks with no romanization become dead weight here
    if folded == ch and unicodedata.category(ch) in ("Mn", "Me"):
        return ""
    return folded


def transliterate_devanagari(text: str) -> str:
    """Syllabic romanization: consonants take an inherent 'a' that matras
    replace and the virama strips, so a word like namaste comes out whole."""
    out: list[str] = []
    for ch in text:
        if ch in DEVANAGARI_CONSONANTS:
            out.append(DEVANAGARI_CONSONANTS[ch] + "a")
        elif ch in DEVANAGARI_MATRAS:
            if out and out[-1].endswith("a"):
                out[-1] = out[-1][:-1]
            out.append(DEVANAGARI_MATRAS[ch])
        elif ch == DEVANAGARI_VIRAMA:
            if out and out[-1].endswith("a"):
                out[-1] = out[-1][:-1]
        elif ch in DEVANAGARI_VOWELS:
            out.append(DEVANAGARI_VOWELS[ch])
        elif ch in DEVANAGARI_SIGNS:
            out.append(DEVANAGARI_SIGNS[ch])
        elif ch in DEVANAGARI_DIGITS:
            out.append(DEVANAGARI_DIGITS[ch])
        else:
            out.append(ch)
    return "".join(out)

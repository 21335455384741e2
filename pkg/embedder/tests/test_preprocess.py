import random

from tweetvec import clean, normalize, preprocess, transliterate

ASCII_POOL = "abc XYZ 012 .,!?#@'\"-_()[]{}:;/\\\n\t"
UNICODE_POOL = (
    "éüñßœÆ"          # Latin with diacritics / no decomposition
    "नमस्ते दुनिया"     # Devanagari
    "Привет мир"       # Cyrillic
    "Γειά σου κόσμε"   # Greek
    "مرحبا"            # Arabic
    "你好世界"          # CJK (passes through)
    "😀🤖🔥⭐🏳️"        # emoji incl. variation selector
    "‍ ‮"  # joiner, nbsp, bidi control
)


def fuzz_strings(count=1000, seed=20240801):
    rng = random.Random(seed)
    pool = ASCII_POOL + UNICODE_POOL
    out = []
    for _ in range(count):
        length = rng.randint(0, 40)
        out.append("".join(rng.choice(pool) for _ in range(length)))
    return out


class TestStages:
    def test_whitespace_punctuation_lowercase(self):
        assert preprocess("Hello   WORLD!!").cleaned == "hello world"

    def test_emoji_becomes_textual_alias(self):
        cleaned = preprocess("good 😀 day").cleaned
        assert "😀" not in cleaned
        assert "grinning face" in cleaned

    def test_devanagari_romanized(self):
        cleaned = preprocess("नमस्ते").cleaned
        assert cleaned == "namaste"

    def test_devanagari_ascii_dominant(self):
        cleaned = preprocess("नमस्ते दुनिया").cleaned
        ascii_chars = sum(1 for c in cleaned if ord(c) < 128)
        assert cleaned and ascii_chars / len(cleaned) == 1.0

    def test_cyrillic(self):
        assert preprocess("Привет").cleaned == "privet"

    def test_accents_folded(self):
        assert preprocess("Café").cleaned == "cafe"

    def test_urls_removed(self):
        cleaned = preprocess("look https://t.co/Abc123 and www.example.com/x now").cleaned
        assert cleaned == "look and now"

    def test_empty_output_allowed(self):
        assert preprocess("!!! ...").cleaned == ""

    def test_stage_order_clean_then_transliterate_then_normalize(self):
        raw = "Grüß  GOTT!! 😀"
        assert preprocess(raw).cleaned == normalize(transliterate(clean(raw)))


class TestInvariants:
    def test_idempotent_on_fuzzed_strings(self):
        failures = []
        for text in fuzz_strings(1000):
            once = preprocess(text).cleaned
            twice = preprocess(once).cleaned
            if once != twice:
                failures.append((text, once, twice))
        assert not failures, failures[:3]
        print("ACCEPTANCE embedder-preprocess-idempotent: PASS")

    def test_deterministic(self):
        for text in fuzz_strings(100, seed=7):
            assert preprocess(text).cleaned == preprocess(text).cleaned

    def test_lowercase_and_whitespace_invariants(self):
        for text in fuzz_strings(300, seed=13):
            cleaned = preprocess(text).cleaned
            assert cleaned == cleaned.lower()
            assert "  " not in cleaned
            assert cleaned == cleaned.strip()

    def test_original_preserved(self):
        raw = "Hello   WORLD!!"
        result = preprocess(raw)
        assert result.original == raw

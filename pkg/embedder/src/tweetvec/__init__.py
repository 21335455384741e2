"""Tweet embedding extraction for the relationship-oblivious bot classifier."""

from .datasets import TweetUser, load_users
from .embed import DEFAULT_MODEL, EmbedReport, embed_dataset, embed_users
from .preprocess import PreprocessedTweet, clean, normalize, preprocess, transliterate
from .rgbe import write_rgbe

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "EmbedReport",
    "PreprocessedTweet",
    "TweetUser",
    "clean",
    "embed_dataset",
    "embed_users",
    "load_users",
    "normalize",
    "preprocess",
    "transliterate",
    "write_rgbe",
]

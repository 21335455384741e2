"""Transformer embedding extraction: one pooler-output vector per tweet."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .datasets import TweetUser, load_users
from .preprocess import preprocess
from .rgbe import write_rgbe

logger = logging.getLogger("tweetvec")

DEFAULT_MODEL = "bert-base-uncased"


@dataclass(frozen=True)
class EmbedReport:
    users: int
    tweets: int
    empty_after_preprocessing: int
    dim: int
    output: str


def embed_users(
    users: list[TweetUser],
    out_path: str | Path,
    model_name: str = DEFAULT_MODEL,
    batch_size: int = 32,
    max_tokens: int | None = None,
    device: str = "cpu",
) -> EmbedReport:
    """Preprocess every tweet, run the frozen model, write pooler vectors as RGBE."""
    tokenizer = AutoTokenizer.from_pretrained(model_name)
    model = AutoModel.from_pretrained(model_name)
    model.to(device)
    model.eval()

    max_positions = getattr(model.config, "max_position_embeddings", 512)
    max_length = min(max_tokens or max_positions, max_positions)

    texts: list[str] = []
    counts: list[int] = []
    empty = 0
    for user in users:
        counts.append(len(user.tweets))
        for tweet in user.tweets:
            cleaned = preprocess(tweet).cleaned
            if not cleaned:
                empty += 1
                logger.warning("user %s: tweet empty after preprocessing", user.user_id)
            texts.append(cleaned)

    vectors = []
    with torch.no_grad():
        for start in range(0, len(texts), batch_size):
            batch = texts[start : start + batch_size]
            encoded = tokenizer(
                batch,
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=max_length,
            ).to(device)
            output = model(**encoded)
            pooled = getattr(output, "pooler_output", None)
            if pooled is None:
                raise ValueError(
                    f"model {model_name} has no pooler output; pick a BERT-style checkpoint"
                )
            vectors.append(pooled.cpu().numpy().astype(np.float32))
    flat = np.concatenate(vectors) if vectors else np.zeros((0, model.config.hidden_size))
    dim = int(model.config.hidden_size)

    entries: dict[str, np.ndarray] = {}
    offset = 0
    for user, n_k in zip(users, counts):
        entries[user.user_id] = flat[offset : offset + n_k].reshape(n_k, dim)
        offset += n_k
    write_rgbe(entries, dim, out_path)
    return EmbedReport(
        users=len(users),
        tweets=len(texts),
        empty_after_preprocessing=empty,
        dim=dim,
        output=str(out_path),
    )


def embed_dataset(
    dataset_path: str | Path,
    fmt: str,
    out_path: str | Path,
    model_name: str = DEFAULT_MODEL,
    batch_size: int = 32,
    max_tokens: int | None = None,
    device: str = "cpu",
) -> EmbedReport:
    users = load_users(dataset_path, fmt)
    return embed_users(
        users,
        out_path,
        model_name=model_name,
        batch_size=batch_size,
        max_tokens=max_tokens,
        device=device,
    )

import json

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghijklmnopqrstuvwxyz0123456789")
    + ["##" + c for c in "abcdefghijklmnopqrstuvwxyz0123456789"]
    + ["hello", "world", "the", "bot", "human", "tweet", "grinning",
       "face", "namaste", "nice", "day", "spam", "buy", "now"]
)


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """A seeded, randomly initialized BERT saved locally: real plumbing, no network."""
    workdir = tmp_path_factory.mktemp("tinybert")
    (workdir / "vocab.txt").write_text("\n".join(VOCAB), encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab_file=str(workdir / "vocab.txt"), do_lower_case=True)
    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=16,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=64,
    )
    model = BertModel(config)
    model.save_pretrained(workdir)
    tokenizer.save_pretrained(workdir)
    return str(workdir)


@pytest.fixture
def jsonl_dataset(tmp_path):
    rows = [
        {"user_id": "alice", "tweets": ["hello world", "a nice day 😀"]},
        {"user_id": "bot42", "tweets": ["buy now buy now", "buy now buy now", "!!!"]},
    ]
    path = tmp_path / "users.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    return path

import numpy as np
import pytest

from botsage import load_dataset, read_embeddings, validate_dataset, write_embeddings
from tweetvec import embed_dataset, load_users
from tweetvec.cli import main


@pytest.fixture
def embedded(tiny_checkpoint, jsonl_dataset, tmp_path):
    out = tmp_path / "emb.rgbe"
    report = embed_dataset(jsonl_dataset, "jsonl", out, model_name=tiny_checkpoint,
                           batch_size=2)
    return out, report


class TestContract:
    def test_output_passes_consumer_validation_and_round_trips(
        self, embedded, jsonl_dataset, tmp_path
    ):
        out, report = embedded
        store = read_embeddings(out)  # the consumer's reader accepts the file
        assert store.dim == report.dim == 16
        dataset = load_dataset(jsonl_dataset, "jsonl")
        assert validate_dataset(dataset, store).ok
        rewritten = tmp_path / "roundtrip.rgbe"
        write_embeddings(store, rewritten)
        assert read_embeddings(rewritten) == store
        assert rewritten.read_bytes() == out.read_bytes()
        print("ACCEPTANCE embedder-rgbe-contract: PASS")

    def test_identical_text_identical_vectors_across_runs(
        self, tiny_checkpoint, jsonl_dataset, tmp_path
    ):
        out1, out2 = tmp_path / "a.rgbe", tmp_path / "b.rgbe"
        embed_dataset(jsonl_dataset, "jsonl", out1, model_name=tiny_checkpoint)
        embed_dataset(jsonl_dataset, "jsonl", out2, model_name=tiny_checkpoint)
        assert out1.read_bytes() == out2.read_bytes()
        store = read_embeddings(out1)
        # bot42 repeats the same text twice: rows must match bit for bit
        repeated = store["bot42"]
        assert repeated[0].tobytes() == repeated[1].tobytes()
        print("ACCEPTANCE embedder-deterministic-vectors: PASS")

    def test_shapes_follow_tweet_counts(self, embedded):
        out, _ = embedded
        store = read_embeddings(out)
        assert store["alice"].shape == (2, 16)
        assert store["bot42"].shape == (3, 16)

    def test_empty_tweet_still_embedded_and_flagged(self, embedded):
        out, report = embedded
        # "!!!" cleans to the empty string but still yields a vector
        assert report.empty_after_preprocessing == 1
        store = read_embeddings(out)
        assert np.isfinite(store["bot42"][2]).all()


class TestCli:
    def test_cli_writes_valid_file(self, tiny_checkpoint, jsonl_dataset, tmp_path, capsys):
        out = tmp_path / "cli.rgbe"
        code = main([
            "--dataset", str(jsonl_dataset), "--format", "jsonl",
            "--out", str(out), "--model", tiny_checkpoint, "--batch-size", "4",
        ])
        assert code == 0
        payload = capsys.readouterr().out
        assert '"users": 2' in payload
        assert read_embeddings(out).dim == 16

    def test_cli_bad_dataset_exits_1(self, tiny_checkpoint, tmp_path, capsys):
        code = main([
            "--dataset", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "x.rgbe"),
            "--model", tiny_checkpoint,
        ])
        assert code == 1
        assert "tweetvec:" in capsys.readouterr().err


class TestDatasets:
    def test_pan_layout(self, tmp_path, tiny_checkpoint):
        (tmp_path / "u1.xml").write_text(
            "<author><documents><document>hello world</document></documents></author>",
            encoding="utf-8",
        )
        (tmp_path / "u0.xml").write_text(
            "<author><documents><document>buy now</document></documents></author>",
            encoding="utf-8",
        )
        users = load_users(tmp_path, "pan-xml-dir")
        assert [u.user_id for u in users] == ["u0", "u1"]

    def test_cresci_layout(self, tmp_path):
        (tmp_path / "users.csv").write_text("user_id,label\nb,1\na,0\n", encoding="utf-8")
        (tmp_path / "tweets.csv").write_text(
            "user_id,text\nb,hello\na,world\nb,again\n", encoding="utf-8"
        )
        users = load_users(tmp_path, "cresci-csv")
        assert [u.user_id for u in users] == ["b", "a"]
        assert users[0].tweets == ("hello", "again")

    def test_duplicate_user_rejected(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        path.write_text('{"user_id": "x"}\n{"user_id": "x"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="duplicate"):
            load_users(path, "jsonl")

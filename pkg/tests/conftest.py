import pytest

from botsage import TrainConfig, save_dataset_jsonl, write_embeddings
from botsage.synthetic import aux_signal_dataset, two_cluster_dataset


@pytest.fixture(scope="session")
def cluster_data():
    return two_cluster_dataset(n=120, dim=6, separation=6.0, seed=7)


@pytest.fixture(scope="session")
def aux_data():
    return aux_signal_dataset(n=160, dim=6, seed=11)


@pytest.fixture(scope="session")
def fast_config():
    return TrainConfig(tau=0.4, hidden=12, mlp=(8, 4), dropout=0.2, epochs=30, seed=5, lr=0.01)


@pytest.fixture
def jsonl_fixture(tmp_path, cluster_data):
    """Two-cluster dataset written out as jsonl + RGBE files."""
    dataset, store = cluster_data
    ds_path = tmp_path / "users.jsonl"
    emb_path = tmp_path / "embeddings.rgbe"
    save_dataset_jsonl(dataset, ds_path)
    write_embeddings(store, emb_path)
    return ds_path, emb_path, dataset, store

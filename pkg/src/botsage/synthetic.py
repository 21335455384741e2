"""Synthetic fixtures: labeled datasets with directly injected feature rows.

Each user gets exactly one embedding row equal to their feature vector, so
pooling is the identity and no text featurizer sits between the generator
and the classifier.  Used by tests and handy for demo runs.
"""

from __future__ import annotations

import numpy as np

from .ingest import Dataset, EmbeddingStore, UserRecord


def two_cluster_features(
    n: int = 500, dim: int = 16, separation: float = 6.0, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Two unit-variance Gaussian clusters with mean distance `separation`.

    Cluster centers sit along two random orthogonal directions, so members
    of different clusters are near-orthogonal in cosine terms while members
    of the same cluster stay similar.
    """
    rng = np.random.default_rng(seed)
    basis = np.linalg.qr(rng.normal(size=(dim, 2)))[0]
    scale = separation / np.sqrt(2.0)
    centers = scale * basis.T  # (2, dim), ||c0 - c1|| == separation
    labels = np.arange(n) % 2
    features = centers[labels] + rng.normal(size=(n, dim))
    return features.astype(np.float64), labels.astype(np.int64)


def _store_from_rows(user_ids, rows: np.ndarray) -> EmbeddingStore:
    store = EmbeddingStore(dim=rows.shape[1])
    for uid, row in zip(user_ids, rows):
        store.add(uid, row[None, :].astype(np.float32))
    return store


def two_cluster_dataset(
    n: int = 500,
    dim: int = 16,
    separation: float = 6.0,
    seed: int = 0,
    with_aux: bool = False,
) -> tuple[Dataset, EmbeddingStore]:
    """Labeled two-cluster dataset plus an embedding store with one row per user."""
    features, labels = two_cluster_features(n=n, dim=dim, separation=separation, seed=seed)
    rng = np.random.default_rng(seed + 1)
    users = []
    for k, label in enumerate(labels):
        aux = None
        if with_aux:
            aux = tuple(int(v) for v in rng.integers(0, 1000, size=4))
        users.append(
            UserRecord(
                user_id=f"u{k:05d}",
                tweets=(f"synthetic post {k}",),
                aux=aux,
                label=int(label),
            )
        )
    dataset = Dataset(users=tuple(users), name="two-cluster")
    return dataset, _store_from_rows(dataset.user_ids, features)


def aux_signal_dataset(
    n: int = 400, dim: int = 8, seed: int = 0, signal_index: int = 3
) -> tuple[Dataset, EmbeddingStore]:
    """Dataset where one metadata count carries all class signal.

    Tweet embeddings come from a single shared cluster (uninformative) and
    three counts are noise; the count at `signal_index` separates the
    classes by two orders of magnitude.
    """
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    features = 4.0 * direction + 0.5 * rng.normal(size=(n, dim))
    labels = np.arange(n) % 2
    users = []
    for k, label in enumerate(labels):
        counts = rng.integers(50, 150, size=4)
        counts[signal_index] = rng.integers(10000, 20000) if label == 1 else rng.integers(0, 100)
        users.append(
            UserRecord(
                user_id=f"u{k:05d}",
                tweets=(f"synthetic post {k}",),
                aux=tuple(int(v) for v in counts),
                label=int(label),
            )
        )
    dataset = Dataset(users=tuple(users), name="aux-signal")
    return dataset, _store_from_rows(dataset.user_ids, features.astype(np.float64))

"""Per-user fused feature vectors.

A user's node features concatenate a pooled tweet embedding with an
optionally normalized 4-component metadata vector (followers, friends,
statuses, favourites).  A deterministic hashed bag-of-tokens featurizer is
included so the whole pipeline can run and be tested without any language
model; it is a stand-in, not an approximation of one.
"""

from __future__ import annotations

import hashlib
import re
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    DimensionError,
    EmptyInputError,
    FormatError,
    MissingMetadataError,
)
from .ingest import Dataset, EmbeddingStore, UserRecord, validate_dataset

AUX_NAMES = ("followers", "friends", "statuses", "favorites")

FUSED_MAGIC = b"RGBF"
FUSED_VERSION = 1


def extract_auxiliary(user: UserRecord) -> tuple[float, float, float, float]:
    """The four profile counts in fixed order: followers, friends, statuses, favorites."""
    if user.aux is None:
        raise MissingMetadataError(f"user {user.user_id}: no metadata counts")
    return tuple(float(a) for a in user.aux)


@dataclass(frozen=True)
class NormalizationStats:
    """Per-column location/scale for the auxiliary counts, fit on training rows.

    mode "log-z" maps x -> (log1p(x) - mean) / std; mode "none" passes raw
    counts through unchanged (the literal fuse-raw-counts behavior).
    """

    mode: str
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if self.mode not in ("log-z", "none"):
            raise ValueError(f"unknown normalization mode {self.mode!r}")
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "std", np.asarray(self.std, dtype=np.float64))
        if (self.std <= 0).any():
            raise DataError("normalization std must be positive")

    @property
    def n_columns(self) -> int:
        return self.mean.shape[0]

    def apply(self, raw: np.ndarray) -> np.ndarray:
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[1] != self.n_columns:
            raise DimensionError(
                f"expected (n, {self.n_columns}) auxiliary matrix, got {raw.shape}"
            )
        if self.mode == "none":
            return raw.copy()
        return (np.log1p(raw) - self.mean) / self.std


def normalize_auxiliary(
    raw: np.ndarray,
    stats: NormalizationStats | None = None,
    mode: str = "log-z",
) -> tuple[np.ndarray, NormalizationStats]:
    """log1p + z-score the raw counts; fit stats when none are supplied.

    Zero-variance columns keep std=1 so constant features normalize to zero.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise DimensionError(f"expected a 2-D count matrix, got shape {raw.shape}")
    if not np.isfinite(raw).all():
        raise DataError("auxiliary counts contain NaN or Inf")
    if (raw < 0).any():
        raise DataError("auxiliary counts must be non-negative")
    if stats is None:
        if mode == "none":
            stats = NormalizationStats(
                mode="none",
                mean=np.zeros(raw.shape[1]),
                std=np.ones(raw.shape[1]),
            )
        else:
            logged = np.log1p(raw)
            mean = logged.mean(axis=0)
            std = logged.std(axis=0)
            std = np.where(std > 0.0, std, 1.0)
            stats = NormalizationStats(mode="log-z", mean=mean, std=std)
    return stats.apply(raw), stats


def pool_tweets(matrix: np.ndarray, mode: str = "max") -> np.ndarray:
    """Reduce a user's (n_k, d) tweet embeddings to one d-vector."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise DimensionError(f"expected (n_k, d) matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 0:
        raise EmptyInputError("cannot pool zero tweet embeddings")
    matrix = matrix.astype(np.float64, copy=False)
    if mode == "max":
        return matrix.max(axis=0)
    if mode == "avg":
        return matrix.mean(axis=0)
    raise ValueError(f"unknown pooling mode {mode!r}; expected max or avg")


def fuse(pooled: np.ndarray, aux: np.ndarray | None = None) -> np.ndarray:
    """Concatenate the pooled tweet vector with the normalized aux vector, in that order."""
    pooled = np.asarray(pooled, dtype=np.float64).ravel()
    if not np.isfinite(pooled).all():
        raise DataError("pooled vector contains NaN or Inf")
    if aux is None:
        return pooled.copy()
    aux = np.asarray(aux, dtype=np.float64).ravel()
    return np.concatenate([pooled, aux])


_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def fallback_featurize(tweets: list[str] | tuple[str, ...], d: int, seed: int) -> np.ndarray:
    """Deterministic hashed bag-of-tokens rows, one per tweet, L2-normalized.

    Tokens are hashed with a keyed blake2b so results are stable across
    processes and platforms for a given (tweets, d, seed).
    """
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    key = struct.pack("<Q", int(seed) & 0xFFFFFFFFFFFFFFFF)
    out = np.zeros((len(tweets), d), dtype=np.float64)
    for row, text in enumerate(tweets):
        text = " ".join(str(text).lower().split())
        for token in _TOKEN_SPLIT.split(text):
            if not token:
                continue
            digest = hashlib.blake2b(token.encode("utf-8"), key=key, digest_size=8).digest()
            value = int.from_bytes(digest, "little")
            bucket = (value >> 1) % d
            sign = 1.0 if value & 1 else -1.0
            out[row, bucket] += sign
        norm = np.linalg.norm(out[row])
        if norm > 0.0:
            out[row] /= norm
    return out.astype(np.float32)


@dataclass(frozen=True)
class FusedMatrix:
    """N x (d + m) node feature matrix; row k is dataset index k."""

    data: np.ndarray
    tweet_dim: int
    n_aux: int = 0

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise DimensionError(f"fused matrix must be 2-D, got shape {data.shape}")
        if data.shape[1] != self.tweet_dim + self.n_aux:
            raise DimensionError(
                f"fused matrix has {data.shape[1]} columns, expected "
                f"{self.tweet_dim} + {self.n_aux}"
            )
        if data.size and not np.isfinite(data).all():
            raise DataError("fused matrix contains NaN or Inf")
        object.__setattr__(self, "data", data)

    @property
    def aux_present(self) -> bool:
        return self.n_aux > 0

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def build_fused_matrix(
    dataset: Dataset,
    store: EmbeddingStore,
    mode: str = "max",
    stats: NormalizationStats | None = None,
    aux_normalize: str = "log-z",
    aux_drop: int | None = None,
    include_aux: bool = True,
) -> tuple[FusedMatrix, NormalizationStats | None]:
    """Pool, normalize and fuse every user into one node-feature matrix.

    When ``stats`` is None and the dataset carries metadata, normalization
    stats are fit on these rows and returned for reuse at inference time.
    ``aux_drop`` removes one of the four counts (ablation support);
    ``include_aux=False`` ignores metadata entirely (for models trained
    without it).
    """
    report = validate_dataset(dataset, store)
    if not report.ok:
        raise DataError(f"dataset failed validation: {report.summary()}")
    if aux_drop is not None and not 0 <= aux_drop <= 3:
        raise ValueError(f"aux_drop must be in 0..3, got {aux_drop}")

    pooled_rows = []
    for user in dataset.users:
        try:
            pooled_rows.append(pool_tweets(store[user.user_id], mode))
        except EmptyInputError as exc:
            raise EmptyInputError(f"user {user.user_id}: {exc}") from exc
    pooled = np.vstack(pooled_rows) if pooled_rows else np.zeros((0, store.dim))

    if not dataset.has_aux or not include_aux:
        return FusedMatrix(data=pooled, tweet_dim=store.dim, n_aux=0), None

    raw = np.array([extract_auxiliary(u) for u in dataset.users], dtype=np.float64)
    if aux_drop is not None:
        raw = np.delete(raw, aux_drop, axis=1)
    normed, stats = normalize_auxiliary(raw, stats=stats, mode=aux_normalize)
    fused = np.hstack([pooled, normed])
    return FusedMatrix(data=fused, tweet_dim=store.dim, n_aux=raw.shape[1]), stats


# ---------------------------------------------------------------------------
# RGBF fused-matrix cache format (float64 payload so cached runs stay bit-exact)
# ---------------------------------------------------------------------------

_FUSED_HEADER = struct.Struct("<4sHIBQ")


def write_fused(fm: FusedMatrix, path) -> None:
    """Write a fused matrix in the RGBF cache layout."""
    with open(path, "wb") as fh:
        fh.write(
            _FUSED_HEADER.pack(FUSED_MAGIC, FUSED_VERSION, fm.tweet_dim, fm.n_aux, fm.rows)
        )
        fh.write(np.ascontiguousarray(fm.data, dtype="<f8").tobytes())


def read_fused(path) -> FusedMatrix:
    """Read an RGBF file written by write_fused."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _FUSED_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, tweet_dim, n_aux, rows = _FUSED_HEADER.unpack_from(data, 0)
    if magic != FUSED_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {FUSED_MAGIC!r}")
    if version != FUSED_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    cols = tweet_dim + n_aux
    expected = _FUSED_HEADER.size + rows * cols * 8
    if len(data) != expected:
        raise FormatError(f"{path}: payload is {len(data)} bytes, expected {expected}")
    matrix = np.frombuffer(data, dtype="<f8", count=rows * cols, offset=_FUSED_HEADER.size)
    return FusedMatrix(data=matrix.reshape(rows, cols).copy(), tweet_dim=tweet_dim, n_aux=n_aux)

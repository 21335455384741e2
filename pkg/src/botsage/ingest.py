"""Dataset loading and the binary per-user embedding file format.

Three dataset formats are supported (see docs/formats.md for full schemas):

* ``jsonl``        one user object per line,
* ``cresci-csv``   a directory with ``users.csv`` + ``tweets.csv``,
* ``pan-xml-dir``  a directory of per-user XML tweet files plus ``truth.txt``.

Embeddings travel in the "RGBE" binary format: a little-endian header
(magic ``RGBE``, version u16, dim u32, user_count u64) followed by one
record per user (id_len u16, utf-8 id, n_k u32, n_k*dim float32 values,
row major).  The format is shared verbatim with the external embedder, so
reading and writing must be bit-exact.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from xml.etree import ElementTree

import numpy as np

from .errors import DataError, DuplicateUserError, FormatError

EMBED_MAGIC = b"RGBE"
EMBED_VERSION = 1

AUX_FIELDS = ("followers_count", "friends_count", "statuses_count", "favourites_count")

_LABEL_ALIASES = {"0": 0, "1": 1, "human": 0, "bot": 1}


def _parse_label(value) -> int:
    if isinstance(value, bool):
        raise DataError(f"label must be 0/1 or human/bot, got {value!r}")
    if isinstance(value, int):
        label = value
    else:
        key = str(value).strip().lower()
        if key not in _LABEL_ALIASES:
            raise DataError(f"label must be 0/1 or human/bot, got {value!r}")
        label = _LABEL_ALIASES[key]
    if label not in (0, 1):
        raise DataError(f"label must be 0 or 1, got {label!r}")
    return label


@dataclass(frozen=True)
class UserRecord:
    """One account: id, tweet texts, optional metadata counts, optional label."""

    user_id: str
    tweets: tuple[str, ...] = ()
    aux: tuple[int, int, int, int] | None = None  # followers, friends, statuses, favourites
    label: int | None = None  # 0 human, 1 bot

    def __post_init__(self):
        if not self.user_id:
            raise DataError("user_id must be non-empty")
        object.__setattr__(self, "tweets", tuple(str(t) for t in self.tweets))
        if self.aux is not None:
            aux = tuple(int(a) for a in self.aux)
            if len(aux) != 4:
                raise DataError(f"user {self.user_id}: aux must have exactly 4 counts")
            if any(a < 0 for a in aux):
                raise DataError(f"user {self.user_id}: aux counts must be >= 0, got {aux}")
            object.__setattr__(self, "aux", aux)
        if self.label is not None and self.label not in (0, 1):
            raise DataError(f"user {self.user_id}: label must be 0 or 1, got {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    """Ordered user collection; position defines the node index."""

    users: tuple[UserRecord, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        seen = set()
        for u in self.users:
            if u.user_id in seen:
                raise DuplicateUserError(f"duplicate user_id {u.user_id!r}")
            seen.add(u.user_id)
        with_aux = sum(1 for u in self.users if u.aux is not None)
        if 0 < with_aux < len(self.users):
            raise DataError(
                "metadata must be present for all users or none; "
                f"{with_aux} of {len(self.users)} have it"
            )

    def __len__(self) -> int:
        return len(self.users)

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def has_aux(self) -> bool:
        return bool(self.users) and all(u.aux is not None for u in self.users)

    @property
    def has_labels(self) -> bool:
        return bool(self.users) and all(u.label is not None for u in self.users)

    @property
    def user_ids(self) -> tuple[str, ...]:
        return tuple(u.user_id for u in self.users)

    def labels(self) -> np.ndarray:
        """Label vector; -1 marks unlabeled users."""
        return np.array([-1 if u.label is None else u.label for u in self.users], dtype=np.int64)


class EmbeddingStore:
    """Per-user float32 tweet-embedding matrices, all with the same column count."""

    def __init__(self, dim: int, entries: dict[str, np.ndarray] | None = None):
        if dim < 1:
            raise DataError(f"embedding dim must be >= 1, got {dim}")
        self.dim = int(dim)
        self.entries: dict[str, np.ndarray] = {}
        for user_id, matrix in (entries or {}).items():
            self.add(user_id, matrix)

    def add(self, user_id: str, matrix: np.ndarray) -> None:
        m = np.ascontiguousarray(matrix, dtype=np.float32)
        if m.ndim != 2 or m.shape[1] != self.dim:
            raise DataError(
                f"user {user_id}: expected shape (n, {self.dim}), got {tuple(np.shape(matrix))}"
            )
        if m.size and not np.isfinite(m).all():
            raise DataError(f"user {user_id}: embeddings contain NaN or Inf")
        if user_id in self.entries:
            raise DuplicateUserError(f"duplicate user_id {user_id!r} in embedding store")
        self.entries[user_id] = m

    def __contains__(self, user_id: str) -> bool:
        return user_id in self.entries

    def __getitem__(self, user_id: str) -> np.ndarray:
        return self.entries[user_id]

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        if self.dim != other.dim or list(self.entries) != list(other.entries):
            return False
        return all(
            a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self.entries.values(), other.entries.values())
        )


@dataclass(frozen=True)
class ValidationReport:
    """Findings from cross-checking a dataset against an embedding store."""

    ok: bool
    dim: int
    missing_users: tuple[str, ...] = ()
    zero_tweet_users: tuple[str, ...] = ()

    def summary(self) -> str:
        if self.ok:
            return f"ok: every user has embeddings (dim={self.dim})"
        parts = [f"dim={self.dim}"]
        if self.missing_users:
            parts.append(f"missing from store: {', '.join(self.missing_users)}")
        if self.zero_tweet_users:
            parts.append(f"zero-tweet users: {', '.join(self.zero_tweet_users)}")
        return "; ".join(parts)


def validate_dataset(dataset: Dataset, store: EmbeddingStore) -> ValidationReport:
    """Report users missing from the store or present with zero tweet rows."""
    missing = tuple(u.user_id for u in dataset.users if u.user_id not in store)
    zero = tuple(
        u.user_id
        for u in dataset.users
        if u.user_id in store and store[u.user_id].shape[0] == 0
    )
    return ValidationReport(
        ok=not missing and not zero,
        dim=store.dim,
        missing_users=missing,
        zero_tweet_users=zero,
    )


# ---------------------------------------------------------------------------
# dataset loaders
# ---------------------------------------------------------------------------


def load_dataset(path: str | Path, fmt: str) -> Dataset:
    """Load a dataset in one of the documented formats, keeping input order."""
    path = Path(path)
    if fmt == "jsonl":
        return _load_jsonl(path)
    if fmt == "cresci-csv":
        return _load_cresci_csv(path)
    if fmt == "pan-xml-dir":
        return _load_pan_xml_dir(path)
    raise ValueError(f"unknown dataset format {fmt!r}; expected jsonl, cresci-csv or pan-xml-dir")


def _load_jsonl(path: Path) -> Dataset:
    if not path.is_file():
        raise FormatError(f"{path}: not a file")
    users = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if not isinstance(obj, dict) or "user_id" not in obj:
                raise DataError(f"{path}:{lineno}: expected an object with a user_id field")
            present = [k for k in AUX_FIELDS if k in obj]
            if present and len(present) != 4:
                raise DataError(
                    f"{path}:{lineno}: metadata counts must be all present or all absent, "
                    f"got only {present}"
                )
            try:
                users.append(
                    UserRecord(
                        user_id=str(obj["user_id"]),
                        tweets=tuple(obj.get("tweets", ())),
                        aux=tuple(int(obj[k]) for k in AUX_FIELDS) if present else None,
                        label=_parse_label(obj["label"]) if "label" in obj else None,
                    )
                )
            except DuplicateUserError:
                raise
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return _make_dataset(users, path.stem, str(path))


def _load_cresci_csv(path: Path) -> Dataset:
    users_csv = path / "users.csv"
    tweets_csv = path / "tweets.csv"
    if not users_csv.is_file():
        raise FormatError(f"{users_csv}: not found (cresci-csv needs users.csv and tweets.csv)")

    tweets: dict[str, list[str]] = {}
    if tweets_csv.is_file():
        with open(tweets_csv, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"user_id", "text"} <= set(reader.fieldnames):
                raise FormatError(f"{tweets_csv}: header must contain user_id and text")
            for lineno, row in enumerate(reader, 2):
                uid = (row.get("user_id") or "").strip()
                if not uid:
                    raise DataError(f"{tweets_csv}:{lineno}: empty user_id")
                tweets.setdefault(uid, []).append(row.get("text") or "")

    users = []
    with open(users_csv, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "user_id" not in reader.fieldnames:
            raise FormatError(f"{users_csv}: header must contain user_id")
        cols = set(reader.fieldnames)
        aux_cols = [c for c in AUX_FIELDS if c in cols]
        if aux_cols and len(aux_cols) != 4:
            raise FormatError(
                f"{users_csv}: metadata columns must be all present or all absent, got {aux_cols}"
            )
        has_label_col = "label" in cols
        for lineno, row in enumerate(reader, 2):
            uid = (row.get("user_id") or "").strip()
            try:
                aux = None
                if aux_cols:
                    aux = tuple(int(row[c]) for c in AUX_FIELDS)
                label = None
                if has_label_col and (row.get("label") or "").strip() != "":
                    label = _parse_label(row["label"])
                users.append(
                    UserRecord(
                        user_id=uid,
                        tweets=tuple(tweets.get(uid, ())),
                        aux=aux,
                        label=label,
                    )
                )
            except (DataError, ValueError) as exc:
                raise DataError(f"{users_csv}:{lineno}: user {uid!r}: {exc}") from exc

    known = {u.user_id for u in users}
    stray = sorted(set(tweets) - known)
    if stray:
        raise DataError(f"{tweets_csv}: tweets reference unknown users: {', '.join(stray[:5])}")
    return _make_dataset(users, path.name, str(path))


def _load_pan_xml_dir(path: Path) -> Dataset:
    if not path.is_dir():
        raise FormatError(f"{path}: not a directory")
    xml_files = sorted(p for p in path.iterdir() if p.suffix == ".xml")
    if not xml_files:
        raise FormatError(f"{path}: no per-user .xml files found")

    truth: dict[str, int] = {}
    truth_file = path / "truth.txt"
    if truth_file.is_file():
        with open(truth_file, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(":::")
                if len(parts) < 2:
                    raise DataError(f"{truth_file}:{lineno}: expected user:::label[:::...]")
                truth[parts[0]] = _parse_label(parts[1])

    users = []
    for xml_path in xml_files:
        uid = xml_path.stem
        try:
            root = ElementTree.parse(xml_path).getroot()
        except ElementTree.ParseError as exc:
            raise DataError(f"{xml_path}: invalid XML ({exc})") from exc
        docs = tuple((el.text or "") for el in root.iter("document"))
        if truth and uid not in truth:
            raise DataError(f"{truth_file}: user {uid!r} has tweets but no truth entry")
        users.append(UserRecord(user_id=uid, tweets=docs, label=truth.get(uid)))
    return _make_dataset(users, path.name, str(path))


def save_dataset_jsonl(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset in the documented jsonl schema (inverse of the loader)."""
    with open(path, "w", encoding="utf-8") as fh:
        for user in dataset.users:
            obj: dict = {"user_id": user.user_id, "tweets": list(user.tweets)}
            if user.aux is not None:
                obj.update(zip(AUX_FIELDS, user.aux))
            if user.label is not None:
                obj["label"] = user.label
            fh.write(json.dumps(obj, sort_keys=False) + "\n")


def _make_dataset(users: list[UserRecord], name: str, source: str) -> Dataset:
    try:
        return Dataset(users=tuple(users), name=name)
    except DuplicateUserError as exc:
        raise DuplicateUserError(f"{source}: {exc}") from exc
    except DataError as exc:
        raise DataError(f"{source}: {exc}") from exc


# ---------------------------------------------------------------------------
# RGBE embedding file format
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sHIQ")
_USER_HEAD = struct.Struct("<H")
_USER_ROWS = struct.Struct("<I")


def write_embeddings(store: EmbeddingStore, path: str | Path) -> None:
    """Write the store in RGBE layout; reading it back is bit-exact."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(EMBED_MAGIC, EMBED_VERSION, store.dim, len(store.entries)))
        for user_id, matrix in store.entries.items():
            ident = user_id.encode("utf-8")
            if len(ident) > 0xFFFF:
                raise DataError(f"user id too long to encode: {user_id[:32]!r}...")
            fh.write(_USER_HEAD.pack(len(ident)))
            fh.write(ident)
            fh.write(_USER_ROWS.pack(matrix.shape[0]))
            fh.write(matrix.tobytes())


def read_embeddings(path: str | Path) -> EmbeddingStore:
    """Read an RGBE file; malformed layout raises FormatError, bad values DataError."""
    with open(path, "rb") as fh:
        data = fh.read()
    view = memoryview(data)
    if len(view) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, dim, user_count = _HEADER.unpack_from(view, 0)
    if magic != EMBED_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {EMBED_MAGIC!r}")
    if version != EMBED_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if dim < 1:
        raise FormatError(f"{path}: dim must be >= 1, got {dim}")

    store = EmbeddingStore(dim=dim)
    offset = _HEADER.size
    for _ in range(user_count):
        if offset + _USER_HEAD.size > len(view):
            raise FormatError(f"{path}: truncated user record")
        (id_len,) = _USER_HEAD.unpack_from(view, offset)
        offset += _USER_HEAD.size
        if offset + id_len + _USER_ROWS.size > len(view):
            raise FormatError(f"{path}: truncated user record")
        user_id = bytes(view[offset : offset + id_len]).decode("utf-8")
        offset += id_len
        (n_rows,) = _USER_ROWS.unpack_from(view, offset)
        offset += _USER_ROWS.size
        nbytes = n_rows * dim * 4
        if offset + nbytes > len(view):
            raise FormatError(f"{path}: truncated payload for user {user_id!r}")
        matrix = np.frombuffer(view, dtype="<f4", count=n_rows * dim, offset=offset)
        matrix = matrix.reshape(n_rows, dim).copy()
        offset += nbytes
        if matrix.size and not np.isfinite(matrix).all():
            raise DataError(f"{path}: user {user_id!r}: embeddings contain NaN or Inf")
        try:
            store.add(user_id, matrix)
        except DuplicateUserError as exc:
            raise DuplicateUserError(f"{path}: {exc}") from exc
    if offset != len(view):
        raise FormatError(f"{path}: {len(view) - offset} trailing bytes after last user")
    return store

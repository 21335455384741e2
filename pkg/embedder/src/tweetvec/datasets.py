"""Minimal dataset readers: the embedder only needs user ids and tweets.

Supports the same three on-disk layouts as the classifier package (the
shared contract is the file format, not code): jsonl, cresci-csv
directories, and PAN-style per-user XML directories.  User order matters
because the output embedding file preserves it.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from xml.etree import ElementTree


@dataclass(frozen=True)
class TweetUser:
    user_id: str
    tweets: tuple[str, ...]


def load_users(path: str | Path, fmt: str) -> list[TweetUser]:
    path = Path(path)
    if fmt == "jsonl":
        return _load_jsonl(path)
    if fmt == "cresci-csv":
        return _load_cresci(path)
    if fmt == "pan-xml-dir":
        return _load_pan(path)
    raise ValueError(f"unknown dataset format {fmt!r}")


def _check_unique(users: list[TweetUser], source: Path) -> list[TweetUser]:
    seen = set()
    for user in users:
        if user.user_id in seen:
            raise ValueError(f"{source}: duplicate user_id {user.user_id!r}")
        seen.add(user.user_id)
    return users


def _load_jsonl(path: Path) -> list[TweetUser]:
    users = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if "user_id" not in obj:
                raise ValueError(f"{path}:{lineno}: missing user_id")
            users.append(
                TweetUser(user_id=str(obj["user_id"]),
                          tweets=tuple(str(t) for t in obj.get("tweets", ())))
            )
    return _check_unique(users, path)


def _load_cresci(path: Path) -> list[TweetUser]:
    users_csv = path / "users.csv"
    tweets_csv = path / "tweets.csv"
    if not users_csv.is_file():
        raise ValueError(f"{users_csv}: not found")
    tweets: dict[str, list[str]] = {}
    if tweets_csv.is_file():
        with open(tweets_csv, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                tweets.setdefault((row.get("user_id") or "").strip(), []).append(
                    row.get("text") or ""
                )
    users = []
    with open(users_csv, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            uid = (row.get("user_id") or "").strip()
            users.append(TweetUser(user_id=uid, tweets=tuple(tweets.get(uid, ()))))
    return _check_unique(users, path)


def _load_pan(path: Path) -> list[TweetUser]:
    users = []
    for xml_path in sorted(p for p in path.iterdir() if p.suffix == ".xml"):
        root = ElementTree.parse(xml_path).getroot()
        docs = tuple((el.text or "") for el in root.iter("document"))
        users.append(TweetUser(user_id=xml_path.stem, tweets=docs))
    if not users:
        raise ValueError(f"{path}: no per-user .xml files found")
    return _check_unique(users, path)

"""Run configuration: a small key=value file grammar plus flag overrides.

Grammar (documented in docs/formats.md): one `key = value` pair per line,
`#` starts a comment, blank lines are skipped.  Values are booleans
(true/false), integers, floats, double-quoted or bare strings, or
comma-separated lists in square brackets.  Every run persists its fully
resolved config next to its outputs for provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import DataError
from .sage import TrainConfig


def _parse_scalar(text: str):
    text = text.strip()
    if text.lower() == "true":
        return True
    if text.lower() == "false":
        return False
    if text.lower() in ("none", "null"):
        return None
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse the documented key=value grammar into a plain dict."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise DataError(f"{source}:{lineno}: empty key")
        if value.startswith("[") and value.endswith("]"):
            inner = value[1:-1].strip()
            out[key] = [] if not inner else [_parse_scalar(v) for v in inner.split(",")]
        else:
            out[key] = _parse_scalar(value)
    return out


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"config file {path} not found")
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return f'"{value}"'


def format_config(values: dict) -> str:
    return "".join(f"{k} = {_format_value(values[k])}\n" for k in sorted(values))


@dataclass
class RunConfig:
    """Everything one CLI run needs; round-trips losslessly through its file form."""

    dataset: str | None = None
    format: str = "jsonl"
    embeddings: str | None = None
    out_dir: str = "out"
    model: str | None = None
    fused: str | None = None
    taus: list[float] = field(default_factory=list)
    fallback_dim: int = 64
    fallback_seed: int = 0
    no_cache: bool = False
    split: str = "test"
    train: TrainConfig = field(default_factory=TrainConfig)

    _RUN_KEYS = (
        "dataset",
        "format",
        "embeddings",
        "out_dir",
        "model",
        "fused",
        "taus",
        "fallback_dim",
        "fallback_seed",
        "no_cache",
        "split",
    )

    @classmethod
    def from_values(cls, values: dict) -> "RunConfig":
        values = dict(values)
        run_kwargs = {}
        for key in cls._RUN_KEYS:
            if key in values:
                run_kwargs[key] = values.pop(key)
        train_fields = {f.name for f in fields(TrainConfig)}
        train_kwargs = {}
        for key in list(values):
            if key in train_fields:
                train_kwargs[key] = values.pop(key)
        if values:
            raise DataError(f"unknown config keys: {', '.join(sorted(values))}")
        if "mlp" in train_kwargs:
            train_kwargs["mlp"] = tuple(train_kwargs["mlp"])
        if "taus" in run_kwargs:
            run_kwargs["taus"] = [float(t) for t in run_kwargs["taus"]]
        try:
            return cls(**run_kwargs, train=TrainConfig(**train_kwargs))
        except (TypeError, ValueError) as exc:
            raise DataError(f"bad config: {exc}") from exc

    def to_values(self) -> dict:
        out = {key: getattr(self, key) for key in self._RUN_KEYS}
        out.update(self.train.to_dict())
        return out

    def resolved_text(self) -> str:
        return format_config(self.to_values())

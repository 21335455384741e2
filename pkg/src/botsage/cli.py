"""Command-line pipeline: embed-fallback, build-graph, train, evaluate,
sweep, ablate, export-embeddings, validate.

Every command resolves its configuration from defaults < config file <
flags, persists the resolved config beside its outputs, and is idempotent
for a fixed config and seed.  Fused matrices and graphs are cached under
<out_dir>/cache keyed by a content hash of their inputs; --no-cache
bypasses the cache.

Exit codes: 0 success, 2 usage/config problems, 3 training divergence,
4 model/data dimension mismatch, 1 any other pipeline error.  The default
output directory comes from $BOTSAGE_OUT when set.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluation
from .config import RunConfig, load_config_file
from .errors import (
    BotsageError,
    DataError,
    ModelMismatchError,
    TrainingDivergedError,
)
from .features import (
    FusedMatrix,
    NormalizationStats,
    build_fused_matrix,
    fallback_featurize,
    read_fused,
    write_fused,
)
from .graph import build_graph, graph_stats, load_graph, save_graph
from .ingest import (
    Dataset,
    EmbeddingStore,
    load_dataset,
    read_embeddings,
    validate_dataset,
    write_embeddings,
)
from .sage import Model, load_model, train_prepared

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3
EXIT_MISMATCH = 4


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

_OVERRIDE_KEYS = (
    "dataset",
    "format",
    "embeddings",
    "out_dir",
    "model",
    "fused",
    "fallback_dim",
    "fallback_seed",
    "split",
    "tau",
    "pooling",
    "hidden",
    "dropout",
    "lr",
    "epochs",
    "seed",
    "aux_normalize",
    "isolated",
)


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for key in _OVERRIDE_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "mlp", None) is not None:
        values["mlp"] = [int(w) for w in args.mlp.split(",") if w.strip()]
    if getattr(args, "taus", None) is not None:
        values["taus"] = [float(t) for t in args.taus.split(",") if t.strip()]
    if getattr(args, "no_cache", False):
        values["no_cache"] = True
    if "out_dir" not in values:
        values["out_dir"] = os.environ.get("BOTSAGE_OUT", "out")
    try:
        return RunConfig.from_values(values)
    except DataError as exc:
        raise UsageError(str(exc)) from exc


def _prepare_out_dir(rc: RunConfig) -> Path:
    out = Path(rc.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.cfg").write_text(rc.resolved_text(), encoding="utf-8")
    return out


def _require_dataset(rc: RunConfig) -> Dataset:
    if not rc.dataset:
        raise UsageError("a dataset path is required; pass --dataset or set it in the config")
    if not Path(rc.dataset).exists():
        raise UsageError(f"--dataset path {rc.dataset} does not exist")
    return load_dataset(rc.dataset, rc.format)


def _require_embeddings(rc: RunConfig) -> EmbeddingStore:
    if not rc.embeddings:
        raise UsageError(
            "an embedding file is required; pass --embeddings or set it in the config"
        )
    if not Path(rc.embeddings).exists():
        raise UsageError(f"--embeddings path {rc.embeddings} does not exist")
    return read_embeddings(rc.embeddings)


def _require_model(rc: RunConfig) -> Model:
    path = rc.model or str(Path(rc.out_dir) / "model.bsm")
    if not Path(path).exists():
        raise UsageError(f"--model path {path} does not exist")
    return load_model(path)


# ---------------------------------------------------------------------------
# content-hash cache for fused matrices and graphs
# ---------------------------------------------------------------------------


def _hash_path(path: Path, digest: "hashlib._Hash") -> None:
    if path.is_file():
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    elif path.is_dir():
        for child in sorted(path.rglob("*")):
            if child.is_file():
                digest.update(str(child.relative_to(path)).encode())
                digest.update(child.read_bytes())


def _cache_key(rc: RunConfig, *parts: str) -> str:
    digest = hashlib.sha256()
    for source in (rc.dataset, rc.embeddings):
        if source:
            _hash_path(Path(source), digest)
    for part in parts:
        digest.update(part.encode())
    return digest.hexdigest()[:24]


def _stats_to_json(stats: NormalizationStats | None) -> str:
    if stats is None:
        return json.dumps(None)
    return json.dumps(
        {"mode": stats.mode, "mean": list(stats.mean), "std": list(stats.std)},
        sort_keys=True,
    )


def _stats_from_json(text: str) -> NormalizationStats | None:
    obj = json.loads(text)
    if obj is None:
        return None
    return NormalizationStats(
        mode=obj["mode"],
        mean=np.asarray(obj["mean"], dtype=np.float64),
        std=np.asarray(obj["std"], dtype=np.float64),
    )


def _stage_fused(
    rc: RunConfig, dataset: Dataset, store: EmbeddingStore
) -> tuple[FusedMatrix, NormalizationStats | None]:
    cfg = rc.train
    if rc.fused:
        if not Path(rc.fused).exists():
            raise UsageError(f"--fused path {rc.fused} does not exist")
        fused = read_fused(rc.fused)
        if fused.tweet_dim != store.dim:
            raise ModelMismatchError(
                f"cached fused matrix has embedding dim {fused.tweet_dim}, "
                f"but the embedding store has dim {store.dim}"
            )
        if fused.rows != len(dataset):
            raise ModelMismatchError(
                f"cached fused matrix has {fused.rows} rows, dataset has {len(dataset)} users"
            )
        stats_path = Path(str(rc.fused) + ".stats.json")
        if stats_path.exists():
            return fused, _stats_from_json(stats_path.read_text(encoding="utf-8"))
        if fused.n_aux > 0:
            raise UsageError(
                f"--fused matrix carries metadata columns but {stats_path} is missing"
            )
        return fused, None
    if rc.no_cache:
        return build_fused_matrix(
            dataset, store, mode=cfg.pooling, aux_normalize=cfg.aux_normalize,
            aux_drop=cfg.aux_drop,
        )
    key = _cache_key(
        rc, "fused", cfg.pooling, cfg.aux_normalize, repr(cfg.aux_drop)
    )
    cache_dir = Path(rc.out_dir) / "cache"
    fused_path = cache_dir / f"{key}.rgbf"
    stats_path = cache_dir / f"{key}.stats.json"
    if fused_path.exists() and stats_path.exists():
        fused = read_fused(fused_path)
        if fused.tweet_dim != store.dim:
            raise ModelMismatchError(
                f"cached fused matrix has embedding dim {fused.tweet_dim}, "
                f"store has {store.dim}"
            )
        return fused, _stats_from_json(stats_path.read_text(encoding="utf-8"))
    fused, stats = build_fused_matrix(
        dataset, store, mode=cfg.pooling, aux_normalize=cfg.aux_normalize,
        aux_drop=cfg.aux_drop,
    )
    cache_dir.mkdir(parents=True, exist_ok=True)
    write_fused(fused, fused_path)
    stats_path.write_text(_stats_to_json(stats), encoding="utf-8")
    return fused, stats


def _stage_graph(rc: RunConfig, fused: FusedMatrix):
    cfg = rc.train
    if rc.no_cache:
        return build_graph(fused, cfg.tau)
    key = _cache_key(
        rc, "graph", cfg.pooling, cfg.aux_normalize, repr(cfg.aux_drop), repr(cfg.tau)
    )
    graph_path = Path(rc.out_dir) / "cache" / f"{key}.graph.txt"
    if graph_path.exists():
        return load_graph(graph_path)
    graph = build_graph(fused, cfg.tau)
    graph_path.parent.mkdir(parents=True, exist_ok=True)
    save_graph(graph, graph_path)
    return graph


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_embed_fallback(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    out = _prepare_out_dir(rc)
    target = Path(rc.embeddings) if rc.embeddings else out / "embeddings.rgbe"
    store = EmbeddingStore(dim=rc.fallback_dim)
    for user in dataset.users:
        store.add(user.user_id, fallback_featurize(user.tweets, rc.fallback_dim, rc.fallback_seed))
    target.parent.mkdir(parents=True, exist_ok=True)
    write_embeddings(store, target)
    print(json.dumps({"embeddings": str(target), "users": len(store), "dim": store.dim},
                     sort_keys=True))
    return EXIT_OK


def cmd_validate(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    _prepare_out_dir(rc)
    report = validate_dataset(dataset, store)
    print(json.dumps(
        {
            "ok": report.ok,
            "dim": report.dim,
            "users": len(dataset),
            "missing_users": list(report.missing_users),
            "zero_tweet_users": list(report.zero_tweet_users),
        },
        sort_keys=True,
    ))
    return EXIT_OK if report.ok else EXIT_ERROR


def cmd_build_graph(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    out = _prepare_out_dir(rc)
    fused, _ = _stage_fused(rc, dataset, store)
    graph = _stage_graph(rc, fused)
    save_graph(graph, out / "graph.txt")
    stats = graph_stats(graph)
    print(json.dumps(
        {
            "graph": str(out / "graph.txt"),
            "tau": rc.train.tau,
            "nodes": stats.n,
            "edges": stats.edge_count,
            "density": stats.density,
            "isolated": stats.isolated_node_count,
            "components": stats.connected_component_count,
        },
        sort_keys=True,
    ))
    return EXIT_OK


def _metrics_json(result: evaluation.EvalResult, extra: dict | None = None) -> str:
    m = result.scores_metrics
    payload = {
        "subset": result.subset,
        "size": int(result.indices.size),
        "accuracy": m.accuracy,
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
        "degenerate": list(m.degenerate),
    }
    if extra:
        payload.update(extra)
    return json.dumps(payload, sort_keys=True)


def cmd_train(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    out = _prepare_out_dir(rc)
    if not dataset.has_labels:
        raise DataError("train: every user needs a label")
    report = validate_dataset(dataset, store)
    if not report.ok:
        raise DataError(f"train: dataset failed validation: {report.summary()}")
    fused, stats = _stage_fused(rc, dataset, store)
    graph = _stage_graph(rc, fused) if rc.train.use_sage else None
    model = train_prepared(fused, stats, dataset.labels(), rc.train, graph=graph)
    model.save(out / "model.bsm")
    evaluation.write_history_csv(model.history, out / "history.csv")
    result = evaluation.evaluate_model(model, dataset, store, subset="test")
    print(_metrics_json(result, {"best_epoch": model.best_epoch, "model": str(out / "model.bsm")}))
    return EXIT_OK


def cmd_evaluate(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    model = _require_model(rc)
    out = _prepare_out_dir(rc)
    result = evaluation.evaluate_model(model, dataset, store, subset=rc.split)
    pr_points = evaluation.pr_curve(result.scores, result.truth)
    roc_points, auc = evaluation.roc_auc(result.scores, result.truth)
    evaluation.write_pr_csv(pr_points, out / "pr_curve.csv")
    evaluation.write_roc_csv(roc_points, out / "roc_curve.csv")
    print(_metrics_json(result, {"auc": auc}))
    return EXIT_OK


def cmd_sweep(rc: RunConfig) -> int:
    if not rc.taus:
        raise UsageError("sweep needs thresholds; pass --taus 0.5,0.7,0.9 or set taus in config")
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    out = _prepare_out_dir(rc)
    points = evaluation.sweep_accuracy(dataset, store, rc.train, rc.taus)
    evaluation.write_sweep_csv(points, out / "sweep.csv")
    print(json.dumps(
        {"sweep": str(out / "sweep.csv"),
         "rows": [{"tau": p.tau, "accuracy": p.accuracy} for p in points]},
        sort_keys=True,
    ))
    return EXIT_OK


def cmd_ablate(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    out = _prepare_out_dir(rc)
    rows = evaluation.ablate(dataset, store, rc.train)
    evaluation.write_ablation_csv(rows, out / "ablation.csv")
    print(json.dumps(
        {"ablation": str(out / "ablation.csv"),
         "rows": [{"row": r.name, "accuracy": r.result.accuracy} for r in rows]},
        sort_keys=True,
    ))
    return EXIT_OK


def cmd_export_embeddings(rc: RunConfig) -> int:
    dataset = _require_dataset(rc)
    store = _require_embeddings(rc)
    model = _require_model(rc)
    out = _prepare_out_dir(rc)
    evaluation.export_node_embeddings(model, dataset, store, out / "embeddings.csv")
    print(json.dumps({"embeddings": str(out / "embeddings.csv"), "users": len(dataset)},
                     sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_COMMANDS = {
    "embed-fallback": cmd_embed_fallback,
    "build-graph": cmd_build_graph,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "ablate": cmd_ablate,
    "export-embeddings": cmd_export_embeddings,
    "validate": cmd_validate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="botsage",
        description="Bot detection over a cosine-similarity user graph.",
        epilog="Exit codes: 0 ok, 2 usage/config, 3 training diverged, "
        "4 model mismatch, 1 other errors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} stage")
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--dataset", help="dataset path")
        p.add_argument("--format", choices=("jsonl", "cresci-csv", "pan-xml-dir"),
                       help="dataset format")
        p.add_argument("--embeddings", help="RGBE embedding file (output path for embed-fallback)")
        p.add_argument("--out-dir", dest="out_dir",
                       help="output directory (default: $BOTSAGE_OUT or ./out)")
        p.add_argument("--model", help="model file (default: <out-dir>/model.bsm)")
        p.add_argument("--fused", help="prebuilt RGBF fused-matrix file to reuse")
        p.add_argument("--no-cache", dest="no_cache", action="store_true",
                       help="bypass the fused/graph cache")
        p.add_argument("--tau", type=float, help="similarity threshold")
        p.add_argument("--pooling", choices=("max", "avg"), help="tweet pooling mode")
        p.add_argument("--aux-normalize", dest="aux_normalize", choices=("log-z", "none"),
                       help="metadata scaling")
        p.add_argument("--isolated", choices=("zero", "self"),
                       help="aggregation for isolated nodes")
        p.add_argument("--hidden", type=int, help="aggregation layer width")
        p.add_argument("--mlp", help="hidden head widths, e.g. 64,32")
        p.add_argument("--dropout", type=float, help="dropout rate")
        p.add_argument("--lr", type=float, help="learning rate")
        p.add_argument("--epochs", type=int, help="training epochs")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--split", choices=("train", "val", "test", "all"),
                       help="evaluation subset (default test)")
        p.add_argument("--taus", help="comma-separated thresholds for sweep")
        p.add_argument("--dim", dest="fallback_dim", type=int,
                       help="fallback featurizer dimension")
        p.add_argument("--fallback-seed", dest="fallback_seed", type=int,
                       help="fallback featurizer seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    try:
        rc = _resolve_config(args)
        return _COMMANDS[command](rc)
    except UsageError as exc:
        print(f"botsage {command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDivergedError as exc:
        print(f"botsage {command}: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ModelMismatchError as exc:
        print(f"botsage {command}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (BotsageError, OSError) as exc:
        print(f"botsage {command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""GraphSAGE mean-aggregation layer, MLP head, and the training loop.

Everything is plain numpy in float64: forward, analytic backward (verified
against central finite differences in the test suite), and full-batch Adam.
Per hidden MLP layer the order is linear -> batch norm -> ReLU -> dropout;
batch statistics are used in train mode, running statistics at inference.
All randomness (splits, init, dropout masks) derives from the config seed,
so a full training run is reproducible bit for bit.
"""

from __future__ import annotations

import copy
import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BatchTooSmallError,
    DataError,
    DimensionError,
    EmptyMaskError,
    ModelMismatchError,
    TrainingDivergedError,
)
from .features import FusedMatrix, NormalizationStats, build_fused_matrix
from .graph import GraphStats, SimilarityGraph, build_graph, graph_stats
from .ingest import Dataset, EmbeddingStore

_SEED_SPLIT = 1
_SEED_INIT = 2
_SEED_DROPOUT = 3

_LOG_FLOOR = np.finfo(np.float64).tiny


def _rng(seed: int, tag: int, *extra: int) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, tag, *extra]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters and protocol knobs for one training run."""

    tau: float = 0.9
    pooling: str = "max"
    hidden: int = 128
    mlp: tuple[int, ...] = (64, 32)
    dropout: float = 0.5
    lr: float = 1e-3
    epochs: int = 200
    seed: int = 0
    train_frac: float = 0.7
    val_frac: float = 0.1
    test_frac: float = 0.2
    bn_eps: float = 1e-5
    bn_momentum: float = 0.1
    n_classes: int = 2
    aux_normalize: str = "log-z"
    isolated: str = "zero"
    use_sage: bool = True
    aux_drop: int | None = None
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "mlp", tuple(int(w) for w in self.mlp))
        if not -1.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [-1, 1], got {self.tau}")
        if self.pooling not in ("max", "avg"):
            raise ValueError(f"pooling must be max or avg, got {self.pooling!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.hidden < 1 or any(w < 1 for w in self.mlp) or len(self.mlp) < 1:
            raise ValueError("hidden and every mlp width must be >= 1")
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f < 0 for f in fracs) or abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must be >= 0 and sum to 1, got {fracs}")
        if self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.aux_normalize not in ("log-z", "none"):
            raise ValueError(f"aux_normalize must be log-z or none, got {self.aux_normalize!r}")
        if self.isolated not in ("zero", "self"):
            raise ValueError(f"isolated must be zero or self, got {self.isolated!r}")
        if self.aux_drop is not None and not 0 <= self.aux_drop <= 3:
            raise ValueError(f"aux_drop must be in 0..3, got {self.aux_drop}")

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["mlp"] = list(self.mlp)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        d["mlp"] = tuple(d.get("mlp", (64, 32)))
        return cls(**d)


@dataclass
class SageLayerParams:
    """One mean-aggregation layer: weight over [self || neighbor-mean], plus bias."""

    W1: np.ndarray  # (h, 2*F_dim)
    b1: np.ndarray  # (h,)


@dataclass
class MlpLayer:
    W: np.ndarray  # (out, in)
    b: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray


@dataclass
class MlpParams:
    layers: list[MlpLayer]
    W_out: np.ndarray  # (C, last_width)
    b_out: np.ndarray


@dataclass
class Gradients:
    sage_W1: np.ndarray | None
    sage_b1: np.ndarray | None
    mlp: list[dict]
    W_out: np.ndarray
    b_out: np.ndarray


# ---------------------------------------------------------------------------
# forward pieces
# ---------------------------------------------------------------------------


def aggregate_neighbors(
    g: SimilarityGraph, features: FusedMatrix | np.ndarray, isolated: str = "zero"
) -> np.ndarray:
    """Row i = mean of neighbor feature rows; isolated rows are zero (or self)."""
    F = features.data if isinstance(features, FusedMatrix) else np.asarray(features, np.float64)
    if g.n != F.shape[0]:
        raise DimensionError(f"graph has {g.n} nodes but features have {F.shape[0]} rows")
    sums = np.zeros_like(F)
    degrees = g.degrees
    nonempty = degrees > 0
    if g.indices.size:
        gathered = F[g.indices]
        offsets = g.indptr[:-1][nonempty]
        sums[nonempty] = np.add.reduceat(gathered, offsets, axis=0)
    out = np.zeros_like(F)
    out[nonempty] = sums[nonempty] / degrees[nonempty, None]
    if isolated == "self":
        out[~nonempty] = F[~nonempty]
    return out


def sage_forward(
    g: SimilarityGraph,
    features: FusedMatrix | np.ndarray,
    params: SageLayerParams,
    isolated: str = "zero",
) -> np.ndarray:
    """ReLU(W1 @ [f_i || mean_{j in N(i)} f_j] + b1) for every node."""
    F = features.data if isinstance(features, FusedMatrix) else np.asarray(features, np.float64)
    agg = aggregate_neighbors(g, F, isolated=isolated)
    X0 = np.hstack([F, agg])
    if params.W1.shape[1] != X0.shape[1]:
        raise DimensionError(
            f"W1 expects input width {params.W1.shape[1]}, got {X0.shape[1]}"
        )
    return np.maximum(X0 @ params.W1.T + params.b1, 0.0)


def softmax_rows(z: np.ndarray) -> np.ndarray:
    """Numerically stable row softmax (max-subtracted)."""
    z = np.asarray(z, dtype=np.float64)
    if not np.isfinite(z).all():
        raise DataError("softmax input contains NaN or Inf")
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _as_index_array(mask, n: int) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.dtype == bool:
        if mask.shape != (n,):
            raise DimensionError(f"boolean mask must have length {n}, got {mask.shape}")
        idx = np.nonzero(mask)[0]
    else:
        idx = mask.astype(np.int64)
    if idx.size == 0:
        raise EmptyMaskError("mask selects no nodes")
    if idx.min() < 0 or idx.max() >= n:
        raise DimensionError(f"mask indices out of range for {n} nodes")
    return idx


def loss(probs: np.ndarray, labels: np.ndarray, mask) -> float:
    """Masked mean categorical cross-entropy, log clamped at the float64 floor."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    idx = _as_index_array(mask, probs.shape[0])
    picked_labels = labels[idx]
    if (picked_labels < 0).any() or (picked_labels >= probs.shape[1]).any():
        raise DataError("masked nodes must carry a valid class label")
    picked = probs[idx, picked_labels]
    return float(-np.mean(np.log(np.maximum(picked, _LOG_FLOOR))))


# ---------------------------------------------------------------------------
# full network
# ---------------------------------------------------------------------------


class Network:
    """Bundles the aggregation layer and MLP head with forward/backward passes."""

    def __init__(self, config: TrainConfig, sage: SageLayerParams | None, mlp: MlpParams):
        self.config = config
        self.sage = sage
        self.mlp = mlp

    def forward(
        self,
        F: np.ndarray,
        graph: SimilarityGraph | None,
        mode: str = "infer",
        dropout_seed=0,
        update_running: bool = False,
    ) -> tuple[np.ndarray, dict]:
        if mode not in ("train", "infer"):
            raise ValueError(f"mode must be train or infer, got {mode!r}")
        cfg = self.config
        cache: dict = {"mode": mode, "layers": []}
        n = F.shape[0]
        if mode == "train" and n < 2:
            raise BatchTooSmallError("batch statistics need at least 2 rows in train mode")

        if self.sage is not None:
            if graph is None:
                raise DimensionError("a graph is required when the aggregation layer is active")
            agg = aggregate_neighbors(graph, F, isolated=cfg.isolated)
            X0 = np.hstack([F, agg])
            Z1 = X0 @ self.sage.W1.T + self.sage.b1
            H = np.maximum(Z1, 0.0)
            cache["X0"], cache["Z1"] = X0, Z1
        else:
            H = F
        cache["H1"] = H

        p = cfg.dropout if mode == "train" else 0.0
        drop_rng = np.random.default_rng(dropout_seed) if p > 0.0 else None
        for layer in self.mlp.layers:
            entry: dict = {"Hin": H}
            Z = H @ layer.W.T + layer.b
            if mode == "train":
                mu = Z.mean(axis=0)
                var = Z.var(axis=0)
                if update_running:
                    m = cfg.bn_momentum
                    var_unbiased = var * n / (n - 1)
                    layer.running_mean = (1 - m) * layer.running_mean + m * mu
                    layer.running_var = (1 - m) * layer.running_var + m * var_unbiased
            else:
                mu = layer.running_mean
                var = layer.running_var
            inv_std = 1.0 / np.sqrt(var + cfg.bn_eps)
            xhat = (Z - mu) * inv_std
            bn_out = layer.gamma * xhat + layer.beta
            A = np.maximum(bn_out, 0.0)
            if p > 0.0:
                mask = (drop_rng.random(A.shape) >= p) / (1.0 - p)
                H = A * mask
                entry["drop_mask"] = mask
            else:
                H = A
            entry.update(Z=Z, mu=mu, var=var, inv_std=inv_std, xhat=xhat, bn_out=bn_out, A=A)
            cache["layers"].append(entry)

        cache["final_in"] = H
        logits = H @ self.mlp.W_out.T + self.mlp.b_out
        cache["logits"] = logits
        return logits, cache

    def backward(self, cache: dict, onehot: np.ndarray, mask) -> Gradients:
        """Analytic gradients of the masked cross-entropy for every parameter."""
        if cache["mode"] != "train":
            raise ValueError("backward requires a train-mode forward cache")
        logits = cache["logits"]
        n = logits.shape[0]
        idx = _as_index_array(mask, n)
        probs = softmax_rows(logits)
        dlogits = np.zeros_like(probs)
        dlogits[idx] = (probs[idx] - onehot[idx]) / idx.size

        dW_out = dlogits.T @ cache["final_in"]
        db_out = dlogits.sum(axis=0)
        dH = dlogits @ self.mlp.W_out

        mlp_grads: list[dict] = []
        for layer, entry in zip(reversed(self.mlp.layers), reversed(cache["layers"])):
            if "drop_mask" in entry:
                dA = dH * entry["drop_mask"]
            else:
                dA = dH
            dbn_out = dA * (entry["bn_out"] > 0.0)
            dgamma = (dbn_out * entry["xhat"]).sum(axis=0)
            dbeta = dbn_out.sum(axis=0)
            dxhat = dbn_out * layer.gamma
            xmu = entry["Z"] - entry["mu"]
            inv_std = entry["inv_std"]
            dvar = (dxhat * xmu).sum(axis=0) * (-0.5) * inv_std**3
            dmu = -(dxhat.sum(axis=0)) * inv_std + dvar * (-2.0) * xmu.mean(axis=0)
            dZ = dxhat * inv_std + dvar * (2.0 / n) * xmu + dmu / n
            dW = dZ.T @ entry["Hin"]
            db = dZ.sum(axis=0)
            mlp_grads.append({"W": dW, "b": db, "gamma": dgamma, "beta": dbeta})
            dH = dZ @ layer.W
        mlp_grads.reverse()

        if self.sage is not None:
            dZ1 = dH * (cache["Z1"] > 0.0)
            dW1 = dZ1.T @ cache["X0"]
            db1 = dZ1.sum(axis=0)
        else:
            dW1 = db1 = None
        return Gradients(sage_W1=dW1, sage_b1=db1, mlp=mlp_grads, W_out=dW_out, b_out=db_out)

    def parameters(self) -> list[np.ndarray]:
        params = []
        if self.sage is not None:
            params += [self.sage.W1, self.sage.b1]
        for layer in self.mlp.layers:
            params += [layer.W, layer.b, layer.gamma, layer.beta]
        params += [self.mlp.W_out, self.mlp.b_out]
        return params

    @staticmethod
    def gradient_list(grads: Gradients) -> list[np.ndarray]:
        out = []
        if grads.sage_W1 is not None:
            out += [grads.sage_W1, grads.sage_b1]
        for g in grads.mlp:
            out += [g["W"], g["b"], g["gamma"], g["beta"]]
        out += [grads.W_out, grads.b_out]
        return out

    def hidden_representation(self, F: np.ndarray, graph: SimilarityGraph | None) -> np.ndarray:
        """Last hidden activation in inference mode (the exported node embedding)."""
        _, cache = self.forward(F, graph, mode="infer")
        return cache["layers"][-1]["A"]


def mlp_forward(
    H: np.ndarray,
    params: MlpParams,
    mode: str = "infer",
    dropout_seed=0,
    dropout: float = 0.0,
    bn_eps: float = 1e-5,
) -> np.ndarray:
    """Run only the MLP head: linear -> batch norm -> ReLU -> dropout per layer."""
    cfg = TrainConfig(
        tau=0.0,
        hidden=1,
        mlp=tuple(layer.W.shape[0] for layer in params.layers),
        dropout=dropout,
        bn_eps=bn_eps,
        epochs=1,
        use_sage=False,
    )
    net = Network(cfg, sage=None, mlp=params)
    logits, _ = net.forward(np.asarray(H, np.float64), None, mode=mode, dropout_seed=dropout_seed)
    return logits


# ---------------------------------------------------------------------------
# initialization, splitting, optimization
# ---------------------------------------------------------------------------


def init_network(config: TrainConfig, f_dim: int) -> Network:
    rng = _rng(config.seed, _SEED_INIT)
    sage = None
    width = f_dim
    if config.use_sage:
        fan_in = 2 * f_dim
        sage = SageLayerParams(
            W1=rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(config.hidden, fan_in)),
            b1=np.zeros(config.hidden),
        )
        width = config.hidden
    layers = []
    for w in config.mlp:
        layers.append(
            MlpLayer(
                W=rng.normal(0.0, np.sqrt(2.0 / width), size=(w, width)),
                b=np.zeros(w),
                gamma=np.ones(w),
                beta=np.zeros(w),
                running_mean=np.zeros(w),
                running_var=np.ones(w),
            )
        )
        width = w
    mlp = MlpParams(
        layers=layers,
        W_out=rng.normal(0.0, np.sqrt(1.0 / width), size=(config.n_classes, width)),
        b_out=np.zeros(config.n_classes),
    )
    return Network(config, sage, mlp)


def stratified_split(
    labels: np.ndarray, fracs: tuple[float, float, float], seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Class-stratified shuffle into train/val/test index arrays."""
    rng = _rng(seed, _SEED_SPLIT)
    train, val, test = [], [], []
    for cls in np.unique(labels):
        idx = np.nonzero(labels == cls)[0]
        rng.shuffle(idx)
        n_tr = int(np.floor(fracs[0] * idx.size))
        n_val = int(np.floor(fracs[1] * idx.size))
        train.append(idx[:n_tr])
        val.append(idx[n_tr : n_tr + n_val])
        test.append(idx[n_tr + n_val :])
    return (
        np.sort(np.concatenate(train)),
        np.sort(np.concatenate(val)),
        np.sort(np.concatenate(test)),
    )


class _Adam:
    def __init__(self, params: list[np.ndarray], cfg: TrainConfig):
        self.params = params
        self.cfg = cfg
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: list[np.ndarray]) -> None:
        cfg = self.cfg
        self.t += 1
        b1, b2 = cfg.adam_beta1, cfg.adam_beta2
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            mhat = m / (1 - b1**self.t)
            vhat = v / (1 - b2**self.t)
            p -= cfg.lr * mhat / (np.sqrt(vhat) + cfg.adam_eps)


def fit_network(
    F: np.ndarray,
    graph: SimilarityGraph | None,
    labels: np.ndarray,
    train_idx: np.ndarray,
    val_idx: np.ndarray,
    config: TrainConfig,
) -> tuple[Network, dict[str, np.ndarray], int]:
    """Full-batch Adam over the masked cross-entropy; keeps the best-val snapshot."""
    F = np.ascontiguousarray(F, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    train_idx = np.asarray(train_idx, dtype=np.int64)
    val_idx = np.asarray(val_idx, dtype=np.int64)
    if train_idx.size == 0:
        raise EmptyMaskError("training split is empty; dataset too small for the fractions")

    net = init_network(config, F.shape[1])
    onehot = np.zeros((F.shape[0], config.n_classes))
    valid = labels >= 0
    onehot[np.nonzero(valid)[0], labels[valid]] = 1.0

    adam = _Adam(net.parameters(), config)
    hist_loss = np.empty(config.epochs)
    hist_val = np.empty(config.epochs)
    best_val = -np.inf
    best_loss = np.inf
    best_epoch = config.epochs - 1
    best_state: tuple | None = None

    for epoch in range(config.epochs):
        seed_seq = np.random.SeedSequence(
            [int(config.seed) & 0xFFFFFFFFFFFFFFFF, _SEED_DROPOUT, epoch]
        )
        logits, cache = net.forward(
            F, graph, mode="train", dropout_seed=seed_seq, update_running=True
        )
        if not np.isfinite(logits).all():
            raise TrainingDivergedError(epoch)
        epoch_loss = loss(softmax_rows(logits), labels, train_idx)
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch)
        grads = net.backward(cache, onehot, train_idx)
        adam.step(Network.gradient_list(grads))

        if val_idx.size:
            val_logits, _ = net.forward(F, graph, mode="infer")
            val_pred = np.argmax(val_logits[val_idx], axis=1)
            val_acc = float(np.mean(val_pred == labels[val_idx]))
        else:
            val_acc = np.nan
        hist_loss[epoch] = epoch_loss
        hist_val[epoch] = val_acc
        # ties on val accuracy resolve to the epoch with the lower train loss,
        # so an early lucky snapshot cannot shadow a converged one
        improved = val_acc > best_val or (val_acc == best_val and epoch_loss < best_loss)
        if val_idx.size and improved:
            best_val = val_acc
            best_loss = epoch_loss
            best_epoch = epoch
            best_state = (copy.deepcopy(net.sage), copy.deepcopy(net.mlp))

    if best_state is not None:
        net = Network(config, best_state[0], best_state[1])
    history = {
        "epoch": np.arange(config.epochs, dtype=np.int64),
        "train_loss": hist_loss,
        "val_accuracy": hist_val,
    }
    return net, history, best_epoch


# ---------------------------------------------------------------------------
# dataset-level train / predict and the on-disk model
# ---------------------------------------------------------------------------


@dataclass
class Model:
    """A trained classifier plus everything needed to reproduce its inference."""

    config: TrainConfig
    sage: SageLayerParams | None
    mlp: MlpParams
    stats: NormalizationStats | None
    tweet_dim: int
    n_aux: int
    history: dict[str, np.ndarray]
    best_epoch: int
    split: dict[str, np.ndarray]
    graph_summary: GraphStats | None = None

    @property
    def feature_dim(self) -> int:
        return self.tweet_dim + self.n_aux

    def network(self) -> Network:
        return Network(self.config, self.sage, self.mlp)

    def save(self, path: str | Path) -> None:
        save_model(self, path)

    @classmethod
    def load(cls, path: str | Path) -> "Model":
        return load_model(path)


def train_prepared(
    fused: FusedMatrix,
    stats: NormalizationStats | None,
    labels: np.ndarray,
    config: TrainConfig,
    graph: SimilarityGraph | None = None,
) -> Model:
    """Fit from an already-built fused matrix (and optionally graph)."""
    labels = np.asarray(labels, dtype=np.int64)
    if (labels < 0).any():
        raise DataError("training requires a label for every user")
    summary = None
    if config.use_sage:
        if graph is None:
            graph = build_graph(fused, config.tau)
        elif graph.n != fused.rows or graph.tau != config.tau:
            raise ModelMismatchError(
                f"prepared graph (n={graph.n}, tau={graph.tau}) does not match "
                f"the fused matrix (n={fused.rows}) and config tau {config.tau}"
            )
        summary = graph_stats(graph)
    else:
        graph = None
    train_idx, val_idx, test_idx = stratified_split(
        labels, (config.train_frac, config.val_frac, config.test_frac), config.seed
    )
    net, history, best_epoch = fit_network(fused.data, graph, labels, train_idx, val_idx, config)
    return Model(
        config=config,
        sage=net.sage,
        mlp=net.mlp,
        stats=stats,
        tweet_dim=fused.tweet_dim,
        n_aux=fused.n_aux,
        history=history,
        best_epoch=best_epoch,
        split={"train": train_idx, "val": val_idx, "test": test_idx},
        graph_summary=summary,
    )


def train(dataset: Dataset, store: EmbeddingStore, config: TrainConfig) -> Model:
    """Fuse, build the graph at config.tau, fit, and return the best-val model."""
    if not dataset.has_labels:
        raise DataError("training requires a label for every user")
    fused, stats = build_fused_matrix(
        dataset,
        store,
        mode=config.pooling,
        aux_normalize=config.aux_normalize,
        aux_drop=config.aux_drop,
    )
    return train_prepared(fused, stats, dataset.labels(), config)


def _fused_for_model(model: Model, dataset: Dataset, store: EmbeddingStore) -> FusedMatrix:
    if store.dim != model.tweet_dim:
        raise ModelMismatchError(
            f"model expects embedding dim {model.tweet_dim}, store has {store.dim}"
        )
    if model.n_aux > 0 and not dataset.has_aux:
        raise ModelMismatchError("model was trained with metadata but dataset has none")
    fused, _ = build_fused_matrix(
        dataset,
        store,
        mode=model.config.pooling,
        stats=model.stats,
        aux_normalize=model.config.aux_normalize,
        aux_drop=model.config.aux_drop,
        include_aux=model.n_aux > 0,
    )
    if fused.cols != model.feature_dim:
        raise ModelMismatchError(
            f"model expects {model.feature_dim} fused features, got {fused.cols}"
        )
    return fused


def predict(model: Model, dataset: Dataset, store: EmbeddingStore) -> tuple[np.ndarray, np.ndarray]:
    """Inference-mode bot probability and argmax label (ties resolve to human)."""
    fused = _fused_for_model(model, dataset, store)
    graph = build_graph(fused, model.config.tau) if model.config.use_sage else None
    logits, _ = model.network().forward(fused.data, graph, mode="infer")
    probs = softmax_rows(logits)
    return probs[:, 1], np.argmax(probs, axis=1)


# ---------------------------------------------------------------------------
# model file: a deterministic zip of npy arrays plus a json meta entry
# ---------------------------------------------------------------------------

_MODEL_FORMAT = "botsage-model"
_MODEL_VERSION = 1


def _npy_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr), allow_pickle=False)
    return buf.getvalue()


def save_model(model: Model, path: str | Path) -> None:
    """Byte-deterministic save: fixed zip timestamps, sorted entry names."""
    arrays: dict[str, np.ndarray] = {}
    if model.sage is not None:
        arrays["sage_W1"] = model.sage.W1
        arrays["sage_b1"] = model.sage.b1
    for i, layer in enumerate(model.mlp.layers):
        arrays[f"mlp{i}_W"] = layer.W
        arrays[f"mlp{i}_b"] = layer.b
        arrays[f"mlp{i}_gamma"] = layer.gamma
        arrays[f"mlp{i}_beta"] = layer.beta
        arrays[f"mlp{i}_rmean"] = layer.running_mean
        arrays[f"mlp{i}_rvar"] = layer.running_var
    arrays["out_W"] = model.mlp.W_out
    arrays["out_b"] = model.mlp.b_out
    if model.stats is not None:
        arrays["aux_mean"] = model.stats.mean
        arrays["aux_std"] = model.stats.std
    for key, arr in model.history.items():
        arrays[f"hist_{key}"] = arr
    for key, arr in model.split.items():
        arrays[f"split_{key}"] = np.asarray(arr, dtype=np.int64)
    gs = model.graph_summary
    if gs is not None:
        keys = sorted(gs.degree_histogram)
        arrays["gs_degrees"] = np.asarray(keys, dtype=np.int64)
        arrays["gs_counts"] = np.asarray([gs.degree_histogram[k] for k in keys], dtype=np.int64)

    meta = {
        "format": _MODEL_FORMAT,
        "version": _MODEL_VERSION,
        "config": model.config.to_dict(),
        "tweet_dim": model.tweet_dim,
        "n_aux": model.n_aux,
        "best_epoch": model.best_epoch,
        "mlp_depth": len(model.mlp.layers),
        "has_sage": model.sage is not None,
        "stats_mode": None if model.stats is None else model.stats.mode,
        "history_keys": sorted(model.history),
        "graph_summary": None
        if gs is None
        else {
            "n": gs.n,
            "edge_count": gs.edge_count,
            "density": gs.density,
            "isolated_node_count": gs.isolated_node_count,
            "connected_component_count": gs.connected_component_count,
        },
    }

    entries: dict[str, bytes] = {
        "meta.json": json.dumps(meta, sort_keys=True, indent=1).encode("utf-8")
    }
    for name in sorted(arrays):
        entries[f"arrays/{name}.npy"] = _npy_bytes(arrays[name])

    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, payload in entries.items():
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.external_attr = 0o644 << 16
            zf.writestr(info, payload)


def load_model(path: str | Path) -> Model:
    """Inverse of save_model; inference after a round trip is bit-exact."""
    try:
        with zipfile.ZipFile(path) as zf:
            meta = json.loads(zf.read("meta.json").decode("utf-8"))
            arrays = {}
            for name in zf.namelist():
                if name.startswith("arrays/") and name.endswith(".npy"):
                    with zf.open(name) as fh:
                        arrays[name[len("arrays/") : -len(".npy")]] = np.lib.format.read_array(
                            io.BytesIO(fh.read()), allow_pickle=False
                        )
    except (zipfile.BadZipFile, KeyError) as exc:
        raise DataError(f"{path}: not a model file ({exc})") from exc
    if meta.get("format") != _MODEL_FORMAT:
        raise DataError(f"{path}: unexpected model format {meta.get('format')!r}")
    if meta.get("version") != _MODEL_VERSION:
        raise DataError(f"{path}: unsupported model version {meta.get('version')!r}")

    config = TrainConfig.from_dict(meta["config"])
    sage = None
    if meta["has_sage"]:
        sage = SageLayerParams(W1=arrays["sage_W1"], b1=arrays["sage_b1"])
    layers = [
        MlpLayer(
            W=arrays[f"mlp{i}_W"],
            b=arrays[f"mlp{i}_b"],
            gamma=arrays[f"mlp{i}_gamma"],
            beta=arrays[f"mlp{i}_beta"],
            running_mean=arrays[f"mlp{i}_rmean"],
            running_var=arrays[f"mlp{i}_rvar"],
        )
        for i in range(meta["mlp_depth"])
    ]
    mlp = MlpParams(layers=layers, W_out=arrays["out_W"], b_out=arrays["out_b"])
    stats = None
    if meta["stats_mode"] is not None:
        stats = NormalizationStats(
            mode=meta["stats_mode"], mean=arrays["aux_mean"], std=arrays["aux_std"]
        )
    history = {key: arrays[f"hist_{key}"] for key in meta["history_keys"]}
    split = {key: arrays[f"split_{key}"] for key in ("train", "val", "test")}
    summary = None
    if meta["graph_summary"] is not None:
        gs = meta["graph_summary"]
        histogram = {
            int(k): int(v) for k, v in zip(arrays["gs_degrees"], arrays["gs_counts"])
        }
        summary = GraphStats(
            n=gs["n"],
            edge_count=gs["edge_count"],
            density=gs["density"],
            isolated_node_count=gs["isolated_node_count"],
            degree_histogram=histogram,
            connected_component_count=gs["connected_component_count"],
        )
    return Model(
        config=config,
        sage=sage,
        mlp=mlp,
        stats=stats,
        tweet_dim=meta["tweet_dim"],
        n_aux=meta["n_aux"],
        history=history,
        best_epoch=meta["best_epoch"],
        split=split,
        graph_summary=summary,
    )

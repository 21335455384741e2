"""scikit-learn estimator wrapper around the similarity-graph classifier.

`BotSageClassifier` works at the node-feature-matrix level: `fit(X, y)`
builds the cosine-threshold graph over the rows of X, trains the
aggregation+MLP network on the labeled rows, and `predict(X)` rebuilds a
graph over the given rows for inference.  `y` may contain -1 for
unlabeled rows (semi-supervised, as in sklearn's label propagation).
`transform(X)` exposes the learned node embeddings so the model composes
with pipelines and external projection/plotting tools.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import DataError
from .graph import build_graph, graph_stats
from .sage import TrainConfig, fit_network, softmax_rows, stratified_split


class BotSageClassifier(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Bot/human node classifier over a cosine-similarity graph.

    Parameters mirror the training config: `tau` is the edge threshold,
    `hidden` the aggregation width, `mlp` the hidden head widths,
    `val_fraction` the share of labeled rows held out to pick the best
    epoch.  With `use_sage=False` the graph step is skipped and the MLP
    sees raw features (the ablation baseline).
    """

    def __init__(
        self,
        tau: float = 0.9,
        hidden: int = 128,
        mlp: tuple[int, ...] = (64, 32),
        dropout: float = 0.5,
        lr: float = 1e-3,
        epochs: int = 200,
        seed: int = 0,
        val_fraction: float = 0.1,
        bn_eps: float = 1e-5,
        bn_momentum: float = 0.1,
        isolated: str = "zero",
        use_sage: bool = True,
    ):
        self.tau = tau
        self.hidden = hidden
        self.mlp = mlp
        self.dropout = dropout
        self.lr = lr
        self.epochs = epochs
        self.seed = seed
        self.val_fraction = val_fraction
        self.bn_eps = bn_eps
        self.bn_momentum = bn_momentum
        self.isolated = isolated
        self.use_sage = use_sage

    def _config(self) -> TrainConfig:
        return TrainConfig(
            tau=self.tau,
            hidden=self.hidden,
            mlp=tuple(self.mlp),
            dropout=self.dropout,
            lr=self.lr,
            epochs=self.epochs,
            seed=self.seed,
            train_frac=1.0 - self.val_fraction,
            val_frac=self.val_fraction,
            test_frac=0.0,
            bn_eps=self.bn_eps,
            bn_momentum=self.bn_momentum,
            isolated=self.isolated,
            use_sage=self.use_sage,
        )

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64).ravel()
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if not np.isin(y, (-1, 0, 1)).all():
            raise DataError("y must contain only 0, 1 and -1 (unlabeled)")
        labeled = np.nonzero(y >= 0)[0]
        if labeled.size == 0:
            raise DataError("fit needs at least one labeled row")

        config = self._config()
        # split only the labeled rows; unlabeled rows still shape the graph
        tr_local, val_local, leftover = stratified_split(
            y[labeled], (config.train_frac, config.val_frac, config.test_frac), config.seed
        )
        train_idx = labeled[np.sort(np.concatenate([tr_local, leftover]))]
        val_idx = labeled[val_local]

        graph = build_graph(X, config.tau) if config.use_sage else None
        net, history, best_epoch = fit_network(X, graph, y, train_idx, val_idx, config)

        self.classes_ = np.array([0, 1], dtype=np.int64)
        self.n_features_in_ = X.shape[1]
        self.network_ = net
        self.history_ = history
        self.best_epoch_ = best_epoch
        self.graph_stats_ = None if graph is None else graph_stats(graph)
        return self

    def _forward(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but fit saw {self.n_features_in_}"
            )
        graph = build_graph(X, self.tau) if self.use_sage else None
        logits, _ = self.network_.forward(X, graph, mode="infer")
        return logits

    def predict_proba(self, X) -> np.ndarray:
        return softmax_rows(self._forward(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def transform(self, X) -> np.ndarray:
        """Learned node embeddings (last hidden activation, inference mode)."""
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but fit saw {self.n_features_in_}"
            )
        graph = build_graph(X, self.tau) if self.use_sage else None
        return self.network_.hidden_representation(X, graph)

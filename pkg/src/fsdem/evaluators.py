"""Downstream measures M(k): cross-validated k-NN accuracy and clustering accuracy."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .data import Dataset, minmax_scale, stratified_folds
from .exceptions import InvalidInputError
from .metrics import ObservationCurve, build_curve

log = logging.getLogger(__name__)

MEASURES = ("accuracy", "clacc")


@dataclass(frozen=True)
class EvaluatorConfig:
    measure_id: str = "accuracy"
    knn_k: int = 5
    folds: int = 5
    clusters: Union[str, int] = "num_classes"
    restarts: int = 10
    max_iter: int = 300
    tol: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.measure_id not in MEASURES:
            raise InvalidInputError(f"unknown measure {self.measure_id!r}; expected one of {MEASURES}")
        if self.knn_k < 1:
            raise InvalidInputError(f"knn_k must be >= 1, got {self.knn_k}")
        if self.folds < 2:
            raise InvalidInputError(f"folds must be >= 2, got {self.folds}")
        if self.restarts < 1 or self.max_iter < 1:
            raise InvalidInputError("restarts and max_iter must be >= 1")
        if self.clusters != "num_classes" and int(self.clusters) < 1:
            raise InvalidInputError(f"clusters must be 'num_classes' or a positive int, got {self.clusters!r}")


# -- assignment --------------------------------------------------------------

def hungarian_assignment(cost) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect matching on a square matrix.

    Shortest-augmenting-path Hungarian method with row/column potentials,
    O(m^3). Returns ``(assignment, total)`` where ``assignment[i]`` is the
    column matched to row ``i``.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidInputError(f"cost matrix must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("cost matrix has non-finite entries")
    m = c.shape[0]
    if m == 0:
        return np.zeros(0, dtype=int), 0.0

    # 1-based arrays; column 0 is a virtual start node
    u = np.zeros(m + 1)
    v = np.zeros(m + 1)
    match_col = np.zeros(m + 1, dtype=int)  # match_col[j] = row assigned to column j
    way = np.zeros(m + 1, dtype=int)
    for i in range(1, m + 1):
        match_col[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match_col[j0]
            free = ~used[1:]
            cur = c[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[match_col[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if match_col[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match_col[j0] = match_col[j1]
            j0 = j1

    assignment = np.empty(m, dtype=int)
    for j in range(1, m + 1):
        assignment[match_col[j] - 1] = j - 1
    total = float(sum(c[i, assignment[i]] for i in range(m)))
    return assignment, total


def clustering_accuracy(pred, truth) -> float:
    """Fraction of points whose cluster maps to their class under the best bijection."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise InvalidInputError(f"label vectors differ in shape: {pred.shape} vs {truth.shape}")
    n = pred.size
    if n == 0:
        raise InvalidInputError("empty label vectors")
    clusters, p = np.unique(pred, return_inverse=True)
    classes, t = np.unique(truth, return_inverse=True)
    m = max(clusters.size, classes.size)
    counts = np.zeros((m, m))
    np.add.at(counts, (p, t), 1)
    assignment, _ = hungarian_assignment(-counts)
    matched = counts[np.arange(m), assignment].sum()
    return float(matched / n)


# -- k-NN --------------------------------------------------------------------

def _sq_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d2 = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d2, 0.0)


def knn_predict(train_x, train_y, test_x, k: int, n_classes: int) -> np.ndarray:
    """Majority vote of the k nearest training rows.

    Distance ties go to the lower training index; vote ties go to the class
    of the nearest tied neighbour.
    """
    k = min(k, train_x.shape[0])
    d2 = _sq_distances(test_x, train_x)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    votes = train_y[nearest]
    out = np.empty(test_x.shape[0], dtype=int)
    for i, row in enumerate(votes):
        counts = np.bincount(row, minlength=n_classes)
        winners = np.flatnonzero(counts == counts.max())
        if winners.size == 1:
            out[i] = winners[0]
        else:
            out[i] = next(c for c in row if c in winners)
    return out


def effective_folds(y, folds: int) -> int:
    smallest = int(np.bincount(y).min())
    if smallest >= folds:
        return folds
    reduced = max(2, smallest)
    warnings.warn(
        f"smallest class has {smallest} members; reducing folds from {folds} to {reduced}",
        RuntimeWarning,
        stacklevel=3,
    )
    return reduced


def knn_cv_accuracy(data: Dataset, features: Sequence[int], cfg: EvaluatorConfig = EvaluatorConfig()) -> float:
    """Stratified k-fold accuracy of k-NN on the min-max scaled feature subset."""
    features = list(features)
    if not features:
        raise InvalidInputError("empty feature subset")
    x = minmax_scale(data.x[:, features])
    y = data.y
    folds = effective_folds(y, cfg.folds)
    assign = stratified_folds(y, folds, cfg.seed)
    correct = []
    for f in range(folds):
        test = assign == f
        if not test.any():
            continue
        pred = knn_predict(x[~test], y[~test], x[test], cfg.knn_k, data.n_classes)
        correct.append(np.mean(pred == y[test]))
    return float(np.mean(correct))


# -- k-means -----------------------------------------------------------------

def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    closest = ((x - centers[0]) ** 2).sum(1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, ((x - x[idx]) ** 2).sum(1))
    return np.array(centers)


def lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    """Lloyd iterations from the given centres.

    Returns ``(labels, centers, inertia_history)``; the history holds the
    inertia after every assignment step. An emptied cluster is reseeded at
    the point farthest from its centre.
    """
    centers = centers.copy()
    history = []
    labels = None
    for _ in range(max_iter):
        d2 = _sq_distances(x, centers)
        labels = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(x.shape[0]), labels].sum()))
        new = centers.copy()
        for j in range(centers.shape[0]):
            members = labels == j
            if members.any():
                new[j] = x[members].mean(0)
            else:
                far = int(np.argmax(d2[np.arange(x.shape[0]), labels]))
                new[j] = x[far]
        shift = ((new - centers) ** 2).sum()
        centers = new
        if shift <= tol:
            break
    d2 = _sq_distances(x, centers)
    labels = np.argmin(d2, axis=1)
    history.append(float(d2[np.arange(x.shape[0]), labels].sum()))
    return labels, centers, history


def kmeans_cluster(data: Dataset, features: Sequence[int], clusters: int, cfg: EvaluatorConfig = EvaluatorConfig()) -> np.ndarray:
    """k-means++ seeded Lloyd, keeping the best of ``cfg.restarts`` runs."""
    features = list(features)
    if not features:
        raise InvalidInputError("empty feature subset")
    if not 1 <= clusters <= data.n:
        raise InvalidInputError(f"clusters={clusters} must be in [1, n={data.n}]")
    x = minmax_scale(data.x[:, features])
    # scale tol to the data spread like common k-means implementations
    tol = cfg.tol * float(np.mean(x.var(axis=0)))
    rng = np.random.default_rng(cfg.seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(cfg.restarts):
        labels, _, history = lloyd(x, _kmeans_pp(x, clusters, rng), cfg.max_iter, tol)
        if history[-1] < best_inertia:
            best_labels, best_inertia = labels, history[-1]
    return best_labels


def clacc_score(data: Dataset, features: Sequence[int], cfg: EvaluatorConfig = EvaluatorConfig()) -> float:
    k = data.n_classes if cfg.clusters == "num_classes" else int(cfg.clusters)
    return clustering_accuracy(kmeans_cluster(data, features, k, cfg), data.y)


def evaluate(data: Dataset, features: Sequence[int], cfg: EvaluatorConfig) -> float:
    if cfg.measure_id == "accuracy":
        return knn_cv_accuracy(data, features, cfg)
    return clacc_score(data, features, cfg)


def measure_curve(data: Dataset, ranking, cfg: EvaluatorConfig, ks: Sequence[int]) -> ObservationCurve:
    """Evaluate the configured measure on each k-prefix of ``ranking``."""
    order = list(getattr(ranking, "order", ranking))
    ks = list(ks)
    if any(k < 1 or k > data.d for k in ks):
        raise InvalidInputError(f"ks must lie in [1, {data.d}]")
    if ks != sorted(ks):
        raise InvalidInputError("ks must be sorted")
    obs = []
    for k in ks:
        value = evaluate(data, order[:k], cfg)
        log.debug("%s k=%d %s=%.4f", data.dataset_id, k, cfg.measure_id, value)
        obs.append((k, value))
    return build_curve(obs)

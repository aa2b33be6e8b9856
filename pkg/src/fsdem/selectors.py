"""Feature rankers: random baseline, information gain, chi-square, forest importance, SFS."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .data import Dataset
from .exceptions import InvalidInputError

SELECTORS = ("random", "info_gain", "chi2", "forest", "sfs")


@dataclass(frozen=True)
class FeatureRanking:
    order: tuple[int, ...]
    scores: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise InvalidInputError(f"ranking is not a permutation: {order}")
        object.__setattr__(self, "order", order)
        if self.scores is not None:
            scores = tuple(float(s) for s in self.scores)
            if len(scores) != len(order):
                raise InvalidInputError("scores and order differ in length")
            object.__setattr__(self, "scores", scores)

    def prefix(self, k: int) -> list[int]:
        return list(self.order[:k])


@dataclass(frozen=True)
class SelectorConfig:
    selector_id: str = "info_gain"
    seed: int = 0
    bins: int = 10
    trees: int = 100
    features_per_split: Union[str, int] = "sqrt"
    max_depth: Optional[int] = None
    sfs_evaluator: str = "accuracy"
    sfs_k: Optional[int] = None

    def __post_init__(self):
        if self.selector_id not in SELECTORS:
            raise InvalidInputError(f"unknown selector {self.selector_id!r}; expected one of {SELECTORS}")
        if self.bins < 2:
            raise InvalidInputError(f"bins must be >= 2, got {self.bins}")
        if self.trees < 1:
            raise InvalidInputError(f"trees must be >= 1, got {self.trees}")


def rank_by_scores(scores) -> FeatureRanking:
    """Descending score, ties broken by ascending feature index."""
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((np.arange(scores.size), -scores))
    return FeatureRanking(tuple(order), tuple(scores[order]))


def random_ranking(d: int, seed: int = 0) -> FeatureRanking:
    if d < 1:
        raise InvalidInputError(f"d must be >= 1, got {d}")
    return FeatureRanking(tuple(np.random.default_rng(seed).permutation(d)))


def equal_width_bins(column, bins: int) -> np.ndarray:
    """Bin index per value using ``bins`` equal-width bins over [min, max]."""
    column = np.asarray(column, dtype=float)
    lo, hi = column.min(), column.max()
    if hi == lo:
        return np.zeros(column.size, dtype=int)
    idx = np.floor((column - lo) / (hi - lo) * bins).astype(int)
    return np.clip(idx, 0, bins - 1)


def _contingency(column, y, bins: int) -> np.ndarray:
    b = equal_width_bins(column, bins)
    table = np.zeros((bins, int(y.max()) + 1))
    np.add.at(table, (b, y), 1)
    return table


def entropy(counts) -> float:
    counts = np.asarray(counts, dtype=float)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def information_gain(column, y, bins: int = 10) -> float:
    table = _contingency(column, np.asarray(y), bins)
    n = table.sum()
    h_y = entropy(table.sum(0))
    h_y_given_x = sum(row.sum() / n * entropy(row) for row in table if row.sum() > 0)
    return h_y - h_y_given_x


def chi2_statistic(column, y, bins: int = 10) -> float:
    table = _contingency(column, np.asarray(y), bins)
    table = table[table.sum(1) > 0][:, table.sum(0) > 0]
    expected = table.sum(1, keepdims=True) * table.sum(0, keepdims=True) / table.sum()
    return float(((table - expected) ** 2 / expected).sum())


def _warn_single_class(data: Dataset, name: str) -> None:
    if data.n_classes < 2:
        warnings.warn(f"{name}: dataset {data.dataset_id!r} has a single class; all scores are 0", RuntimeWarning, stacklevel=3)


def info_gain_ranking(data: Dataset, bins: int = 10) -> FeatureRanking:
    _warn_single_class(data, "info_gain")
    return rank_by_scores([information_gain(data.x[:, j], data.y, bins) for j in range(data.d)])


def chi2_ranking(data: Dataset, bins: int = 10) -> FeatureRanking:
    _warn_single_class(data, "chi2")
    return rank_by_scores([chi2_statistic(data.x[:, j], data.y, bins) for j in range(data.d)])


def forest_importances(data: Dataset, cfg: SelectorConfig) -> np.ndarray:
    """Normalized mean Gini decrease from a bagged CART ensemble."""
    from sklearn.ensemble import RandomForestClassifier

    if data.n < 2 or data.n_classes < 2:
        raise InvalidInputError(f"forest ranking needs n >= 2 and >= 2 classes ({data.dataset_id})")
    forest = RandomForestClassifier(
        n_estimators=cfg.trees,
        criterion="gini",
        max_features=cfg.features_per_split,
        max_depth=cfg.max_depth,
        min_samples_split=2,
        bootstrap=True,
        random_state=cfg.seed % 2**32,
        n_jobs=1,
    )
    forest.fit(data.x, data.y)
    imp = np.asarray(forest.feature_importances_, dtype=float)
    total = imp.sum()
    return imp / total if total > 0 else np.full(data.d, 1.0 / data.d)


def forest_importance_ranking(data: Dataset, cfg: SelectorConfig = SelectorConfig("forest")) -> FeatureRanking:
    return rank_by_scores(forest_importances(data, cfg))


def sequential_forward_selection(data: Dataset, evaluator, k: Optional[int] = None, seed: int = 0) -> FeatureRanking:
    """Greedy forward selection driven by ``evaluator``.

    ``evaluator`` is a measure id ("accuracy" / "clacc"), an EvaluatorConfig,
    or a callable ``(data, features) -> score``. The first ``k`` entries are
    the add order; the rest follow in ascending index.
    """
    from .evaluators import EvaluatorConfig, evaluate

    k = data.d if k is None else k
    if not 1 <= k <= data.d:
        raise InvalidInputError(f"k must be in [1, {data.d}], got {k}")
    if callable(evaluator):
        score = evaluator
    else:
        if isinstance(evaluator, str):
            evaluator = EvaluatorConfig(measure_id=evaluator, seed=seed)
        score = lambda ds, feats: evaluate(ds, feats, evaluator)  # noqa: E731

    chosen: list[int] = []
    remaining = list(range(data.d))
    for _ in range(k):
        best_j, best_s = None, -np.inf
        for j in remaining:
            s = score(data, chosen + [j])
            if s > best_s:
                best_j, best_s = j, s
        chosen.append(best_j)
        remaining.remove(best_j)
    return FeatureRanking(tuple(chosen + remaining))


def rank(data: Dataset, cfg: SelectorConfig) -> FeatureRanking:
    if cfg.selector_id == "random":
        return random_ranking(data.d, cfg.seed)
    if cfg.selector_id == "info_gain":
        return info_gain_ranking(data, cfg.bins)
    if cfg.selector_id == "chi2":
        return chi2_ranking(data, cfg.bins)
    if cfg.selector_id == "forest":
        return forest_importance_ranking(data, cfg)
    return sequential_forward_selection(data, cfg.sfs_evaluator, cfg.sfs_k, cfg.seed)

"""Desk-scale benchmark suite written to local CSV files.

Three tables ship with scikit-learn and match benchmark datasets exactly
(iris 150x4, wine 178x13, breast-cancer 569x30). The rest are synthetic
stand-ins with the shape and class count of other benchmark tables; they
are labelled ``*_like`` so nobody mistakes them for the real data.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import Dataset, write_csv

# name -> (n, d, classes, informative, redundant)
SYNTHETIC_SHAPES = {
    "glass_like": (214, 9, 6, 5, 2),
    "ionosphere_like": (351, 34, 2, 6, 6),
    "dermatology_like": (366, 34, 6, 8, 6),
    "hepatitis_like": (155, 19, 2, 4, 3),
}


def bundled(name: str) -> Dataset:
    from sklearn import datasets

    loader = {
        "iris": datasets.load_iris,
        "wine": datasets.load_wine,
        "breast_cancer": datasets.load_breast_cancer,
    }[name]
    b = loader()
    return Dataset(b.data, b.target, tuple(str(f) for f in b.feature_names), name)


def synthetic(name: str, seed: int = 0) -> Dataset:
    from sklearn.datasets import make_classification

    n, d, classes, informative, redundant = SYNTHETIC_SHAPES[name]
    x, y = make_classification(
        n_samples=n,
        n_features=d,
        n_informative=informative,
        n_redundant=redundant,
        n_classes=classes,
        n_clusters_per_class=1,
        class_sep=1.5,
        flip_y=0.02,
        shuffle=True,
        random_state=seed,
    )
    return Dataset(np.round(x, 6), y, tuple(f"f{j}" for j in range(d)), name)


def desk_suite(out_dir, seed: int = 0) -> list[tuple[str, Path]]:
    """Write every suite table as CSV (label in the last column)."""
    out = Path(out_dir)
    written = []
    for name in ("iris", "wine", "breast_cancer"):
        written.append((name, write_csv(bundled(name), out / f"{name}.csv")))
    for name in SYNTHETIC_SHAPES:
        written.append((name, write_csv(synthetic(name, seed), out / f"{name}.csv")))
    return written

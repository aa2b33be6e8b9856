"""Dataset container, CSV ingestion, preprocessing and the synthetic wealth data."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DataFormatError, IngestionError, InvalidInputError

WEALTH_FEATURES = (
    "age",
    "salary_eur",
    "salary_usd",
    "residence_size",
    "distance_km",
    "distance_miles",
)
EUR_TO_USD = 1.1
KM_TO_MILES = 0.621371


@dataclass(frozen=True, eq=False)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    dataset_id: str = "dataset"

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = np.array(self.y, dtype=int)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise InvalidInputError(f"x must be a non-empty n x d matrix, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise InvalidInputError(f"y has shape {y.shape}, expected ({x.shape[0]},)")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("x contains missing or non-finite values")
        classes = np.unique(y)
        if not np.array_equal(classes, np.arange(classes.size)):
            raise InvalidInputError(f"labels must be contiguous 0..C-1, got {classes.tolist()}")
        names = tuple(str(n) for n in self.feature_names)
        if len(names) != x.shape[1]:
            raise InvalidInputError(f"{len(names)} feature names for {x.shape[1]} columns")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def n_classes(self) -> int:
        return int(self.y.max()) + 1


@dataclass(frozen=True)
class ColumnSpec:
    """How to read a CSV file.

    ``label_column`` is a header name or a 0-based index (negative counts from
    the end). ``header=None`` auto-detects a header row.
    """

    label_column: Union[str, int] = -1
    categorical_columns: frozenset = field(default_factory=frozenset)
    missing_markers: frozenset = frozenset({"?", ""})
    header: Optional[bool] = None


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise InvalidInputError(f"noise level must be >= 0, got {self.level}")


def _parse_float(text: str) -> Optional[float]:
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _sort_labels(labels: Sequence[str]) -> list[str]:
    uniq = set(labels)
    if all(_parse_float(s) is not None for s in uniq):
        return sorted(uniq, key=lambda s: (float(s), s))
    return sorted(uniq)


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [[c.strip() for c in r] for r in csv.reader(fh, strict=True)]
    except csv.Error as exc:
        raise DataFormatError(f"malformed CSV {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path} is not UTF-8: {exc}") from exc
    rows = [r for r in rows if any(r)]
    if not rows:
        raise DataFormatError(f"{path} contains no rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataFormatError(f"expected {width} fields, found {len(r)}", row=i + 1)
    return rows


def _detect_header(rows: list[list[str]], missing: frozenset) -> bool:
    if len(rows) < 2:
        return False
    first, body = rows[0], rows[1:]
    for j, cell in enumerate(first):
        column = [r[j] for r in body if r[j] not in missing]
        numeric = bool(column) and all(_parse_float(c) is not None for c in column)
        if numeric and _parse_float(cell) is None and cell not in missing:
            return True
    return False


def _resolve_column(ref, names: list[str]) -> int:
    if isinstance(ref, str) and not ref.lstrip("-").isdigit():
        if ref not in names:
            raise IngestionError(f"column {ref!r} not found in header {names}")
        return names.index(ref)
    idx = int(ref)
    width = len(names)
    if not -width <= idx < width:
        raise IngestionError(f"column index {idx} out of range for {width} columns")
    return idx % width


def load_csv(path, spec: ColumnSpec = ColumnSpec(), dataset_id: Optional[str] = None) -> Dataset:
    """Read a CSV into a Dataset.

    Categorical columns are ordinal-encoded by sorted category text, missing
    numeric cells take the column median and missing categoricals the mode.
    Labels map to 0..C-1 in sorted order (numeric order when every label
    parses as a number).
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"no such file: {path}")
    rows = _read_rows(path)
    missing = frozenset(spec.missing_markers)
    has_header = _detect_header(rows, missing) if spec.header is None else spec.header
    if has_header:
        names, body = rows[0], rows[1:]
    else:
        names, body = [f"x{j}" for j in range(len(rows[0]))], rows
    if not body:
        raise DataFormatError(f"{path} has a header but no data rows")

    label_idx = _resolve_column(spec.label_column, names)
    cat_idx = {_resolve_column(c, names) for c in spec.categorical_columns}
    first_data_row = 2 if has_header else 1

    labels = [r[label_idx] for r in body]
    for i, lab in enumerate(labels):
        if lab in missing:
            raise DataFormatError("missing class label", row=i + first_data_row, column=names[label_idx])
    label_order = {lab: c for c, lab in enumerate(_sort_labels(labels))}
    y = np.array([label_order[lab] for lab in labels], dtype=int)

    columns, feat_names = [], []
    for j, name in enumerate(names):
        if j == label_idx:
            continue
        cells = [r[j] for r in body]
        present = [c for c in cells if c not in missing]
        if not present:
            raise IngestionError(f"column {name!r} has no values")
        categorical = j in cat_idx or any(_parse_float(c) is None for c in present)
        if categorical:
            cats = sorted(set(present))
            codes = {c: float(i) for i, c in enumerate(cats)}
            counts = {c: present.count(c) for c in cats}
            mode = max(cats, key=lambda c: (counts[c], -codes[c]))
            col = [codes[c] if c not in missing else codes[mode] for c in cells]
        else:
            vals = [_parse_float(c) for c in present]
            median = float(np.median(vals))
            col = [_parse_float(c) if c not in missing else median for c in cells]
        columns.append(col)
        feat_names.append(name)
    if not columns:
        raise IngestionError(f"{path} has no feature columns")

    x = np.array(columns, dtype=float).T
    return Dataset(x, y, tuple(feat_names), dataset_id or path.stem)


def minmax_normalize(data: Dataset) -> Dataset:
    return replace(data, x=minmax_scale(data.x))


def minmax_scale(x: np.ndarray) -> np.ndarray:
    """Affinely map every column onto [0, 1]; constant columns become 0."""
    x = np.asarray(x, dtype=float)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    out = (x - lo) / safe
    out[:, span == 0] = 0.0
    return np.clip(out, 0.0, 1.0)


def inject_noise(data: Dataset, spec: NoiseSpec) -> Dataset:
    """Gaussian noise with per-column sigma = level * column std."""
    if spec.level == 0:
        return data
    rng = np.random.default_rng(spec.seed)
    sigma = spec.level * data.x.std(axis=0)
    noisy = data.x + rng.standard_normal(data.x.shape) * sigma
    return replace(data, x=noisy)


def generate_wealth_dummy(n: int = 500, seed: int = 0) -> Dataset:
    """Six-feature 'wealth' toy data with two exactly redundant pairs.

    salary_usd and distance_miles are fixed positive multiples of salary_eur
    and distance_km. The label is 1 when standardized salary plus residence
    size minus distance exceeds its median, with 2% of labels flipped.
    """
    if n < 10:
        raise InvalidInputError(f"n must be >= 10, got {n}")
    rng = np.random.default_rng(seed)
    age = rng.uniform(18, 80, n)
    salary_eur = rng.lognormal(mean=10.5, sigma=0.5, size=n)
    size = np.clip(rng.normal(90, 30, n), 10, None)
    dist_km = rng.exponential(10.0, n)

    def z(v):
        return (v - v.mean()) / v.std()

    score = z(salary_eur) + z(size) - z(dist_km)
    y = (score > np.median(score)).astype(int)
    flips = rng.choice(n, size=round(0.02 * n), replace=False)
    y[flips] = 1 - y[flips]

    x = np.column_stack([age, salary_eur, EUR_TO_USD * salary_eur, size, dist_km, KM_TO_MILES * dist_km])
    return Dataset(x, y, WEALTH_FEATURES, "wealth")


def stratified_folds(labels, folds: int, seed: int = 0) -> np.ndarray:
    """Fold id per row, spreading each class as evenly as possible.

    Classes are dealt round-robin, each class starting where the previous one
    stopped, so fold sizes also stay within one of each other.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if folds < 2:
        raise InvalidInputError(f"folds must be >= 2, got {folds}")
    if folds > n:
        raise InvalidInputError(f"folds={folds} exceeds n={n}")
    rng = np.random.default_rng(seed)
    assignment = np.empty(n, dtype=int)
    offset = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        assignment[idx] = (offset + np.arange(idx.size)) % folds
        offset = (offset + idx.size) % folds
    return assignment


def write_csv(data: Dataset, path, label_name: str = "label") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(data.feature_names) + [label_name])
        for row, lab in zip(data.x, data.y):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])
    return path

"""Labeled dataset loading and the preprocessing used before feature selection."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Literal

import numpy as np

Format = Literal["csv_labeled_last", "csv_labeled_first", "svmlight_like"]
FORMATS: tuple[str, ...] = ("csv_labeled_last", "csv_labeled_first", "svmlight_like")

_SPLIT = re.compile(r"[,\s]+")


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    source: str = ""
    provenance: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise DataError("values must be a 2-d array")
        if len(self.labels) != len(self.values):
            raise DataError("one label per sample required")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise DataError("labels out of range")

    @property
    def sample_count(self) -> int:
        return int(self.values.shape[0])

    @property
    def feature_count(self) -> int:
        return int(self.values.shape[1])

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def derive(self, values: np.ndarray, step: str) -> Dataset:
        return replace(self, values=values, provenance=self.provenance + (step,))


def _number(cell: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(f"row {row}: non-numeric cell {cell!r}") from None


def load_dataset(path: str | Path, format: Format = "csv_labeled_last") -> Dataset:
    """Read a delimited file with one labeled sample per row.

    Cells are separated by commas and/or whitespace; blank lines and lines
    starting with ``#`` are skipped.  Labels are mapped to dense indices in
    order of first appearance.
    """
    if format not in FORMATS:
        raise DataError(f"unknown format {format!r}")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    rows: list[list[float]] = []
    raw_labels: list[str] = []
    sparse: list[dict[int, float]] = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c for c in _SPLIT.split(line) if c]
        if format == "svmlight_like":
            label, entries = cells[0], {}
            for item in cells[1:]:
                idx, sep, val = item.partition(":")
                if not sep or not idx.isdigit() or int(idx) < 1:
                    raise DataError(f"row {lineno}: bad sparse entry {item!r}")
                entries[int(idx) - 1] = _number(val, lineno)
            raw_labels.append(label)
            sparse.append(entries)
            continue
        if len(cells) < 2:
            raise DataError(f"row {lineno}: need at least one feature and a label")
        if format == "csv_labeled_last":
            label, feats = cells[-1], cells[:-1]
        else:
            label, feats = cells[0], cells[1:]
        if width is None:
            width = len(feats)
        elif len(feats) != width:
            raise DataError(f"row {lineno}: expected {width} features, got {len(feats)}")
        rows.append([_number(c, lineno) for c in feats])
        raw_labels.append(label)

    if not raw_labels:
        raise DataError(f"{path}: no samples")
    if format == "svmlight_like":
        width = max((max(e) + 1 for e in sparse if e), default=0)
        if width == 0:
            raise DataError(f"{path}: no features")
        values = np.zeros((len(sparse), width))
        for i, entries in enumerate(sparse):
            for j, v in entries.items():
                values[i, j] = v
    else:
        values = np.asarray(rows, dtype=float)

    names: dict[str, int] = {}
    labels = np.array([names.setdefault(lab, len(names)) for lab in raw_labels], dtype=np.int64)
    return Dataset(values, labels, tuple(names), source=str(path), provenance=(f"load:{format}",))


def bundled_path(name: str) -> Path:
    """Path of a fixture shipped in ``ucurve/data``."""
    ref = resources.files("ucurve") / "data" / name
    path = Path(str(ref))
    if not path.exists():
        raise DataError(f"no bundled dataset {name!r}")
    return path


def zscore_binarize(d: Dataset) -> Dataset:
    """Standardize each feature and keep only the sign (positive -> 1).

    Uses the population standard deviation.  Constant features become all 0.
    """
    x = d.values.astype(float)
    centered = x - x.mean(axis=0)
    std = x.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    z = np.where(std > 0, centered / safe, 0.0)
    return d.derive((z > 0).astype(np.int64), "binarize")


def filter_sparse_features(d: Dataset, min_nonnull: int) -> Dataset:
    """Keep features with at least ``min_nonnull`` non-zero values."""
    keep = np.flatnonzero((d.values != 0).sum(axis=0) >= min_nonnull)
    if len(keep) == 0:
        raise DataError(f"no feature has {min_nonnull} or more non-null values")
    step = f"filter:{min_nonnull}:kept=" + ",".join(map(str, keep.tolist()))
    return d.derive(d.values[:, keep], step)


def quantize_levels(d: Dataset, k: int) -> Dataset:
    """Equal-frequency binning of every feature into ``k`` levels.

    Each distinct value is placed by the midpoint of the rank range its
    samples occupy: level ``floor(k * midpoint / t)``.  Equal values always
    share a level.  Levels are renumbered densely afterwards, so a feature
    with fewer than ``k`` distinct values uses fewer levels.
    """
    if k < 2:
        raise DataError("quantization needs k >= 2")
    x = d.values
    t, n = x.shape
    out = np.zeros((t, n), dtype=np.int64)
    for j in range(n):
        uniq, inv, counts = np.unique(x[:, j], return_inverse=True, return_counts=True)
        before = np.concatenate(([0], np.cumsum(counts)[:-1]))
        level = np.floor(k * (before + counts / 2) / t).astype(np.int64)
        _, dense = np.unique(np.minimum(level, k - 1), return_inverse=True)
        out[:, j] = dense.reshape(-1)[inv.reshape(-1)]
    return d.derive(out, f"quantize:{k}:equal-frequency")


def preprocess(d: Dataset, steps: list[str]) -> Dataset:
    """Apply ``binarize``, ``quantize=k`` and ``filter=m`` steps.

    Filters always run first, on raw values.
    """
    parsed = []
    for step in steps:
        name, _, arg = step.partition("=")
        if name == "binarize" and not arg:
            parsed.append((1, name, 0))
        elif name in ("quantize", "filter") and arg.isdigit():
            parsed.append((0 if name == "filter" else 1, name, int(arg)))
        else:
            raise DataError(f"unknown preprocessing step {step!r}")
    for _, name, arg in sorted(parsed, key=lambda p: p[0]):
        if name == "filter":
            d = filter_sparse_features(d, arg)
        elif name == "binarize":
            d = zscore_binarize(d)
        else:
            d = quantize_levels(d, arg)
    return d


def is_discrete(d: Dataset) -> bool:
    v = d.values
    return bool(np.all(v >= 0) and np.all(np.mod(v, 1) == 0))


def as_discrete(d: Dataset) -> Dataset:
    if not is_discrete(d):
        raise DataError("dataset has non-integer or negative values; binarize or quantize it first")
    if d.values.dtype.kind == "i":
        return d
    return replace(d, values=d.values.astype(np.int64))


def write_dataset(d: Dataset, path: str | Path) -> None:
    """CSV with the label last and a ``#`` provenance header."""
    lines = [f"# source={d.source} steps={';'.join(d.provenance)}"]
    for row, lab in zip(d.values.tolist(), d.labels.tolist()):
        cells = [str(int(v)) if float(v).is_integer() else repr(float(v)) for v in row]
        lines.append(",".join(cells + [d.class_names[lab]]))
    Path(path).write_text("\n".join(lines) + "\n")

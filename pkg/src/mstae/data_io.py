"""Dataset ingestion, standardization and synthetic generators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np


class DataError(ValueError):
    """Raised for unreadable or invalid input data."""


NORMAL_TOKENS = {"0", "no", "n", "normal"}
ANOMALY_TOKENS = {"1", "yes", "o", "anomaly"}


@dataclass(frozen=True)
class DataMatrix:
    values: np.ndarray
    standardized: bool = False
    feature_names: Optional[tuple] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DataError(f"expected a 2-d matrix, got shape {v.shape}")
        if v.shape[0] < 2 or v.shape[1] < 1:
            raise DataError(f"need at least 2 rows and 1 column, got shape {v.shape}")
        bad = ~np.isfinite(v).all(axis=1)
        if bad.any():
            raise DataError(f"non-finite values in row {int(np.flatnonzero(bad)[0])}")
        if self.feature_names is not None and len(self.feature_names) != v.shape[1]:
            raise DataError("feature_names length does not match column count")
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Boolean anomaly flags (True = anomaly)."""

    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=bool)
        if lab.ndim != 1:
            raise DataError("labels must be one-dimensional")
        object.__setattr__(self, "labels", lab)

    @property
    def anomaly_count(self) -> int:
        return int(self.labels.sum())

    def __len__(self):
        return self.labels.shape[0]


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str = "swiss_roll"
    n_points: int = 1000
    ambient_dim: int = 3
    intrinsic_dim: int = 2
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("swiss_roll", "hypercube"):
            raise DataError(f"unknown synthetic kind {self.kind!r}")
        if self.kind == "swiss_roll" and (self.ambient_dim, self.intrinsic_dim) != (3, 2):
            raise DataError("swiss_roll has intrinsic_dim=2 and ambient_dim=3")
        if self.n_points < 2:
            raise DataError("n_points must be >= 2")
        if not 1 <= self.intrinsic_dim <= self.ambient_dim:
            raise DataError("need 1 <= intrinsic_dim <= ambient_dim")
        if self.noise_std < 0:
            raise DataError("noise_std must be nonnegative")


def parse_label(token: str) -> bool:
    t = token.strip().strip("'\"").lower()
    if t in NORMAL_TOKENS:
        return False
    if t in ANOMALY_TOKENS:
        return True
    try:
        # "0.0" / "1.0" style numeric labels
        f = float(t)
    except ValueError:
        f = None
    if f == 0.0:
        return False
    if f == 1.0:
        return True
    raise DataError(f"unparseable label {token!r}")


def _sniff_delimiter(header: str) -> str:
    return ";" if header.count(";") > header.count(",") else ","


def _resolve_label_col(spec: Union[None, int, str], header: Sequence[str]) -> int:
    if spec is None:
        return len(header) - 1
    if isinstance(spec, int):
        idx = spec if spec >= 0 else len(header) + spec
    elif spec.lstrip("-").isdigit():
        return _resolve_label_col(int(spec), header)
    else:
        names = [h.strip() for h in header]
        if spec not in names:
            raise DataError(f"label column {spec!r} not in header {names}")
        idx = names.index(spec)
    if not 0 <= idx < len(header):
        raise DataError(f"label column index {spec} out of range")
    return idx


def _read_table(path, label_column, parse):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise DataError(f"empty file: {path}")
        delim = _sniff_delimiter(header_line)
        header = next(csv.reader([header_line], delimiter=delim))
        label_idx = _resolve_label_col(label_column, header)
        rows, labels = [], []
        for lineno, row in enumerate(csv.reader(fh, delimiter=delim), start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                labels.append(parse(row[label_idx]))
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            feats = row[:label_idx] + row[label_idx + 1:]
            try:
                vals = [float(c) for c in feats]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if len(rows) < 2:
        raise DataError(f"{path}: fewer than 2 usable rows")
    names = tuple(h.strip() for i, h in enumerate(header) if i != label_idx)
    return DataMatrix(np.array(rows), False, names), labels


def load_dataset(path, label_column=None) -> tuple[DataMatrix, LabelVector]:
    """Read a delimited text file with one header row.

    The delimiter (comma or semicolon) is detected from the header line. The
    label column is given by name or index (default: last column). Row order
    is preserved and the data is returned unstandardized.
    """
    x, labels = _read_table(path, label_column, parse_label)
    return x, LabelVector(np.array(labels))


def load_classes(path, label_column=None) -> tuple[DataMatrix, np.ndarray]:
    """Like :func:`load_dataset` but the label column holds arbitrary class tokens."""
    x, labels = _read_table(path, label_column, lambda t: t.strip().strip("'\""))
    _, codes = np.unique(np.array(labels), return_inverse=True)
    return x, codes


def save_dataset(path, x: DataMatrix, labels: LabelVector) -> None:
    """Write comma-separated text with a trailing ``label`` column (0/1)."""
    names = x.feature_names or tuple(f"x{j}" for j in range(x.d))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*names, "label"])
        for row, lab in zip(x.values, labels.labels):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])


def standardize(x: DataMatrix) -> DataMatrix:
    """Column-wise z-scoring with the population (1/m) standard deviation.

    Constant columns map to zero.
    """
    if x.standardized:
        raise DataError("data is already standardized")
    v = x.values
    mu = v.mean(axis=0)
    centered = v - mu
    # rescale before squaring so tiny columns do not underflow to sd = 0
    const = np.ptp(v, axis=0) == 0
    scale = np.where(const, 1.0, np.abs(centered).max(axis=0))
    sd = scale * np.sqrt(((centered / scale) ** 2).mean(axis=0))
    out = centered / np.where(const, 1.0, sd)
    out[:, const] = 0.0
    return replace(x, values=out, standardized=True)


def _random_rotation(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def make_synthetic(spec: SyntheticSpec) -> tuple[DataMatrix, LabelVector]:
    """Swiss roll or rotated uniform hypercube, fully determined by ``spec``.

    Swiss roll: t ~ U[1.5*pi, 4.5*pi], h ~ U[0, 21], point (t cos t, h, t sin t).
    Hypercube: U[0,1]^q, embedded into the ambient space by the first q
    columns of a seeded random rotation (identity when q equals the ambient
    dimension), plus isotropic Gaussian noise.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_points
    if spec.kind == "swiss_roll":
        t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, n)
        h = rng.uniform(0.0, 21.0, n)
        pts = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
    else:
        u = rng.uniform(0.0, 1.0, (n, spec.intrinsic_dim))
        if spec.intrinsic_dim == spec.ambient_dim:
            pts = u
        else:
            rot = _random_rotation(rng, spec.ambient_dim)
            pts = u @ rot[:, : spec.intrinsic_dim].T
    if spec.noise_std > 0:
        pts = pts + rng.normal(0.0, spec.noise_std, pts.shape)
    return DataMatrix(pts), LabelVector(np.zeros(n, dtype=bool))

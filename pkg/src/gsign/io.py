"""CSV ingestion, quantile splits, pairwise class comparison and result files.

Output schemas
--------------
* test result (JSON): ``statistic, p_value, B, seed, method, alpha, reject``
* power table (CSV): ``test, delta, rejections, replications, power, se`` and,
  when an oracle null was used, ``on_rejections, on_power, on_se``
* p-value matrix (CSV): header ``class`` followed by the class names; each
  row starts with its class name
* oracle draws (CSV): one column per test, one row per simulated dataset

Floats are written with 17 significant digits so they read back bit-for-bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import KernelSpec, ScalingSpec, as_data_matrix
from .resampling import TestResult, two_sample_test
from .simgen import PowerRow, PowerTable
from .statistics import GroupLabels


class DataFormatError(ValueError):
    """Malformed input file."""


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    X: np.ndarray
    labels: Optional[np.ndarray] = None
    scores: Optional[np.ndarray] = None
    columns: tuple = ()

    def __post_init__(self):
        n = self.X.shape[0]
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("label vector length does not match the number of rows")
        if self.scores is not None:
            if len(self.scores) != n:
                raise ValueError("score vector length does not match the number of rows")
            if not np.all(np.isfinite(self.scores)):
                raise ValueError("scores must be finite")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def classes(self) -> list:
        if self.labels is None:
            raise ValueError("dataset has no class labels")
        return sorted(set(self.labels.tolist()))


@dataclass(frozen=True, eq=False)
class PvalueMatrix:
    classes: tuple
    P: np.ndarray


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def read_csv_matrix(path, has_header: bool = False, label_column: Optional[str] = None,
                    score_column: Optional[str] = None) -> LabeledDataset:
    """Read a numeric CSV (rows are observations).

    Label and score columns are addressed by header name, or by 0-based index
    when the file has no header. Row numbers in error messages are 1-based
    file lines; column numbers are 1-based.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DataFormatError(f"{path}: file is empty")
    header = None
    first_line = 1
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_line = 2
        if not rows:
            raise DataFormatError(f"{path}: header but no data rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataFormatError(
                f"{path}: row {i + first_line} has {len(r)} fields, expected {width}")

    def locate(name):
        if name is None:
            return None
        if header is not None:
            if name not in header:
                raise DataFormatError(f"{path}: column {name!r} not in header {header}")
            return header.index(name)
        try:
            j = int(name)
        except ValueError:
            raise DataFormatError(f"{path}: column {name!r} given by name but the file has no header") from None
        if not 0 <= j < width:
            raise DataFormatError(f"{path}: column index {j} out of range")
        return j

    lab_j = locate(label_column)
    score_j = locate(score_column)
    if lab_j is not None and lab_j == score_j:
        raise DataFormatError("label and score columns must differ")
    numeric = [j for j in range(width) if j not in (lab_j, score_j)]
    if not numeric:
        raise DataFormatError(f"{path}: no numeric feature columns")

    X = np.empty((len(rows), len(numeric)))
    scores = np.empty(len(rows)) if score_j is not None else None
    for i, r in enumerate(rows):
        for k, j in enumerate(numeric + ([score_j] if score_j is not None else [])):
            cell = r[j].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: non-numeric value {cell!r} at row {i + first_line}, column {j + 1}") from None
            if not math.isfinite(v):
                raise DataFormatError(
                    f"{path}: non-finite value {cell!r} at row {i + first_line}, column {j + 1}")
            if j == score_j:
                scores[i] = v
            else:
                X[i, k] = v
    labels = np.array([r[lab_j].strip() for r in rows], dtype=object) if lab_j is not None else None
    cols = tuple(header[j] for j in numeric) if header else ()
    return LabeledDataset(X, labels, scores, cols)


def quantile_split(ds: LabeledDataset, k: float):
    """Top-k% versus bottom-k% of the score, middle rows dropped.

    With m = ceil(k n / 100), the upper cut is the m-th largest score and the
    lower cut the m-th smallest; rows tied with a cut stay in the tail, so a
    tail may hold more than m rows. Returns (X, GroupLabels) with group 1 the
    upper tail, rows kept in their original order.
    """
    if ds.scores is None:
        raise ValueError("dataset has no score column")
    if not 0.0 < k < 50.0:
        raise ValueError(f"k must lie in (0, 50), got {k}")
    s = np.asarray(ds.scores, dtype=np.float64)
    n = s.size
    m = math.ceil(k * n / 100.0)
    order = np.sort(s)
    lower_cut = order[m - 1]
    upper_cut = order[n - m]
    if lower_cut >= upper_cut:
        raise ValueError("score tails overlap; the data cannot be split at this quantile")
    top = s >= upper_cut
    bottom = s <= lower_cut
    if top.sum() < 2 or bottom.sum() < 2:
        raise ValueError(f"each tail needs at least 2 rows, got {top.sum()} and {bottom.sum()}")
    keep = top | bottom
    assignment = np.where(top[keep], 1, 2)
    return ds.X[keep], GroupLabels(assignment)


def pair_seed(master_seed: int, a: str, b: str) -> int:
    """Seed for the (a, b) comparison; independent of row and argument order."""
    lo, hi = sorted((str(a), str(b)))
    digest = hashlib.sha256(f"{master_seed}\x00{lo}\x00{hi}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _canonical_rows(X: np.ndarray) -> np.ndarray:
    return X[np.lexsort(X.T[::-1])]


def pairwise_compare(ds: LabeledDataset, scaling: ScalingSpec = ScalingSpec(),
                     kernel: KernelSpec = KernelSpec(), B: int = 1000, alpha: float = 0.05,
                     seed: int = 0) -> PvalueMatrix:
    """Two-sample tests between every pair of classes.

    Rows inside each class are put in a canonical order first, so the result
    does not depend on the order of rows in the input.
    """
    classes = ds.classes()
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes, found {len(classes)}")
    blocks = {}
    for c in classes:
        rows = ds.X[ds.labels == c]
        if rows.shape[0] < 2:
            raise ValueError(f"class {c!r} has {rows.shape[0]} rows; at least 2 are required")
        blocks[c] = _canonical_rows(rows)
    P = np.ones((len(classes), len(classes)))
    for i, a in enumerate(classes):
        for j in range(i + 1, len(classes)):
            b = classes[j]
            X = np.vstack([blocks[a], blocks[b]])
            labels = GroupLabels.from_sizes(blocks[a].shape[0], blocks[b].shape[0])
            res = two_sample_test(X, labels, scaling, kernel, B, alpha, pair_seed(seed, a, b))
            P[i, j] = P[j, i] = res.p_value
    return PvalueMatrix(tuple(classes), P)


POWER_COLUMNS = ["test", "delta", "rejections", "replications", "power", "se"]
ORACLE_COLUMNS = ["on_rejections", "on_power", "on_se"]


def power_table_rows(table: PowerTable) -> list:
    with_oracle = any(r.on_rejections is not None for r in table.rows)
    out = [POWER_COLUMNS + (ORACLE_COLUMNS if with_oracle else [])]
    for r in table.rows:
        row = [r.test, fmt(r.delta), fmt(r.rejections), fmt(r.replications), fmt(r.power), fmt(r.se)]
        if with_oracle:
            row += [fmt(r.on_rejections), fmt(r.on_power), fmt(r.on_se)]
        out.append(row)
    return out


def pvalue_matrix_rows(pm: PvalueMatrix) -> list:
    out = [["class", *pm.classes]]
    for c, row in zip(pm.classes, pm.P):
        out.append([c, *(fmt(v) for v in row)])
    return out


def oracle_rows(labels: Sequence[str], nulls) -> list:
    out = [list(labels)]
    for vals in zip(*(nl.statistics for nl in nulls)):
        out.append([fmt(v) for v in vals])
    return out


def render(obj, fmt_name: str = "csv") -> str:
    """Serialize a TestResult, PowerTable or PvalueMatrix to text."""
    fmt_name = fmt_name.lower()
    if fmt_name not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt_name!r}")
    if isinstance(obj, TestResult):
        d = obj.to_dict()
        if fmt_name == "json":
            return json.dumps(d, indent=2) + "\n"
        rows = [list(d), [fmt(v) if not isinstance(v, str) and v is not None else str(v) for v in d.values()]]
    elif isinstance(obj, PowerTable):
        rows = power_table_rows(obj)
        if fmt_name == "json":
            head, *body = rows
            return json.dumps([dict(zip(head, _json_values(r))) for r in body], indent=2) + "\n"
    elif isinstance(obj, PvalueMatrix):
        if fmt_name == "json":
            return json.dumps({"classes": list(obj.classes), "p_values": obj.P.tolist()}, indent=2) + "\n"
        rows = pvalue_matrix_rows(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return _csv_text(rows)


def _json_values(row):
    out = []
    for v in row:
        try:
            out.append(int(v))
        except ValueError:
            try:
                out.append(float(v))
            except ValueError:
                out.append(v)
    return out


def _csv_text(rows) -> str:
    import io as _io
    buf = _io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def write_results(obj, path, fmt_name: Optional[str] = None) -> None:
    """Write a result object; the format defaults to the file extension."""
    if fmt_name is None:
        fmt_name = "json" if str(path).lower().endswith(".json") else "csv"
    text = render(obj, fmt_name)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def read_power_table(path) -> PowerTable:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(POWER_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DataFormatError(f"{path}: missing power table columns {sorted(missing)}")
        table = PowerTable()
        for r in reader:
            on = r.get("on_rejections")
            table.rows.append(PowerRow(r["test"], float(r["delta"]), int(r["rejections"]),
                                       int(r["replications"]), int(on) if on not in (None, "") else None))
    return table


def read_matrix(path) -> np.ndarray:
    """Plain numeric CSV without header, validated as an observation matrix."""
    return as_data_matrix(read_csv_matrix(path).X)

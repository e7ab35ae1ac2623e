"""Shared data model: feature matrices, partitions, dataset manifests and the
FVEC/CSV interchange formats.

Feature matrices are plain float64 ndarrays of shape (n, d), one row per view.
Partitions are 1-D integer label arrays; the canonical form relabels clusters
by order of first appearance so that arbitrary labelings compare equal.
Everything returned by the loaders is immutable after construction and safe to
share read-only across threads; loading itself is single-threaded.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

FVEC_MAGIC = b"FVEC"
FVEC_VERSION = 1
_FVEC_HEADER_LEN = 13  # magic(4) + version(1) + u32 n + u32 d


class FeatureIOError(Exception):
    """A feature file could not be read or written."""


class MalformedHeaderError(FeatureIOError):
    """Missing or corrupt magic, version or header fields."""


class DimensionMismatchError(FeatureIOError):
    """Declared (n, d) disagrees with the payload."""


class NonFiniteValueError(FeatureIOError):
    """Feature payload contains NaN or infinity."""


class ManifestError(Exception):
    """Dataset manifest violates the schema or references dangling data."""


class MissingConditionError(ManifestError):
    """An object has no view under the requested condition."""


# ---------------------------------------------------------------------------
# partitions


def canonicalize(labels: Sequence[Hashable]) -> np.ndarray:
    """Relabel clusters by order of first appearance (labels become 0..k-1).

    Accepts any hashable labels (ints, strings); cluster identity is
    arbitrary, so all equality checks should go through this form.
    """
    codes: dict[Hashable, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, v in enumerate(labels):
        if isinstance(v, np.generic):
            v = v.item()
        out[i] = codes.setdefault(v, len(codes))
    if out.size == 0:
        raise ValueError("cannot canonicalize an empty label sequence")
    return out


def validate_features(m, *, err: type[Exception] = ValueError) -> np.ndarray:
    """Return m as a float64 (n, d) array with n, d >= 1 and all values finite."""
    x = np.asarray(m, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise err(f"feature matrix must be 2-D with n, d >= 1, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise err("feature matrix contains non-finite values")
    return x


def l2_normalize(m: np.ndarray) -> np.ndarray:
    """Per-row L2 normalization; zero rows are left unchanged."""
    x = np.asarray(m, dtype=np.float64)
    norms = np.sqrt((x * x).sum(axis=1, keepdims=True))
    return x / np.where(norms == 0.0, 1.0, norms)


# ---------------------------------------------------------------------------
# feature file formats


def save_features(m, path, format: str = "fvec") -> None:
    """Write a feature matrix as FVEC (little-endian float32) or CSV.

    FVEC layout: b"FVEC" + version 0x01 + u32 n + u32 d + n*d float32, row-major.
    CSV layout: "# n=<n> d=<d>" header then one comma-separated row per line.
    """
    x = validate_features(m)
    n, d = x.shape
    path = Path(path)
    if format == "fvec":
        with open(path, "wb") as f:
            f.write(FVEC_MAGIC)
            f.write(bytes([FVEC_VERSION]))
            f.write(struct.pack("<II", n, d))
            f.write(np.ascontiguousarray(x, dtype="<f4").tobytes())
    elif format == "csv":
        lines = [f"# n={n} d={d}"]
        for row in x:
            lines.append(",".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown feature format {format!r}")


def load_features(path) -> np.ndarray:
    """Load a feature matrix, auto-detecting FVEC (by magic) vs CSV."""
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(4)
    if head == FVEC_MAGIC:
        return _load_fvec(path)
    return _load_csv(path)


def _load_fvec(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _FVEC_HEADER_LEN:
        raise MalformedHeaderError(f"{path}: truncated FVEC header")
    if raw[:4] != FVEC_MAGIC or raw[4] != FVEC_VERSION:
        raise MalformedHeaderError(f"{path}: bad FVEC magic or version")
    n, d = struct.unpack_from("<II", raw, 5)
    if n < 1 or d < 1:
        raise MalformedHeaderError(f"{path}: FVEC header declares n={n}, d={d}")
    payload = raw[_FVEC_HEADER_LEN:]
    if len(payload) != 4 * n * d:
        raise DimensionMismatchError(
            f"{path}: header declares {n}x{d} floats ({4 * n * d} bytes), "
            f"payload has {len(payload)} bytes"
        )
    x = np.frombuffer(payload, dtype="<f4").reshape(n, d).astype(np.float64)
    if not np.isfinite(x).all():
        raise NonFiniteValueError(f"{path}: payload contains non-finite values")
    return x


def _parse_csv_header(line: str, path: Path) -> tuple[int, int]:
    fields = dict(
        part.split("=", 1) for part in line[1:].split() if "=" in part
    )
    try:
        n, d = int(fields["n"]), int(fields["d"])
    except (KeyError, ValueError) as e:
        raise MalformedHeaderError(f"{path}: bad CSV header {line!r}") from e
    if n < 1 or d < 1:
        raise MalformedHeaderError(f"{path}: CSV header declares n={n}, d={d}")
    return n, d


def _load_csv(path: Path) -> np.ndarray:
    try:
        text = path.read_text()
    except UnicodeDecodeError as e:
        raise MalformedHeaderError(f"{path}: neither FVEC nor text") from e
    declared = None
    rows: list[list[float]] = []
    width = None
    for ln, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if declared is None and not rows:
                declared = _parse_csv_header(s, path)
                continue
            raise MalformedHeaderError(f"{path}:{ln}: unexpected comment line")
        try:
            row = [float(v) for v in s.split(",")]
        except ValueError as e:
            raise FeatureIOError(f"{path}:{ln}: unparseable value") from e
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DimensionMismatchError(
                f"{path}:{ln}: row has {len(row)} values, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise MalformedHeaderError(f"{path}: no data rows")
    x = np.array(rows, dtype=np.float64)
    if declared is not None and (x.shape[0] != declared[0] or x.shape[1] != declared[1]):
        raise DimensionMismatchError(
            f"{path}: header declares {declared[0]}x{declared[1]}, "
            f"payload is {x.shape[0]}x{x.shape[1]}"
        )
    if not np.isfinite(x).all():
        raise NonFiniteValueError(f"{path}: payload contains non-finite values")
    return x


# ---------------------------------------------------------------------------
# dataset manifests


@dataclass(frozen=True)
class ViewRef:
    """One image of an object: a row of a registered feature file."""

    file: str
    row: int
    condition: str
    pose: int


@dataclass(frozen=True)
class ObjectRecord:
    object_id: str
    class_label: str | None
    views: tuple[ViewRef, ...]

    def views_under(self, condition: str) -> tuple[ViewRef, ...]:
        return tuple(v for v in self.views if v.condition == condition)


@dataclass(frozen=True)
class MultiViewDataset:
    """Objects with their views, the declared condition tags and the loaded
    feature matrices keyed by file id. Treat as read-only after construction."""

    objects: tuple[ObjectRecord, ...]
    conditions: tuple[str, ...]
    features: dict[str, np.ndarray]

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def has_labels(self) -> bool:
        return self.objects[0].class_label is not None

    def class_partition(self) -> np.ndarray | None:
        """Ground-truth partition from class labels, canonical form; None if unlabeled."""
        if not self.has_labels:
            return None
        return canonicalize([o.class_label for o in self.objects])

    def n_classes(self) -> int:
        truth = self.class_partition()
        if truth is None:
            raise ValueError("dataset has no class labels")
        return int(truth.max()) + 1


def load_manifest(path) -> MultiViewDataset:
    """Load and validate a dataset manifest (JSON).

    Schema: {"conditions": [...], "feature_files": {id: path}, "objects":
    [{"id", "class"?, "views": [{"file", "row", "condition", "pose"}]}]}.
    Feature paths are resolved relative to the manifest's directory. Object
    order in the file defines row order everywhere downstream.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}: invalid JSON ({e})") from e
    for key in ("conditions", "feature_files", "objects"):
        if key not in doc:
            raise ManifestError(f"{path}: missing top-level key {key!r}")

    conditions = tuple(str(c) for c in doc["conditions"])
    if len(set(conditions)) != len(conditions):
        raise ManifestError(f"{path}: duplicate condition tags")

    features: dict[str, np.ndarray] = {}
    for fid, rel in doc["feature_files"].items():
        fpath = Path(rel)
        if not fpath.is_absolute():
            fpath = path.parent / fpath
        try:
            x = load_features(fpath)
        except FileNotFoundError as e:
            raise ManifestError(f"{path}: feature file {fid!r} not found at {fpath}") from e
        x.setflags(write=False)
        features[str(fid)] = x
    dims = {x.shape[1] for x in features.values()}
    if len(dims) > 1:
        raise ManifestError(f"{path}: feature files disagree on dimensionality {sorted(dims)}")

    objects: list[ObjectRecord] = []
    seen_ids: set[str] = set()
    for obj in doc["objects"]:
        oid = str(obj.get("id"))
        if oid in seen_ids:
            raise ManifestError(f"{path}: duplicate object id {oid!r}")
        seen_ids.add(oid)
        raw_views = obj.get("views") or []
        if not raw_views:
            raise ManifestError(f"{path}: object {oid!r} has no views")
        views = []
        for v in raw_views:
            fid, row = str(v.get("file")), int(v.get("row", -1))
            cond = str(v.get("condition"))
            if fid not in features:
                raise ManifestError(f"{path}: object {oid!r} references unknown file {fid!r}")
            if not 0 <= row < features[fid].shape[0]:
                raise ManifestError(
                    f"{path}: object {oid!r} references row {row} of {fid!r} "
                    f"({features[fid].shape[0]} rows)"
                )
            if cond not in conditions:
                raise ManifestError(
                    f"{path}: object {oid!r} uses undeclared condition {cond!r}"
                )
            views.append(ViewRef(fid, row, cond, int(v.get("pose", 0))))
        label = obj.get("class")
        objects.append(ObjectRecord(oid, None if label is None else str(label), tuple(views)))

    if not objects:
        raise ManifestError(f"{path}: manifest declares no objects")
    labeled = [o.class_label is not None for o in objects]
    if any(labeled) and not all(labeled):
        raise ManifestError(f"{path}: class labels must be present for all objects or none")
    return MultiViewDataset(tuple(objects), conditions, features)


def restrict_to_condition(ds: MultiViewDataset, condition: str) -> MultiViewDataset:
    """Dataset with each object's view list filtered to one condition."""
    if condition not in ds.conditions:
        raise MissingConditionError(f"condition {condition!r} not declared in manifest")
    objects = []
    for o in ds.objects:
        views = o.views_under(condition)
        if not views:
            raise MissingConditionError(
                f"object {o.object_id!r} has no view under condition {condition!r}"
            )
        objects.append(ObjectRecord(o.object_id, o.class_label, views))
    return MultiViewDataset(tuple(objects), ds.conditions, ds.features)


def assemble_views(
    ds: MultiViewDataset, view_indices
) -> tuple[np.ndarray, np.ndarray | None]:
    """Stack one feature row per object (manifest order) given per-object view
    indices; returns the matrix and the ground-truth partition (None if unlabeled)."""
    n = ds.n_objects
    idx = np.broadcast_to(np.asarray(view_indices, dtype=np.int64), (n,))
    rows = []
    for o, i in zip(ds.objects, idx):
        if not 0 <= i < len(o.views):
            raise ValueError(
                f"view index {i} out of range for object {o.object_id!r} "
                f"({len(o.views)} views)"
            )
        v = o.views[i]
        rows.append(ds.features[v.file][v.row])
    return np.stack(rows), ds.class_partition()


def select_views(
    ds: MultiViewDataset, condition: str, pose_choice
) -> tuple[np.ndarray, np.ndarray | None]:
    """One row per object under `condition`, poses chosen by per-object index
    into that object's views under the condition (int broadcasts to all)."""
    return assemble_views(restrict_to_condition(ds, condition), pose_choice)

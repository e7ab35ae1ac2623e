import json

import numpy as np
import pytest

from mvclust import save_features


def build_manifest(
    root,
    n_classes=3,
    objects_per_class=4,
    views_per_object=4,
    d=8,
    noise=0.05,
    conditions=("c1",),
    separation=10.0,
    labeled=True,
    seed=0,
):
    """Synthetic labeled dataset: class centroids separated one-hot style,
    views are noisy copies. Returns the manifest path."""
    rng = np.random.default_rng(seed)
    centroids = np.zeros((n_classes, d))
    for c in range(n_classes):
        centroids[c, c % d] = separation
    rows = []
    objects = []
    for o in range(n_classes * objects_per_class):
        cls = o % n_classes
        views = []
        for cond in conditions:
            for pose in range(views_per_object):
                rows.append(centroids[cls] + noise * rng.standard_normal(d))
                views.append(
                    {"file": "feats", "row": len(rows) - 1, "condition": cond, "pose": pose}
                )
        obj = {"id": f"obj{o:02d}", "views": views}
        if labeled:
            obj["class"] = f"class{cls}"
        objects.append(obj)
    save_features(np.array(rows), root / "feats.fvec", "fvec")
    manifest = {
        "conditions": list(conditions),
        "feature_files": {"feats": "feats.fvec"},
        "objects": objects,
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1))
    return path


@pytest.fixture
def small_manifest(tmp_path):
    return build_manifest(tmp_path)


@pytest.fixture
def single_view_manifest(tmp_path):
    return build_manifest(tmp_path, views_per_object=1)

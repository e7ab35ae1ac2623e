import json

import numpy as np
import pytest

from mvclust import (
    DimensionMismatchError,
    FeatureIOError,
    MalformedHeaderError,
    ManifestError,
    MissingConditionError,
    NonFiniteValueError,
    canonicalize,
    l2_normalize,
    load_features,
    load_manifest,
    restrict_to_condition,
    save_features,
    select_views,
)

from conftest import build_manifest


class TestCanonicalize:
    def test_first_appearance_order(self):
        assert canonicalize([1, 1, 0, 2]).tolist() == [0, 0, 1, 2]
        assert canonicalize([5, 3, 5, 9, 3]).tolist() == [0, 1, 0, 2, 1]

    def test_strings(self):
        assert canonicalize(["b", "a", "b", "c"]).tolist() == [0, 1, 0, 2]

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            labels = rng.integers(0, 5, size=int(rng.integers(1, 30)))
            once = canonicalize(labels)
            assert np.array_equal(once, canonicalize(once))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            canonicalize([])


class TestFvecFormat:
    def test_round_trip_is_bit_exact(self, tmp_path):
        # format stores float32, so draw float32-representable values
        rng = np.random.default_rng(1)
        for trial in range(20):
            n = int(rng.integers(1, 40))
            d = int(rng.integers(1, 20))
            m = rng.standard_normal((n, d)).astype(np.float32).astype(np.float64)
            path = tmp_path / f"t{trial}.fvec"
            save_features(m, path, "fvec")
            assert np.array_equal(load_features(path), m)

    def test_large_dim_header(self, tmp_path):
        m = np.random.default_rng(2).standard_normal((4, 2048)).astype(np.float32)
        path = tmp_path / "wide.fvec"
        save_features(m.astype(np.float64), path, "fvec")
        back = load_features(path)
        assert back.shape == (4, 2048)
        assert np.array_equal(back, m.astype(np.float64))

    def test_bad_magic_binary(self, tmp_path):
        # wrong magic and not decodable as text either
        path = tmp_path / "bad.fvec"
        path.write_bytes(b"NOPE\x01\xff\xfe" + b"\x00" * 16)
        with pytest.raises(MalformedHeaderError):
            load_features(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "bad.fvec"
        path.write_bytes(b"FVEC\x02" + b"\x00" * 16)
        with pytest.raises(MalformedHeaderError):
            load_features(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.fvec"
        save_features(np.ones((3, 2)), path, "fvec")
        raw = path.read_bytes()
        path.write_bytes(raw[:-4])  # drop one float
        with pytest.raises(DimensionMismatchError):
            load_features(path)

    def test_non_finite_payload(self, tmp_path):
        path = tmp_path / "inf.fvec"
        save_features(np.ones((2, 2)), path, "fvec")
        raw = bytearray(path.read_bytes())
        raw[13:17] = np.array([np.inf], dtype="<f4").tobytes()
        path.write_bytes(bytes(raw))
        with pytest.raises(NonFiniteValueError):
            load_features(path)

    def test_save_rejects_non_finite(self, tmp_path):
        with pytest.raises(ValueError):
            save_features(np.array([[np.nan]]), tmp_path / "x.fvec")

    def test_save_to_missing_directory(self, tmp_path):
        with pytest.raises(OSError):
            save_features(np.ones((1, 1)), tmp_path / "nope" / "x.fvec")


class TestCsvFormat:
    def test_headerless_identity_rows(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1,0,0\n0,1,0\n")
        m = load_features(path)
        assert m.shape == (2, 3)
        assert m.tolist() == [[1, 0, 0], [0, 1, 0]]

    def test_integer_round_trip_exact(self, tmp_path):
        m = np.array([[1.0, -3.0], [7.0, 0.0]])
        path = tmp_path / "ints.csv"
        save_features(m, path, "csv")
        assert np.array_equal(load_features(path), m)

    def test_random_round_trip_within_tolerance(self, tmp_path):
        rng = np.random.default_rng(5)
        m = rng.standard_normal((6, 4))
        path = tmp_path / "rand.csv"
        save_features(m, path, "csv")
        assert np.abs(load_features(path) - m).max() <= 1e-6

    def test_header_payload_mismatch(self, tmp_path):
        path = tmp_path / "mismatch.csv"
        path.write_text("# n=2 d=3\n1,2,3,4\n5,6,7,8\n")
        with pytest.raises(DimensionMismatchError):
            load_features(path)

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(DimensionMismatchError):
            load_features(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# rows=2 cols=2\n1,2\n3,4\n")
        with pytest.raises(MalformedHeaderError):
            load_features(path)

    def test_non_finite_value(self, tmp_path):
        path = tmp_path / "nan.csv"
        path.write_text("1,nan\n2,3\n")
        with pytest.raises(NonFiniteValueError):
            load_features(path)

    def test_unparseable_value(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("1,two\n")
        with pytest.raises(FeatureIOError):
            load_features(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_features(tmp_path / "absent.csv")


class TestManifest:
    def test_tool_dataset_shape(self, tmp_path):
        # 28 objects x 5 conditions x 4 poses = 560 views, 7 classes
        path = build_manifest(
            tmp_path,
            n_classes=7,
            objects_per_class=4,
            views_per_object=4,
            conditions=("blc1", "blc2", "blc3", "blc4", "blc5"),
        )
        ds = load_manifest(path)
        assert ds.n_objects == 28
        assert sum(len(o.views) for o in ds.objects) == 560
        assert ds.n_classes() == 7

    def test_single_object_single_view(self, tmp_path):
        path = build_manifest(tmp_path, n_classes=1, objects_per_class=1, views_per_object=1)
        ds = load_manifest(path)
        assert ds.n_objects == 1

    def test_dangling_row_reference(self, tmp_path):
        path = build_manifest(tmp_path)
        doc = json.loads(path.read_text())
        doc["objects"][0]["views"][0]["row"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_dangling_file_reference(self, tmp_path):
        path = build_manifest(tmp_path)
        doc = json.loads(path.read_text())
        doc["objects"][0]["views"][0]["file"] = "ghost"
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_duplicate_object_id(self, tmp_path):
        path = build_manifest(tmp_path)
        doc = json.loads(path.read_text())
        doc["objects"][1]["id"] = doc["objects"][0]["id"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_mixed_label_presence(self, tmp_path):
        path = build_manifest(tmp_path)
        doc = json.loads(path.read_text())
        del doc["objects"][0]["class"]
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_undeclared_condition(self, tmp_path):
        path = build_manifest(tmp_path)
        doc = json.loads(path.read_text())
        doc["objects"][0]["views"][0]["condition"] = "mystery"
        path.write_text(json.dumps(doc))
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_order_preserved(self, tmp_path):
        path = build_manifest(tmp_path)
        ds = load_manifest(path)
        assert [o.object_id for o in ds.objects] == [f"obj{i:02d}" for i in range(12)]


class TestSelectViews:
    def test_tool_dataset_selection(self, tmp_path):
        path = build_manifest(
            tmp_path,
            n_classes=7,
            objects_per_class=4,
            views_per_object=4,
            conditions=("blc1", "blc2", "blc3", "blc4", "blc5"),
        )
        ds = load_manifest(path)
        x, truth = select_views(ds, "blc2", 0)
        assert x.shape == (28, 8)
        assert int(truth.max()) + 1 == 7

    def test_single_object(self, tmp_path):
        path = build_manifest(tmp_path, n_classes=1, objects_per_class=1, views_per_object=2)
        ds = load_manifest(path)
        x, _ = select_views(ds, "c1", 0)
        assert x.shape == (1, 8)

    def test_missing_condition(self, small_manifest):
        ds = load_manifest(small_manifest)
        with pytest.raises(MissingConditionError):
            select_views(ds, "c9", 0)

    def test_deterministic_and_row_order(self, small_manifest):
        ds = load_manifest(small_manifest)
        a, _ = select_views(ds, "c1", 0)
        b, _ = select_views(ds, "c1", 0)
        assert np.array_equal(a, b)
        # row i must be exactly the referenced feature row of object i
        for i, o in enumerate(ds.objects):
            v = o.views_under("c1")[0]
            assert np.array_equal(a[i], ds.features[v.file][v.row])

    def test_pose_choice_out_of_range(self, small_manifest):
        ds = load_manifest(small_manifest)
        with pytest.raises(ValueError):
            select_views(ds, "c1", 17)

    def test_restrict_keeps_labels(self, small_manifest):
        ds = load_manifest(small_manifest)
        rds = restrict_to_condition(ds, "c1")
        assert np.array_equal(rds.class_partition(), ds.class_partition())


def test_l2_normalize():
    x = np.array([[3.0, 4.0], [0.0, 0.0]])
    out = l2_normalize(x)
    assert np.allclose(out[0], [0.6, 0.8])
    assert np.array_equal(out[1], [0.0, 0.0])

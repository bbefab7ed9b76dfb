import json

import numpy as np
import pytest

from voiplace.volume import (
    EmptyMaskError,
    HeaderError,
    LabelVolume,
    PayloadMismatchError,
    VolumeHeader,
    as_label_volume,
    binarize,
    centroid,
    load_volume,
    read_header,
    save_volume,
    total_tumor,
)


def write_header(path, dims, payload_name, **overrides):
    header = {
        "dims": list(dims),
        "spacing_mm": [1.0, 1.0, 1.0],
        "dtype": "u8",
        "order": "x-fastest",
        "payload": payload_name,
    }
    header.update(overrides)
    path.write_text(json.dumps(header))


def random_volume(rng, dims, spacing=(1.0, 1.0, 1.0), density=0.3):
    nx, ny, nz = dims
    data = (rng.random((nz, ny, nx)) < density).astype(np.uint8)
    return LabelVolume(dims=dims, spacing_mm=spacing, data=data)


class TestLoadSave:
    def test_load_all_ones(self, tmp_path):
        (tmp_path / "v.raw").write_bytes(b"\x01" * 8)
        write_header(tmp_path / "v.json", (2, 2, 2), "v.raw")
        v = load_volume(tmp_path / "v.json")
        assert v.dims == (2, 2, 2)
        assert (v.data == 1).all()

    def test_payload_size_mismatch(self, tmp_path):
        (tmp_path / "v.raw").write_bytes(b"\x01" * 7)
        write_header(tmp_path / "v.json", (2, 2, 2), "v.raw")
        with pytest.raises(PayloadMismatchError):
            load_volume(tmp_path / "v.json")

    def test_missing_header(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_volume(tmp_path / "nope.json")

    def test_missing_payload(self, tmp_path):
        write_header(tmp_path / "v.json", (2, 2, 2), "nope.raw")
        with pytest.raises(FileNotFoundError):
            load_volume(tmp_path / "v.json")

    def test_malformed_header(self, tmp_path):
        (tmp_path / "v.json").write_text("{not json")
        with pytest.raises(HeaderError):
            load_volume(tmp_path / "v.json")

    def test_missing_field(self, tmp_path):
        (tmp_path / "v.raw").write_bytes(b"\x01" * 8)
        write_header(tmp_path / "v.json", (2, 2, 2), "v.raw")
        header = json.loads((tmp_path / "v.json").read_text())
        del header["spacing_mm"]
        (tmp_path / "v.json").write_text(json.dumps(header))
        with pytest.raises(HeaderError):
            load_volume(tmp_path / "v.json")

    def test_wrong_dtype_tag(self, tmp_path):
        (tmp_path / "v.raw").write_bytes(b"\x01" * 8)
        write_header(tmp_path / "v.json", (2, 2, 2), "v.raw", dtype="u16")
        with pytest.raises(HeaderError):
            load_volume(tmp_path / "v.json")

    def test_wrong_order_tag(self, tmp_path):
        (tmp_path / "v.raw").write_bytes(b"\x01" * 8)
        write_header(tmp_path / "v.json", (2, 2, 2), "v.raw", order="z-fastest")
        with pytest.raises(HeaderError):
            load_volume(tmp_path / "v.json")

    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(7)
        v = random_volume(rng, (16, 16, 16), spacing=(0.5, 1.0, 2.0))
        save_volume(v, tmp_path / "rt.json")
        w = load_volume(tmp_path / "rt.json")
        assert w == v
        assert w.data.tobytes() == v.data.tobytes()

    def test_single_voxel_payload(self, tmp_path):
        v = LabelVolume(dims=(1, 1, 1), spacing_mm=(1, 1, 1), data=np.array([1], np.uint8))
        save_volume(v, tmp_path / "one.json")
        assert (tmp_path / "one.raw").read_bytes() == b"\x01"

    def test_payload_byte_count(self, tmp_path):
        rng = np.random.default_rng(3)
        v = random_volume(rng, (32, 32, 32))
        save_volume(v, tmp_path / "v32.json")
        assert len((tmp_path / "v32.raw").read_bytes()) == 32768

    def test_payload_is_x_fastest(self, tmp_path):
        # voxel value encodes its coordinate so flat order is checkable
        nx, ny, nz = 4, 3, 2
        data = np.zeros((nz, ny, nx), np.uint8)
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    data[z, y, x] = x + nx * (y + ny * z)
        v = LabelVolume(dims=(nx, ny, nz), spacing_mm=(1, 1, 1), data=data)
        save_volume(v, tmp_path / "ord.json")
        raw = (tmp_path / "ord.raw").read_bytes()
        assert list(raw) == list(range(nx * ny * nz))


class TestVolumeHeader:
    def test_read_header_round_trip(self, tmp_path):
        write_header(tmp_path / "h.json", (3, 4, 5), "h.raw")
        h = read_header(tmp_path / "h.json")
        assert h == VolumeHeader(dims=(3, 4, 5), spacing_mm=(1.0, 1.0, 1.0),
                                 dtype="u8", order="x-fastest", payload="h.raw")

    def test_header_invariants(self):
        with pytest.raises(HeaderError):
            VolumeHeader(dims=(2, 2, 2), spacing_mm=(1, 1, 1), dtype="f32",
                         order="x-fastest", payload="p")
        with pytest.raises(HeaderError):
            VolumeHeader(dims=(2, 2, 2), spacing_mm=(1, 1, 1), dtype="u8",
                         order="y-fastest", payload="p")
        with pytest.raises(HeaderError):
            VolumeHeader(dims=(2, 0, 2), spacing_mm=(1, 1, 1), dtype="u8",
                         order="x-fastest", payload="p")


class TestVolumeInvariants:
    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            LabelVolume(dims=(0, 2, 2), spacing_mm=(1, 1, 1), data=np.zeros(0, np.uint8))

    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError):
            LabelVolume(dims=(2, 2, 2), spacing_mm=(1, -1, 1), data=np.zeros(8, np.uint8))

    def test_rejects_size_mismatch(self):
        with pytest.raises(ValueError):
            LabelVolume(dims=(2, 2, 2), spacing_mm=(1, 1, 1), data=np.zeros(9, np.uint8))

    def test_data_is_immutable(self):
        v = LabelVolume(dims=(2, 2, 2), spacing_mm=(1, 1, 1), data=np.zeros(8, np.uint8))
        with pytest.raises(ValueError):
            v.data[0, 0, 0] = 1

    def test_voxel_volume(self):
        v = LabelVolume(dims=(1, 1, 1), spacing_mm=(0.5, 2.0, 3.0), data=np.zeros(1, np.uint8))
        assert v.voxel_volume_mm3 == pytest.approx(3.0)


class TestBinarize:
    def test_brats_labels(self):
        v = LabelVolume(dims=(4, 1, 1), spacing_mm=(1, 1, 1), data=np.array([0, 1, 2, 4], np.uint8))
        b = binarize(v, {1, 2, 4})
        assert list(b.data.ravel()) == [0, 1, 1, 1]

    def test_all_zero(self):
        v = LabelVolume(dims=(4, 1, 1), spacing_mm=(1, 1, 1), data=np.zeros(4, np.uint8))
        assert total_tumor(binarize(v)) == 0

    def test_empty_label_set(self):
        v = LabelVolume(dims=(4, 1, 1), spacing_mm=(1, 1, 1), data=np.array([0, 1, 2, 4], np.uint8))
        assert total_tumor(binarize(v, set())) == 0

    def test_idempotent_on_binary(self):
        rng = np.random.default_rng(11)
        v = random_volume(rng, (8, 8, 8))
        assert binarize(v, {1}) == binarize(binarize(v, {1}), {1})

    def test_preserves_dims_and_spacing(self):
        v = LabelVolume(dims=(2, 3, 4), spacing_mm=(0.5, 1.0, 1.5), data=np.zeros(24, np.uint8))
        b = binarize(v)
        assert b.dims == v.dims and b.spacing_mm == v.spacing_mm


class TestCentroid:
    def test_single_voxel(self):
        data = np.zeros((8, 8, 8), np.uint8)
        data[5, 4, 3] = 1  # (x, y, z) = (3, 4, 5)
        v = LabelVolume(dims=(8, 8, 8), spacing_mm=(1, 1, 1), data=data)
        assert centroid(v) == (3.0, 4.0, 5.0)

    def test_two_voxels_symmetric(self):
        data = np.zeros((4, 4, 4), np.uint8)
        data[0, 0, 0] = 1
        data[0, 0, 2] = 1
        v = LabelVolume(dims=(4, 4, 4), spacing_mm=(1, 1, 1), data=data)
        assert centroid(v) == (1.0, 0.0, 0.0)

    def test_empty_mask(self):
        v = LabelVolume(dims=(4, 4, 4), spacing_mm=(1, 1, 1), data=np.zeros(64, np.uint8))
        with pytest.raises(EmptyMaskError):
            centroid(v)

    def test_point_symmetric_mask(self):
        # ball of radius 2 centered at (4,4,4) is symmetric about its center
        data = np.zeros((9, 9, 9), np.uint8)
        for z in range(9):
            for y in range(9):
                for x in range(9):
                    if (x - 4) ** 2 + (y - 4) ** 2 + (z - 4) ** 2 <= 4:
                        data[z, y, x] = 1
        v = LabelVolume(dims=(9, 9, 9), spacing_mm=(1, 1, 1), data=data)
        assert centroid(v) == (4.0, 4.0, 4.0)


class TestTotalTumor:
    def test_all_ones(self):
        v = LabelVolume(dims=(4, 4, 4), spacing_mm=(1, 1, 1), data=np.ones(64, np.uint8))
        assert total_tumor(v) == 64

    def test_all_zeros(self):
        v = LabelVolume(dims=(4, 4, 4), spacing_mm=(1, 1, 1), data=np.zeros(64, np.uint8))
        assert total_tumor(v) == 0

    def test_matches_naive_loop(self):
        rng = np.random.default_rng(23)
        v = random_volume(rng, (16, 16, 16))
        count = 0
        for z in range(16):
            for y in range(16):
                for x in range(16):
                    if v.data[z, y, x] == 1:
                        count += 1
        assert total_tumor(v) == count


class TestAsLabelVolume:
    def test_accepts_array(self):
        arr = np.zeros((2, 3, 4), np.uint8)
        arr[0, 0, 0] = 1
        v = as_label_volume(arr, spacing_mm=(2.0, 1.0, 0.5))
        assert v.dims == (4, 3, 2)
        assert v.spacing_mm == (2.0, 1.0, 0.5)

    def test_passthrough(self):
        v = LabelVolume(dims=(2, 2, 2), spacing_mm=(1, 1, 1), data=np.zeros(8, np.uint8))
        assert as_label_volume(v) is v

    def test_rejects_nonbinary(self):
        with pytest.raises(ValueError):
            as_label_volume(np.full((2, 2, 2), 3, np.uint8))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            as_label_volume(np.zeros((2, 2), np.uint8))

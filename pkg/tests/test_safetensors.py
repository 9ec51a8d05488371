import json
import struct

import numpy as np
import pytest

from stylokit import safetensors_io as stio
from stylokit.errors import CorruptHeader, Truncated, UnsupportedDtype


def minimal_fixture_bytes():
    """Hand-constructed file: one 2x2 F32 tensor named "t"."""
    header = b'{"t":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}}'
    payload = struct.pack("<4f", 1.0, 2.0, 3.0, 4.0)
    return struct.pack("<Q", len(header)) + header + payload


class TestRead:
    def test_minimal_fixture_parses_one_tensor(self):
        tf = stio.read_safetensors(minimal_fixture_bytes())
        assert list(tf.tensors) == ["t"]
        arr = tf.array("t")
        assert arr.shape == (2, 2)
        assert (arr == np.array([[1, 2], [3, 4]], dtype=np.float32)).all()

    def test_truncated(self):
        with pytest.raises(Truncated):
            stio.read_safetensors(b"\x00\x01\x02\x03")

    def test_header_length_exceeds_file(self):
        with pytest.raises(Truncated):
            stio.read_safetensors(struct.pack("<Q", 1000) + b"{}")

    def test_offsets_beyond_payload(self):
        header = b'{"t":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}}'
        blob = struct.pack("<Q", len(header)) + header + b"\x00" * 8
        with pytest.raises(CorruptHeader):
            stio.read_safetensors(blob)

    def test_overlapping_offsets(self):
        header = (b'{"a":{"dtype":"F32","shape":[1],"data_offsets":[0,4]},'
                  b'"b":{"dtype":"F32","shape":[1],"data_offsets":[2,6]}}')
        blob = struct.pack("<Q", len(header)) + header + b"\x00" * 6
        with pytest.raises(CorruptHeader):
            stio.read_safetensors(blob)

    def test_gap_in_offsets(self):
        header = (b'{"a":{"dtype":"F32","shape":[1],"data_offsets":[0,4]},'
                  b'"b":{"dtype":"F32","shape":[1],"data_offsets":[8,12]}}')
        blob = struct.pack("<Q", len(header)) + header + b"\x00" * 12
        with pytest.raises(CorruptHeader):
            stio.read_safetensors(blob)

    def test_unsupported_dtype(self):
        header = b'{"t":{"dtype":"I64","shape":[1],"data_offsets":[0,8]}}'
        blob = struct.pack("<Q", len(header)) + header + b"\x00" * 8
        with pytest.raises(UnsupportedDtype):
            stio.read_safetensors(blob)

    def test_padded_header_tolerated(self):
        # other writers pad headers with trailing spaces; reads must succeed
        header = b'{"t":{"dtype":"F32","shape":[2,2],"data_offsets":[0,16]}}   '
        blob = struct.pack("<Q", len(header)) + header + b"\x00" * 16
        tf = stio.read_safetensors(blob)
        assert list(tf.tensors) == ["t"]


class TestWrite:
    def test_minimal_fixture_byte_exact(self):
        tf = stio.read_safetensors(minimal_fixture_bytes())
        assert stio.write_safetensors(tf) == minimal_fixture_bytes()

    def test_insertion_order_irrelevant(self):
        a = stio.entry_from_array(np.ones((2, 3), dtype=np.float32))
        b = stio.entry_from_array(np.zeros(4, dtype=np.float32))
        one = stio.write_safetensors(stio.TensorFile(tensors={"a": a, "b": b}))
        two = stio.write_safetensors(stio.TensorFile(tensors={"b": b, "a": a}))
        assert one == two

    def test_metadata_sorted(self):
        a = stio.entry_from_array(np.zeros(1, dtype=np.float32))
        tf = stio.TensorFile(tensors={"a": a}, metadata={"z": "1", "b": "2"})
        blob = stio.write_safetensors(tf)
        header_len = struct.unpack("<Q", blob[:8])[0]
        header = blob[8 : 8 + header_len].decode()
        assert header.index('"b"') < header.index('"z"')
        assert json.loads(header)["__metadata__"] == {"z": "1", "b": "2"}


def fixtures():
    rng = np.random.default_rng(123)
    fx = []
    for i in range(4):
        tensors = {}
        for j in range(rng.integers(1, 4)):
            shape = tuple(int(d) for d in rng.integers(1, 5, size=2))
            tensors[f"layer{i}.t{j}"] = stio.entry_from_array(
                rng.normal(size=shape).astype(np.float32), "F32")
        fx.append(stio.TensorFile(tensors=tensors))
    for dtype in ("F16", "BF16"):
        tensors = {
            f"{dtype.lower()}.a": stio.entry_from_array(
                rng.normal(size=(3, 2)).astype(np.float32), dtype),
            f"{dtype.lower()}.b": stio.entry_from_array(
                rng.normal(size=(4,)).astype(np.float32), dtype),
        }
        fx.append(stio.TensorFile(tensors=tensors))
    fx.append(stio.TensorFile(tensors={"mixed.f32": stio.entry_from_array(
        rng.normal(size=(2, 2)).astype(np.float32), "F32"),
        "mixed.f16": stio.entry_from_array(rng.normal(size=(2,)).astype(np.float32), "F16")}))
    fx.append(stio.TensorFile(tensors={"one": stio.entry_from_array(
        np.zeros((5, 5), dtype=np.float32))}, metadata={"format": "pt"}))
    fx.append(stio.read_safetensors(minimal_fixture_bytes()))
    fx.append(stio.TensorFile(tensors={"empty.shape": stio.entry_from_array(
        np.float32(7.0).reshape(()), "F32")}))
    return fx


class TestRoundTrip:
    def test_structural_and_byte_identity_on_fixtures(self):
        all_fixtures = fixtures()
        assert len(all_fixtures) >= 10
        for tf in all_fixtures:
            blob = stio.write_safetensors(tf)
            back = stio.read_safetensors(blob)
            assert stio.structurally_equal(back, tf)
            assert stio.write_safetensors(back) == blob

    def test_f16_and_bf16_upcast_on_access(self):
        values = np.array([0.5, -1.25, 2.0], dtype=np.float32)
        for dtype in ("F16", "BF16"):
            tf = stio.TensorFile(tensors={"t": stio.entry_from_array(values, dtype)})
            blob = stio.write_safetensors(tf)
            arr = stio.read_safetensors(blob).array("t")
            assert arr.dtype == np.float32
            # exactly representable values survive the downcast
            assert (arr == values).all()

    def test_bf16_round_to_nearest_even(self):
        # 1 + 2^-8 rounds down to 1.0 in bf16 (7 mantissa bits, tie-to-even)
        arr = np.array([1.0 + 2.0 ** -8], dtype=np.float32)
        entry = stio.entry_from_array(arr, "BF16")
        tf = stio.TensorFile(tensors={"t": entry})
        back = stio.read_safetensors(stio.write_safetensors(tf)).array("t")
        assert back[0] == 1.0

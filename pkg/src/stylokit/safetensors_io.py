"""Bit-exact safetensors reading and canonical writing.

File layout: an 8-byte little-endian unsigned header length, a UTF-8 JSON
header mapping tensor names to {"dtype", "shape", "data_offsets"} (plus an
optional "__metadata__" string map), then the raw payload.

Canonical serialization: tensor names sorted bytewise, each entry emitted as
{"dtype":...,"shape":[...],"data_offsets":[start,end]} with no insignificant
whitespace and offsets assigned contiguously in sorted-name order, no
alignment padding. Reading tolerates padded headers from other writers;
write(read(write(x))) is byte-identical.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptHeader, Truncated, UnsupportedDtype

DTYPE_SIZES = {"F32": 4, "F16": 2, "BF16": 2}
_NUMPY_DTYPES = {"F32": np.float32, "F16": np.float16}


@dataclass(frozen=True)
class TensorEntry:
    dtype: str
    shape: tuple[int, ...]
    data: bytes  # raw little-endian payload slice

    def nbytes(self) -> int:
        n = DTYPE_SIZES[self.dtype]
        for dim in self.shape:
            n *= dim
        return n


@dataclass
class TensorFile:
    tensors: dict[str, TensorEntry]
    metadata: dict[str, str] | None = None

    def array(self, name: str) -> np.ndarray:
        """Tensor as float32 ndarray (F16/BF16 upcast on access)."""
        entry = self.tensors[name]
        if entry.dtype == "BF16":
            u16 = np.frombuffer(entry.data, dtype="<u2")
            arr = (u16.astype(np.uint32) << 16).view(np.float32)
        else:
            arr = np.frombuffer(entry.data, dtype=_NUMPY_DTYPES[entry.dtype]).astype(np.float32)
        return arr.reshape(self.tensors[name].shape)


def _f32_to_bf16_bytes(arr: np.ndarray) -> bytes:
    """Round-to-nearest-even truncation of float32 to bfloat16 bits."""
    bits = np.ascontiguousarray(arr, dtype=np.float32).view(np.uint32)
    rounding = ((bits >> 16) & 1) + np.uint32(0x7FFF)
    return ((bits + rounding) >> 16).astype("<u2").tobytes()


def entry_from_array(arr: np.ndarray, dtype: str = "F32") -> TensorEntry:
    if dtype == "F32":
        data = np.ascontiguousarray(arr, dtype=np.float32).astype("<f4").tobytes()
    elif dtype == "F16":
        data = np.ascontiguousarray(arr, dtype=np.float32).astype("<f2").tobytes()
    elif dtype == "BF16":
        data = _f32_to_bf16_bytes(arr)
    else:
        raise UnsupportedDtype(f"dtype {dtype!r} not supported")
    return TensorEntry(dtype=dtype, shape=tuple(arr.shape), data=data)


def read_safetensors(blob: bytes) -> TensorFile:
    """Parse a safetensors byte string, validating offsets and dtypes."""
    if len(blob) < 8:
        raise Truncated(f"file is {len(blob)} bytes, need at least 8")
    (header_len,) = struct.unpack("<Q", blob[:8])
    if 8 + header_len > len(blob):
        raise Truncated(f"header length {header_len} exceeds file size {len(blob)}")
    try:
        header = json.loads(blob[8 : 8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptHeader(f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise CorruptHeader("header must be a JSON object")

    payload = blob[8 + header_len :]
    metadata = None
    entries: list[tuple[str, str, tuple[int, ...], int, int]] = []
    for name, value in header.items():
        if name == "__metadata__":
            metadata = dict(value)
            continue
        try:
            dtype = value["dtype"]
            shape = tuple(int(d) for d in value["shape"])
            start, end = value["data_offsets"]
        except (TypeError, KeyError, ValueError) as exc:
            raise CorruptHeader(f"malformed entry for tensor {name!r}") from exc
        if dtype not in DTYPE_SIZES:
            raise UnsupportedDtype(f"tensor {name!r} has unsupported dtype {dtype!r}")
        entries.append((name, dtype, shape, int(start), int(end)))

    entries.sort(key=lambda e: e[3])
    cursor = 0
    tensors: dict[str, TensorEntry] = {}
    for name, dtype, shape, start, end in entries:
        if start != cursor:
            raise CorruptHeader(
                f"tensor {name!r} offsets [{start},{end}) leave a gap or overlap at {cursor}")
        expected = DTYPE_SIZES[dtype]
        for dim in shape:
            expected *= dim
        if end - start != expected:
            raise CorruptHeader(
                f"tensor {name!r} spans {end - start} bytes, shape needs {expected}")
        if end > len(payload):
            raise CorruptHeader(f"tensor {name!r} offsets exceed payload size {len(payload)}")
        tensors[name] = TensorEntry(dtype=dtype, shape=shape, data=payload[start:end])
        cursor = end
    if cursor != len(payload):
        raise CorruptHeader(f"payload has {len(payload) - cursor} trailing bytes")
    return TensorFile(tensors=tensors, metadata=metadata)


def write_safetensors(tf: TensorFile) -> bytes:
    """Serialize canonically (see module docstring)."""
    names = sorted(tf.tensors)
    parts = []
    if tf.metadata is not None:
        meta_items = ",".join(
            f"{json.dumps(k, ensure_ascii=False)}:{json.dumps(tf.metadata[k], ensure_ascii=False)}"
            for k in sorted(tf.metadata))
        parts.append(f'"__metadata__":{{{meta_items}}}')
    cursor = 0
    payload = bytearray()
    for name in names:
        entry = tf.tensors[name]
        if entry.dtype not in DTYPE_SIZES:
            raise UnsupportedDtype(f"tensor {name!r} has unsupported dtype {entry.dtype!r}")
        if len(entry.data) != entry.nbytes():
            raise CorruptHeader(
                f"tensor {name!r} holds {len(entry.data)} bytes, shape needs {entry.nbytes()}")
        start, end = cursor, cursor + len(entry.data)
        shape = "[" + ",".join(str(d) for d in entry.shape) + "]"
        parts.append(f'{json.dumps(name, ensure_ascii=False)}:'
                     f'{{"dtype":"{entry.dtype}","shape":{shape},'
                     f'"data_offsets":[{start},{end}]}}')
        payload.extend(entry.data)
        cursor = end
    header = ("{" + ",".join(parts) + "}").encode("utf-8")
    return struct.pack("<Q", len(header)) + header + bytes(payload)


def structurally_equal(a: TensorFile, b: TensorFile) -> bool:
    if a.metadata != b.metadata or set(a.tensors) != set(b.tensors):
        return False
    return all(a.tensors[n] == b.tensors[n] for n in a.tensors)

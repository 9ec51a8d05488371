"""LoRA adapter modeling, ratio-weighted concatenation merging, label masking
and training-recipe emission.

Merging stacks each operand's A block vertically scaled by ratio*(alpha/rank)
and its B block horizontally verbatim, so the merged product B'A' equals the
ratio-weighted sum of operand deltas exactly. The merged adapter's rank and
alpha are both the summed rank, making its own alpha/rank scaling 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    IncompatibleAdapters,
    InvalidInput,
    InvalidSpec,
    ShapeMismatch,
    SpanOutOfRange,
    UnknownTarget,
    UnpairedTensor,
)
from .safetensors_io import TensorFile, entry_from_array

MASK_SENTINEL = -100

LORA_A_SUFFIX = ".lora_A.weight"
LORA_B_SUFFIX = ".lora_B.weight"

RECIPE_DEFAULTS = {
    "learning_rate": 5e-5,
    "num_epoch": 3,
    "per_gpu_batch_size": 4,
    "input_max_token_length": 256,
    "generation_token_length": 256,
}


@dataclass
class LoraAdapter:
    modules: dict[str, tuple[np.ndarray, np.ndarray]]  # target -> (A: r x k, B: d x r)
    rank: int
    alpha: float
    base_model_tag: str = ""
    dtype: str = "F32"

    def targets(self) -> set[str]:
        return set(self.modules)


def load_adapter(tf: TensorFile, config: dict, *, a_suffix: str = LORA_A_SUFFIX,
                 b_suffix: str = LORA_B_SUFFIX) -> LoraAdapter:
    """Pair lora_A/lora_B tensors by target and validate shapes against the rank.

    Tensor names follow "<prefix>.<target>.lora_A.weight"; the target is
    everything before the suffix, so same-named modules in different layers
    stay distinct. The suffixes are configurable for other naming layouts.
    Extra tensors matching neither suffix are ignored here (and preserved by
    the file layer on rewrite).
    """
    rank = int(config["r"])
    alpha = float(config.get("lora_alpha", rank))
    a_parts: dict[str, np.ndarray] = {}
    b_parts: dict[str, np.ndarray] = {}
    for name in tf.tensors:
        if name.endswith(a_suffix):
            a_parts[name[: -len(a_suffix)]] = tf.array(name)
        elif name.endswith(b_suffix):
            b_parts[name[: -len(b_suffix)]] = tf.array(name)
    # widest dtype wins; an F16/BF16 mix resolves to F32 (incompatible value sets)
    seen = {e.dtype for n, e in tf.tensors.items()
            if n.endswith(a_suffix) or n.endswith(b_suffix)}
    if "F32" in seen or {"F16", "BF16"} <= seen:
        dtype = "F32"
    else:
        dtype = next(iter(seen)) if seen else "F32"

    for target in sorted(set(a_parts) | set(b_parts)):
        if target not in a_parts or target not in b_parts:
            raise UnpairedTensor(target)
    modules: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for target in sorted(a_parts):
        a, b = a_parts[target], b_parts[target]
        if a.ndim != 2 or a.shape[0] != rank:
            raise ShapeMismatch(f"{target}: A has shape {a.shape}, expected ({rank}, k)")
        if b.ndim != 2 or b.shape[1] != rank:
            raise ShapeMismatch(f"{target}: B has shape {b.shape}, expected (d, {rank})")
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise InvalidInput(f"{target}: adapter weights contain non-finite entries")
        modules[target] = (a, b)
    return LoraAdapter(modules=modules, rank=rank, alpha=alpha,
                       base_model_tag=config.get("base_model_tag", ""), dtype=dtype)


def adapter_to_tensorfile(adapter: LoraAdapter, prefix: str = "base_model",
                          metadata: dict[str, str] | None = None) -> TensorFile:
    tensors = {}
    for target in sorted(adapter.modules):
        a, b = adapter.modules[target]
        tensors[f"{prefix}.{target}{LORA_A_SUFFIX}"] = entry_from_array(a, adapter.dtype)
        tensors[f"{prefix}.{target}{LORA_B_SUFFIX}"] = entry_from_array(b, adapter.dtype)
    return TensorFile(tensors=tensors, metadata=metadata)


def effective_delta(adapter: LoraAdapter, target: str) -> np.ndarray:
    """Dense update (alpha/rank) * B @ A for one target.

    Blocks are stored in float32; the product is accumulated in float64 so
    self-check residuals reflect the merge's rounding, not this op's.
    """
    if target not in adapter.modules:
        raise UnknownTarget(f"adapter has no target {target!r}")
    a, b = adapter.modules[target]
    return (adapter.alpha / adapter.rank) * (b.astype(np.float64) @ a.astype(np.float64))


@dataclass(frozen=True)
class MergeSpec:
    operands: tuple[tuple[LoraAdapter, float], ...]

    def __post_init__(self):
        if not self.operands:
            raise InvalidSpec("merge needs at least one operand")
        if any(ratio < 0 for _, ratio in self.operands):
            raise InvalidSpec("ratios must be >= 0")
        if all(ratio == 0 for _, ratio in self.operands):
            raise InvalidSpec("at least one operand needs a ratio > 0")
        first, _ = self.operands[0]
        for adapter, _ in self.operands[1:]:
            if adapter.targets() != first.targets():
                raise IncompatibleAdapters(
                    f"target sets differ: {sorted(first.targets())} vs "
                    f"{sorted(adapter.targets())}")
            if adapter.base_model_tag != first.base_model_tag:
                raise IncompatibleAdapters(
                    f"base models differ: {first.base_model_tag!r} vs "
                    f"{adapter.base_model_tag!r}")


def merge(spec: MergeSpec) -> LoraAdapter:
    """Block-concatenation merge with ratio weighting (see module docstring)."""
    operands = spec.operands
    merged_rank = sum(ad.rank for ad, _ in operands)
    first, _ = operands[0]
    modules: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for target in sorted(first.targets()):
        a_blocks = []
        b_blocks = []
        for adapter, ratio in operands:
            a, b = adapter.modules[target]
            scale = np.float32(ratio) * np.float32(adapter.alpha / adapter.rank)
            a_blocks.append(scale * a.astype(np.float32))
            b_blocks.append(b.astype(np.float32))
        modules[target] = (np.vstack(a_blocks), np.hstack(b_blocks))
    dtypes = {ad.dtype for ad, _ in operands}
    if "F32" in dtypes or {"F16", "BF16"} <= dtypes:
        out_dtype = "F32"
    else:
        out_dtype = next(iter(dtypes))
    return LoraAdapter(modules=modules, rank=merged_rank, alpha=float(merged_rank),
                       base_model_tag=first.base_model_tag, dtype=out_dtype)


def merge_residual(spec: MergeSpec, merged: LoraAdapter) -> float:
    """Max-abs difference between the merged delta and the weighted delta sum."""
    worst = 0.0
    for target in sorted(merged.targets()):
        expected = sum(ratio * effective_delta(adapter, target)
                       for adapter, ratio in spec.operands)
        got = effective_delta(merged, target)
        worst = max(worst, float(np.max(np.abs(got - expected))))
    return worst


@dataclass(frozen=True)
class MaskedExample:
    input_ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    labels: tuple[int, ...]


def mask_labels(token_ids: Sequence[int], spans: Sequence[tuple[int, int]]) -> MaskedExample:
    """Labels equal the token ids except the sentinel at every span position.

    Spans are [start, end) index ranges over the chunk; the attention mask
    stays all ones so masked tokens are still attended to. Works for any
    span class the caller supplies, not just person names.
    """
    n = len(token_ids)
    labels = list(token_ids)
    for start, end in spans:
        if start < 0 or end > n or start > end:
            raise SpanOutOfRange(f"span [{start},{end}) outside 0..{n}")
        for i in range(start, end):
            labels[i] = MASK_SENTINEL
    return MaskedExample(input_ids=tuple(token_ids),
                         attention_mask=(1,) * n,
                         labels=tuple(labels))


def masked_example_to_json(ex: MaskedExample) -> str:
    return json.dumps({"input_ids": list(ex.input_ids),
                       "attention_mask": list(ex.attention_mask),
                       "labels": list(ex.labels)}, separators=(",", ":"))


def emit_training_recipe(author_id: str, data_paths: dict[str, str],
                         overrides: dict | None = None) -> dict:
    """Finetuning recipe JSON with the documented defaults; overrides flagged."""
    recipe = {"author_id": author_id, "data": dict(data_paths)}
    recipe.update(RECIPE_DEFAULTS)
    overridden = []
    for key, value in (overrides or {}).items():
        recipe[key] = value
        if key in RECIPE_DEFAULTS and value != RECIPE_DEFAULTS[key]:
            overridden.append(key)
    recipe["overridden"] = sorted(overridden)
    return recipe

"""Learnable tensors of the policy network.

Attention biases are indexed by bond code: 0 for "no bond", 1..y for bond
orders, y+1 for the virtual-atom bond; one scalar per layer and head per
code. ReZero gates start at zero so every layer begins as the identity.
"""

from __future__ import annotations

import numpy as np

from .config import PolicyConfig

VIRTUAL_BOND = -1  # sentinel resolved to bias code y+1

HEAD_TENSORS = (
    "head_class_w", "head_class_b",   # level-0 class logits (stop + new types)
    "head_pick0_w", "head_pick0_b",   # level-0 per-atom logits
    "head_pick1_w", "head_pick1_b",   # level-1 per-atom logits
    "head_order_w", "head_order_b",   # level-2 bond-order logits
)


def tensor_shapes(config: PolicyConfig) -> dict:
    d, ff = config.d_model, config.ff_dim
    k, y = config.alphabet_size, config.max_bond_order
    shapes = {
        "atom_embed": (k + 1, d),
        "level_embed": (3, d),
        "sel0_embed": (2, d),
        "sel1_embed": (2, d),
        "degree_embed": (config.max_degree + 1, d),
        "attn_bias": (config.n_layers, config.n_heads, y + 2),
    }
    for i in range(config.n_layers):
        shapes[f"layer{i}.wq"] = (d, d)
        shapes[f"layer{i}.bq"] = (d,)
        shapes[f"layer{i}.wk"] = (d, d)
        shapes[f"layer{i}.bk"] = (d,)
        shapes[f"layer{i}.wv"] = (d, d)
        shapes[f"layer{i}.bv"] = (d,)
        shapes[f"layer{i}.wo"] = (d, d)
        shapes[f"layer{i}.bo"] = (d,)
        shapes[f"layer{i}.ff_w1"] = (d, ff)
        shapes[f"layer{i}.ff_b1"] = (ff,)
        shapes[f"layer{i}.ff_w2"] = (ff, d)
        shapes[f"layer{i}.ff_b2"] = (d,)
        shapes[f"layer{i}.gate_attn"] = (1,)
        shapes[f"layer{i}.gate_ff"] = (1,)
    shapes.update({
        "head_class_w": (d, k + 1),
        "head_class_b": (k + 1,),
        "head_pick0_w": (d, 1),
        "head_pick0_b": (1,),
        "head_pick1_w": (d, 1),
        "head_pick1_b": (1,),
        "head_order_w": (d, y),
        "head_order_b": (y,),
    })
    return shapes


class PolicyParams:
    """Named tensors plus the config they belong to. Treated as an immutable
    snapshot: training steps build a new instance."""

    def __init__(self, config: PolicyConfig, tensors: dict):
        expected = tensor_shapes(config)
        if set(tensors) != set(expected):
            missing = set(expected) - set(tensors)
            extra = set(tensors) - set(expected)
            raise ValueError(f"tensor names mismatch: missing={missing} extra={extra}")
        for name, arr in tensors.items():
            if tuple(arr.shape) != expected[name]:
                raise ValueError(
                    f"tensor {name}: shape {arr.shape}, expected {expected[name]}"
                )
        self.config = config
        self.tensors = tensors

    @property
    def dtype(self):
        return self.tensors["atom_embed"].dtype

    @staticmethod
    def init(config: PolicyConfig, rng: np.random.Generator, dtype=np.float32) -> "PolicyParams":
        tensors = {}
        for name, shape in tensor_shapes(config).items():
            if name.endswith(("_b", ".bq", ".bk", ".bv", ".bo", ".ff_b1", ".ff_b2")):
                arr = np.zeros(shape)
            elif name.endswith(("gate_attn", "gate_ff")):
                arr = np.zeros(shape)  # ReZero: layers start as identity
            elif name == "attn_bias":
                arr = np.zeros(shape)
            else:
                arr = rng.normal(0.0, 0.02, size=shape)
            tensors[name] = arr.astype(dtype)
        return PolicyParams(config, tensors)

    def astype(self, dtype) -> "PolicyParams":
        return PolicyParams(self.config, {n: a.astype(dtype) for n, a in self.tensors.items()})

    def copy(self) -> "PolicyParams":
        return PolicyParams(self.config, {n: a.copy() for n, a in self.tensors.items()})

    def names(self) -> list:
        return sorted(self.tensors)

    def trainable_names(self, heads_only: bool) -> list:
        return list(HEAD_TENSORS) if heads_only else self.names()

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

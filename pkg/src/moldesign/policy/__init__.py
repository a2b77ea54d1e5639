"""Graph transformer policy: masked distributions over design sub-actions."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import PolicyConfig
from .network import backward, build_batch, forward, masked_distribution, view_from
from .params import HEAD_TENSORS, PolicyParams

__all__ = [
    "HEAD_TENSORS", "PolicyConfig", "PolicyParams", "backward", "build_batch",
    "forward", "load_checkpoint", "masked_distribution", "save_checkpoint",
    "view_from",
]

"""Policy network hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass

from ..alphabet import Alphabet


@dataclass(frozen=True)
class PolicyConfig:
    d_model: int = 64
    n_layers: int = 4
    n_heads: int = 4
    ff_dim: int = 256
    alphabet_size: int = 3
    max_bond_order: int = 3
    max_degree: int = 8
    dropout: float = 0.1

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        for name in ("d_model", "n_layers", "n_heads", "ff_dim",
                     "alphabet_size", "max_bond_order", "max_degree"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    @staticmethod
    def for_alphabet(alphabet: Alphabet, **overrides) -> "PolicyConfig":
        fields = dict(
            alphabet_size=len(alphabet),
            max_bond_order=alphabet.max_bond_order,
            max_degree=alphabet.max_valence,
        )
        fields.update(overrides)
        return PolicyConfig(**fields)

    @staticmethod
    def full_scale(alphabet: Alphabet, **overrides) -> "PolicyConfig":
        """Full-size configuration: 512-wide, ten layers, eight heads, 2048 ff."""
        fields = dict(d_model=512, n_layers=10, n_heads=8, ff_dim=2048)
        fields.update(overrides)
        return PolicyConfig.for_alphabet(alphabet, **fields)

    def to_json(self) -> dict:
        return {
            "d_model": self.d_model,
            "n_layers": self.n_layers,
            "n_heads": self.n_heads,
            "ff_dim": self.ff_dim,
            "alphabet_size": self.alphabet_size,
            "max_bond_order": self.max_bond_order,
            "max_degree": self.max_degree,
            "dropout": self.dropout,
        }

    @staticmethod
    def from_json(obj: dict) -> "PolicyConfig":
        return PolicyConfig(**obj)

"""Atom alphabets: the atom types a design run may place.

An atom type carries its element, a fixed valence (maximum total order of
non-hydrogen bonds; the remainder is implicit hydrogen), and opaque charge
and chirality attributes. Charged or chiral variants are separate alphabet
entries with their own valences.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

CHIRAL_TAGS = ("none", "cw", "ccw")


@dataclass(frozen=True)
class AtomSpec:
    """A single atom type."""

    symbol: str
    atomic_number: int
    valence: int
    formal_charge: int = 0
    chiral_tag: str = "none"

    def __post_init__(self):
        if self.valence < 1:
            raise ValueError(f"valence must be >= 1, got {self.valence} for {self.symbol!r}")
        if self.atomic_number < 1:
            raise ValueError(f"atomic_number must be positive for {self.symbol!r}")
        if self.chiral_tag not in CHIRAL_TAGS:
            raise ValueError(f"chiral_tag must be one of {CHIRAL_TAGS}")

    @property
    def element(self) -> str:
        """Bare element symbol with charge/chirality markers stripped."""
        return self.symbol.rstrip("+-@")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of atom types plus the maximum placeable bond order."""

    specs: tuple[AtomSpec, ...]
    max_bond_order: int = 3
    _by_symbol: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.specs:
            raise ValueError("alphabet must be nonempty")
        if self.max_bond_order < 1:
            raise ValueError("max_bond_order must be >= 1")
        by_symbol = {}
        for i, spec in enumerate(self.specs):
            if spec.symbol in by_symbol:
                raise ValueError(f"duplicate symbol {spec.symbol!r}")
            by_symbol[spec.symbol] = i
        object.__setattr__(self, "_by_symbol", by_symbol)

    def __len__(self) -> int:
        return len(self.specs)

    def __getitem__(self, idx: int) -> AtomSpec:
        return self.specs[idx]

    def index(self, symbol: str) -> int:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise KeyError(f"symbol {symbol!r} not in alphabet") from None

    def find(self, element: str, formal_charge: int = 0, chiral_tag: str = "none"):
        """Index of the spec matching (element, charge, chirality), or None."""
        for i, spec in enumerate(self.specs):
            if (spec.element == element and spec.formal_charge == formal_charge
                    and spec.chiral_tag == chiral_tag):
                return i
        return None

    @property
    def max_valence(self) -> int:
        return max(spec.valence for spec in self.specs)

    def valences(self) -> tuple[int, ...]:
        return tuple(spec.valence for spec in self.specs)

    def digest(self) -> str:
        """Stable hash of the alphabet contents, for checkpoint compatibility checks."""
        payload = json.dumps(
            {
                "specs": [
                    [s.symbol, s.atomic_number, s.valence, s.formal_charge, s.chiral_tag]
                    for s in self.specs
                ],
                "max_bond_order": self.max_bond_order,
            },
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_json(self) -> dict:
        return {
            "specs": [
                {
                    "symbol": s.symbol,
                    "atomic_number": s.atomic_number,
                    "valence": s.valence,
                    "formal_charge": s.formal_charge,
                    "chiral_tag": s.chiral_tag,
                }
                for s in self.specs
            ],
            "max_bond_order": self.max_bond_order,
        }

    @staticmethod
    def from_json(obj: dict) -> "Alphabet":
        specs = tuple(
            AtomSpec(
                symbol=s["symbol"],
                atomic_number=s["atomic_number"],
                valence=s["valence"],
                formal_charge=s.get("formal_charge", 0),
                chiral_tag=s.get("chiral_tag", "none"),
            )
            for s in obj["specs"]
        )
        return Alphabet(specs=specs, max_bond_order=obj["max_bond_order"])


def solvent_cno() -> Alphabet:
    """C/N/O alphabet used for solvent design."""
    return Alphabet(
        specs=(
            AtomSpec("C", 6, 4),
            AtomSpec("N", 7, 3),
            AtomSpec("O", 8, 2),
        ),
        max_bond_order=3,
    )


def drug_full() -> Alphabet:
    """Full alphabet for drug design, including ionized and chiral variants."""
    return Alphabet(
        specs=(
            AtomSpec("C", 6, 4),
            AtomSpec("C-", 6, 3, formal_charge=-1),
            AtomSpec("C+", 6, 5, formal_charge=1),
            AtomSpec("C@", 6, 4, chiral_tag="cw"),
            AtomSpec("C@@", 6, 4, chiral_tag="ccw"),
            AtomSpec("N", 7, 3),
            AtomSpec("N-", 7, 2, formal_charge=-1),
            AtomSpec("N+", 7, 4, formal_charge=1),
            AtomSpec("O", 8, 2),
            AtomSpec("O-", 8, 1, formal_charge=-1),
            AtomSpec("O+", 8, 3, formal_charge=1),
            AtomSpec("F", 9, 1),
            AtomSpec("P", 15, 7),
            AtomSpec("P-", 15, 6, formal_charge=-1),
            AtomSpec("P+", 15, 8, formal_charge=1),
            AtomSpec("S", 16, 6),
            AtomSpec("S-", 16, 5, formal_charge=-1),
            AtomSpec("S+", 16, 7, formal_charge=1),
            AtomSpec("S@", 16, 6, chiral_tag="cw"),
            AtomSpec("S@@", 16, 6, chiral_tag="ccw"),
            AtomSpec("Cl", 17, 1),
            AtomSpec("Br", 35, 1),
            AtomSpec("I", 53, 1),
        ),
        max_bond_order=3,
    )


PRESETS = {"solvent-CNO": solvent_cno, "drug-full": drug_full}


def load_preset(name: str) -> Alphabet:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown alphabet preset {name!r}; available: {sorted(PRESETS)}") from None

"""User-defined structural constraints: size cap, ring sizes, bond patterns,
and frozen substructures.

A pattern rule matches a center atom by symbol together with a multiset of
(neighbor symbol, bond order) requirements; ``"*"`` is a wildcard symbol. By
default the listed neighbors only need to be present (submultiset matching);
with ``exact=True`` they must be the complete heavy-neighbor list. A rule may
carry an ``unless`` pattern that overrides it: centers matching both are
allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import rings

WILDCARD = "*"


@dataclass(frozen=True)
class PatternRule:
    center: str
    neighbors: tuple = ()
    implicit_h: Optional[int] = None
    exact: bool = False
    unless: Optional["PatternRule"] = None

    def __post_init__(self):
        object.__setattr__(self, "neighbors", tuple((str(s), int(o)) for s, o in self.neighbors))
        if len(self.neighbors) + 1 > 8:
            raise ValueError("pattern rules are limited to 8 atoms including the center")

    def describe(self) -> str:
        parts = [self.center] + [f"{s}:{o}" for s, o in self.neighbors]
        text = "center " + " ".join(parts)
        if self.implicit_h is not None:
            text += f" H{self.implicit_h}"
        if self.exact:
            text += " (exact)"
        if self.unless is not None:
            text += f" unless [{self.unless.describe()}]"
        return text


@dataclass(frozen=True)
class Constraints:
    max_atoms: int
    allowed_ring_sizes: Optional[frozenset] = None
    forbidden_patterns: tuple = ()
    frozen_atoms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.max_atoms < 1:
            raise ValueError("max_atoms must be >= 1")
        if self.allowed_ring_sizes is not None:
            object.__setattr__(self, "allowed_ring_sizes", frozenset(int(s) for s in self.allowed_ring_sizes))
        object.__setattr__(self, "forbidden_patterns", tuple(self.forbidden_patterns))
        object.__setattr__(self, "frozen_atoms", frozenset(int(i) for i in self.frozen_atoms))

    @staticmethod
    def unrestricted(max_atoms: int) -> "Constraints":
        return Constraints(max_atoms=max_atoms)


def bond_rule(symbol_a: str, symbol_b: str, order: int, unless: Optional[PatternRule] = None) -> PatternRule:
    """Forbid a bond of the given order between two atom symbols."""
    return PatternRule(center=symbol_a, neighbors=((symbol_b, order),), unless=unless)


def stability_pattern_rules() -> tuple:
    """Bonding patterns disallowed in the solvent design case studies:
    N-N and O-O single bonds, diaminocarbon unless it is a urea carbon,
    and N/O/H-substituted carbons with one further heavy neighbor."""
    urea = PatternRule(center="C", neighbors=(("N", 1), ("N", 1), ("O", 2)))
    return (
        bond_rule("N", "N", 1),
        bond_rule("O", "O", 1),
        PatternRule(center="C", neighbors=(("N", 1), ("N", 1)), unless=urea),
        PatternRule(
            center="C",
            neighbors=(("N", 1), ("O", 1), (WILDCARD, 1)),
            implicit_h=1,
            exact=True,
        ),
    )


def _match_requirements(requirements, actual):
    """Backtracking multiset match of (symbol, order) requirements against
    actual neighbor (symbol, order) pairs; each actual neighbor is used once."""
    if not requirements:
        return True
    sym, order = requirements[0]
    for i, (asym, aorder) in enumerate(actual):
        if aorder == order and (sym == WILDCARD or sym == asym):
            if _match_requirements(requirements[1:], actual[:i] + actual[i + 1:]):
                return True
    return False


def rule_matches(rule: PatternRule, symbol: str, neighbor_pairs: list, slack: int) -> bool:
    """Whether `rule` matches a center atom of `symbol` with the given
    (neighbor symbol, order) pairs and implicit hydrogen count, ignoring
    any `unless` exception."""
    if rule.center != WILDCARD and rule.center != symbol:
        return False
    if rule.implicit_h is not None and slack != rule.implicit_h:
        return False
    if rule.exact and len(neighbor_pairs) != len(rule.neighbors):
        return False
    if len(rule.neighbors) > len(neighbor_pairs):
        return False
    return _match_requirements(rule.neighbors, neighbor_pairs)


def rule_forbids(rule: PatternRule, symbol: str, neighbor_pairs: list, slack: int) -> bool:
    if not rule_matches(rule, symbol, neighbor_pairs, slack):
        return False
    if rule.unless is not None and rule_matches(rule.unless, symbol, neighbor_pairs, slack):
        return False
    return True


def check_structural_constraints(m, constraints: Constraints):
    """Full structural check of a molecule: ring sizes of the smallest-cycle
    decomposition and forbidden patterns at every atom.

    Returns (ok, violations) where violations is a list of strings.
    """
    violations = []
    n = m.n_atoms
    adj = [set(int(v) for v in m.neighbors(i)) for i in range(n)]
    if constraints.allowed_ring_sizes is not None:
        for size in rings.ring_sizes(n, adj):
            if size not in constraints.allowed_ring_sizes:
                violations.append(f"ring of size {size} not allowed")
    if constraints.forbidden_patterns:
        for i in range(n):
            spec = m.spec(i)
            pairs = [(m.spec(int(v)).symbol, int(m.bonds[i, v])) for v in sorted(adj[i])]
            slack = spec.valence - int(m.bonds[i].sum())
            for rule in constraints.forbidden_patterns:
                if rule_forbids(rule, spec.symbol, pairs, slack):
                    violations.append(f"atom {i} matches forbidden pattern: {rule.describe()}")
    if n > constraints.max_atoms:
        violations.append(f"{n} atoms exceeds cap {constraints.max_atoms}")
    return (not violations, violations)


def check_action_constraints(result, constraints: Constraints, touched) -> Optional[str]:
    """Post-action constraint check used by apply_action's defensive path.
    `touched` are the atom indices whose neighborhoods the action changed."""
    for i in touched:
        if i in constraints.frozen_atoms:
            return f"frozen atom {i} touched"
    n = result.n_atoms
    if n > constraints.max_atoms:
        return f"{n} atoms exceeds cap {constraints.max_atoms}"
    if constraints.allowed_ring_sizes is not None:
        adj = [set(int(v) for v in result.neighbors(i)) for i in range(n)]
        for size in rings.ring_sizes(n, adj):
            if size not in constraints.allowed_ring_sizes:
                return f"ring of size {size} not allowed"
    if constraints.forbidden_patterns:
        for i in touched:
            spec = result.spec(i)
            neigh = sorted(int(v) for v in result.neighbors(i))
            pairs = [(result.spec(v).symbol, int(result.bonds[i, v])) for v in neigh]
            slack = spec.valence - int(result.bonds[i].sum())
            for rule in constraints.forbidden_patterns:
                if rule_forbids(rule, spec.symbol, pairs, slack):
                    return f"atom {i} matches forbidden pattern: {rule.describe()}"
    return None

"""Build molecules by sequential graph edits and watch the action mask work.

A molecule is an atom-type vector plus a symmetric bond-order matrix; edits
either append an atom with one bond, bond two existing atoms, or stop.
Implicit hydrogens are whatever valence the explicit bonds leave unused.
"""

from moldesign.alphabet import solvent_cno
from moldesign.molgraph import (
    AddAtom,
    AddBond,
    Constraints,
    Molecule,
    apply_action,
    bond_rule,
    decode_level0,
    feasible_level0,
    stability_pattern_rules,
    valence_slack,
)
from moldesign.smiles import write

alpha = solvent_cno()  # C (valence 4), N (3), O (2); bonds up to order 3
free = Constraints.unrestricted(max_atoms=25)

# start from a single carbon, i.e. methane once we stop
m = Molecule.single_atom(alpha, alpha.index("C"))
print("start:", write(m), "| free valence:", valence_slack(m, 0))

# grow formaldehyde: append an oxygen double-bonded to atom 0
m = apply_action(m, AddAtom(atom_type=alpha.index("O"), attach_to=0, order=2))
print("after AddAtom(O, 0, order=2):", write(m))
print("  slack per atom:", [valence_slack(m, i) for i in range(m.n_atoms)])

# the level-0 mask offers only choices that can still complete:
# the oxygen is saturated, so it is not offered as a bond endpoint
choices = feasible_level0(m, free)
print("  level-0 choices:", [decode_level0(c, len(alpha)) for c in choices])

# rings come from AddBond between existing atoms: close a cyclopropane
chain = Molecule.single_atom(alpha, 0)
chain = apply_action(chain, AddAtom(0, 0, 1))
chain = apply_action(chain, AddAtom(0, 1, 1))
ring = apply_action(chain, AddBond(0, 2, 1))
print("propane chain + AddBond(0, 2):", write(ring))

# constraints shrink the mask instead of penalizing after the fact:
# with rings limited to 5-6 atoms, the closing bond above is never offered
strict = Constraints(
    max_atoms=25,
    allowed_ring_sizes={5, 6},
    forbidden_patterns=stability_pattern_rules(),
)
choices = feasible_level0(chain, strict)
print("ring-limited level-0 choices on the chain:",
      [decode_level0(c, len(alpha)) for c in choices])

# pattern rules work the same way: forbid O-O single bonds and the mask
# only offers the double bond when joining two oxygens
o2 = Molecule.single_atom(alpha, alpha.index("O"))
no_peroxide = Constraints(max_atoms=4, forbidden_patterns=(bond_rule("O", "O", 1),))
from moldesign.molgraph import ActionLevelState, feasible_level2

orders = feasible_level2(
    o2, no_peroxide,
    ActionLevelState(level=2, new_atom_type=alpha.index("O"), second_atom=0),
)
print("orders offered for a new O on O under the no-peroxide rule:", orders)

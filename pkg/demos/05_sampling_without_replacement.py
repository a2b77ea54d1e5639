"""Stochastic beam search and the step-and-reconsider loop.

SBS perturbs cumulative log-probabilities with conditional Gumbel noise and
keeps the top-beta scores, which samples *distinct* action sequences exactly
as sampling without replacement would. The TASAR driver then alternates:
sample a beam, commit a few sub-actions of the best sequence so far, sample
alternatives from that prefix.
"""

import numpy as np

from moldesign.alphabet import solvent_cno
from moldesign.molgraph import Constraints, Molecule
from moldesign.objectives import IsomerFormula
from moldesign.policy import PolicyConfig, PolicyParams
from moldesign.sampler import NetworkPolicy, stochastic_beam_search, tasar_sample
from moldesign.smiles import write

alpha = solvent_cno()
params = PolicyParams.init(
    PolicyConfig.for_alphabet(alpha, d_model=32, n_layers=2, n_heads=4, ff_dim=64),
    np.random.default_rng(0),
)
policy = NetworkPolicy(params)
cons = Constraints.unrestricted(4)
m0 = Molecule.single_atom(alpha, 0)

# one beam: up to 8 distinct finished sequences, best perturbed score first
from moldesign.molgraph import DesignState

leaves = stochastic_beam_search(policy, DesignState.from_molecule(m0, cons), 8,
                                np.random.default_rng(1))
print("one beam of 8 without replacement:")
for node in leaves:
    print(f"  p={np.exp(node.logp):8.2e}  G={node.score:7.2f}  "
          f"{write(node.state.to_molecule()):12s} trace={node.trace}")

# the same trace never appears twice, also across TASAR rounds
scored = tasar_sample(policy, m0, cons, beam_width=8, step_size=3,
                      objective=IsomerFormula("C3H8"), budget=32,
                      rng=np.random.default_rng(2))
print(f"\nTASAR sampled {len(scored)} distinct traces; best:")
for entry in sorted(scored, key=lambda s: -s.value)[:5]:
    print(f"  {entry.value:5.2f}  {write(entry.molecule)}")
assert len({s.subactions for s in scored}) == len(scored)

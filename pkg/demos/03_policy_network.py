"""The graph transformer policy: biased attention over an unordered atom set.

A virtual atom at position 0 aggregates global state; attention scores get a
learned additive bias per bond order (per layer and head), and ReZero gates
make every layer start as the identity. Three heads read the final
embeddings: stop-or-new-atom class logits and per-atom logits at level 0,
per-atom logits at level 1, bond-order logits at level 2.
"""

import numpy as np

from moldesign.alphabet import solvent_cno
from moldesign.molgraph import Constraints, DesignState
from moldesign.molgraph.state import to_logit_index
from moldesign.policy import (
    PolicyConfig,
    PolicyParams,
    forward,
    load_checkpoint,
    masked_distribution,
    save_checkpoint,
)
from moldesign.smiles import parse

alpha = solvent_cno()
config = PolicyConfig.for_alphabet(alpha)  # desk scale: d=64, 4 layers, 4 heads
print("config:", config)

rng = np.random.default_rng(0)
params = PolicyParams.init(config, rng)

# level-0 logits for ethanol: [stop, new C, new N, new O, atom 0, atom 1, atom 2]
ethanol = parse("CCO", alpha)
state = DesignState.from_molecule(ethanol, Constraints.unrestricted(25))
(logits,), _ = forward(params, [state.network_view()])
print("level-0 logits:", np.round(logits, 3))

# the mask turns logits into a distribution over feasible choices only
feasible = state.feasible_actions()
idx = [to_logit_index(0, c) for c in feasible]
probs = masked_distribution(logits, idx)
print("masked probabilities (sum=%.6f):" % probs.sum(), np.round(probs, 3))

# permutation equivariance: relabeling atoms permutes the per-atom logits
# and leaves the class logits alone
perm = [2, 0, 1]
atoms = [int(ethanol.atoms[p]) for p in perm]
bonds = np.zeros((3, 3), dtype=np.int64)
for i in range(3):
    for j in range(3):
        bonds[i, j] = ethanol.bonds[perm[i], perm[j]]
from moldesign.molgraph import Molecule

shuffled = DesignState.from_molecule(Molecule(alpha, atoms, bonds),
                                     Constraints.unrestricted(25))
(logits_p,), _ = forward(params, [shuffled.network_view()])
k = len(alpha)
print("class logits unchanged:", np.allclose(logits_p[: k + 1], logits[: k + 1], atol=1e-5))
print("atom logits permuted:  ", np.allclose(logits_p[k + 1 :], logits[k + 1 :][perm], atol=1e-5))

# checkpoints round-trip bit-for-bit (GXF1 container, float32 + CRC)
save_checkpoint(params, alpha, "/tmp/demo.ckpt")
loaded, loaded_alpha = load_checkpoint("/tmp/demo.ckpt")
print("checkpoint bitwise equal:",
      all(np.array_equal(loaded[n], params[n]) for n in params.names()))

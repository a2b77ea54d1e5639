"""Scoring solvents through the external oracle protocol.

The engine never computes activity coefficients itself: it writes solvent
SMILES, sends (solute, solvent, T) triples to an oracle over newline JSON,
and combines the returned ln(gamma_inf) values into the extraction
objective. Here the oracle is the bundled reference scorer (scorer/), whose
mock model is deterministic across processes.

Build it first:  cd scorer && npm install && npm run build
"""

import math
import shutil
from pathlib import Path

from moldesign.alphabet import solvent_cno
from moldesign.objectives import OracleClient, SolventIBA, solvent_iba_objective
from moldesign.smiles import parse

server = Path(__file__).resolve().parents[1] / "scorer" / "dist" / "server.js"
node = shutil.which("node")
if node is None or not server.exists():
    raise SystemExit("needs node and a built scorer (cd scorer && npm install && npm run build)")

alpha = solvent_cno()
candidates = ["CCCCCC", "CCOCC", "CCCCO", "CC(C)CC", "OCCO"]

with OracleClient(command=[node, str(server)]) as oracle:
    objective = SolventIBA(oracle, temperature=298.0)
    mols = [parse(s, alpha) for s in candidates]
    scores = objective.score_batch(mols)
    print("isobutanol-extraction objective at 298 K (mock gammas):")
    for s, value in sorted(zip(candidates, scores), key=lambda kv: -kv[1]):
        print(f"  {value:8.3f}  {s}")

    # the combinator itself is plain math over the returned gammas
    (ln_iba,) = oracle.query([("CC(C)CO", "CCCCCC", 298.0)])
    (ln_sw,) = oracle.query([("CCCCCC", "O", 298.0)])
    (ln_ws,) = oracle.query([("O", "CCCCCC", 298.0)])
    by_hand = solvent_iba_objective(math.exp(ln_iba), math.exp(ln_sw), math.exp(ln_ws))
    print(f"hexane by hand: {by_hand:.6f}")

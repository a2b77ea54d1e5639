#!/usr/bin/env python3
"""Regenerate the bundled SMILES corpus (data/corpus.smi).

Mixes a curated list covering the dialect's syntax corners with random
molecules from masked rollouts over the full drug alphabet. Every line is
verified to parse and round-trip before being written.
"""

import random
from pathlib import Path

from moldesign.alphabet import drug_full
from moldesign.molgraph import Constraints, canonical_key, random_rollout
from moldesign.smiles import parse, write

CURATED = [
    # plain chains and branches
    "C", "N", "O", "CC", "CO", "C=O", "C#N", "CCO", "CC(C)C", "CC(C)(C)C",
    "CCCCCCCCCC", "CC(CC(C)C)CC", "C(C(C(C)))C", "NCCN", "OCCO", "CNC", "COC",
    "CC(=O)C", "CC(=O)O", "CC(=O)N", "C(=O)O", "NC(=O)N", "CC#CC", "N#CC#N",
    "CCOC(=O)CC", "CN(C)C=O", "CC(C)CO", "OCC(O)CO",
    # halogens and heteroatoms
    "ClC(Cl)(Cl)Cl", "FC(F)(F)C", "BrCCBr", "ICI", "ClCC(=O)O", "FC=C",
    "SCC", "CS(=O)C", "CSSC", "PC", "OP(=O)(O)O", "CSC",
    # rings, ring closures, multi-ring digits
    "C1CC1", "C1CCC1", "C1CCCC1", "C1CCCCC1", "C1CCCCCC1", "C1CC1C1CC1",
    "C1CCC2(CC1)CC2", "C12CC1C2", "C1CC2CCC1CC2", "C%10CCCC%10",
    "C1CCCCC1C1CCCCC1", "O1CCOCC1", "N1CCNCC1", "C1CCOC1", "C1CCNC1",
    "C1CC=CC1", "C1C=CC=C1", "C1=CCCCC1",
    # aromatics (kekulized on parse)
    "c1ccccc1", "c1ccncc1", "c1cncnc1", "c1cc[nH]c1", "c1ccoc1", "c1ccsc1",
    "Cc1ccccc1", "c1ccc2ccccc2c1", "c1ccc(cc1)O", "c1ccc(cc1)N", "Cc1ccc(C)cc1",
    "c1ccc(cc1)C(=O)O", "COc1ccccc1", "c1ccc2[nH]ccc2c1", "c1cnc2[nH]ccc2c1",
    "Oc1ccc(O)cc1", "Nc1ccccc1C", "c1ccc(cc1)c1ccccc1", "CCc1cccnc1",
    # charges
    "[NH4+]", "[OH-]", "C[N+](C)(C)C", "C[O-]", "CC(=O)[O-]", "C[NH3+]",
    "[O-]C(=O)CC(=O)[O-]", "C[N+](=O)[O-]", "[NH3+]CC(=O)[O-]",
    # chirality
    "[C@H](N)(O)C", "[C@@H](N)(O)C", "C[C@H](N)C(=O)O", "C[C@@H](O)CC",
    "N[C@@H](CC)C(=O)O", "C[C@H]1CC[C@@H](C)CC1", "[C@](C)(N)(O)CC",
    # explicit H counts in brackets
    "[CH4]", "[NH3]", "[OH2]", "[CH3]C", "[CH2](C)C", "[SH6]",
    # mixed / stress
    "CC(C)(C)c1ccc(O)cc1", "OC(=O)c1ccccc1OC(=O)C", "CN1CCN(C)CC1",
    "O=C1CCCCC1", "O=C1NC(=O)NC(=O)C1", "CC1(C)CCCC1", "N#Cc1ccccc1",
    "ClC1=CC=CC=C1", "CC=CC=CC=CC", "C#CC#CC#CC", "OO", "NN", "NO",
]


def main():
    out_path = Path(__file__).resolve().parents[1] / "src" / "moldesign" / "data" / "corpus.smi"
    alpha = drug_full()
    seen = set()
    lines = []

    for s in CURATED:
        m = parse(s, alpha)
        rt = parse(write(m), alpha)
        assert canonical_key(rt) == canonical_key(m), s
        if s not in seen:
            seen.add(s)
            lines.append(s)

    rng = random.Random(20240901)
    cons = Constraints.unrestricted(12)
    keys = set()
    while len(lines) < 1100:
        m = random_rollout(alpha, cons, rng)
        key = canonical_key(m)
        if key in keys:
            continue
        keys.add(key)
        s = write(m)
        rt = parse(s, alpha)
        assert canonical_key(rt) == key, s
        if s not in seen:
            seen.add(s)
            lines.append(s)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("# bundled SMILES corpus: curated dialect coverage + generated molecules\n")
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} strings to {out_path}")


if __name__ == "__main__":
    main()

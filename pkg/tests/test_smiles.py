import random
from pathlib import Path

import pytest

from moldesign.alphabet import drug_full, solvent_cno
from moldesign.errors import (
    DisconnectedMolecule,
    KekulizationFailure,
    SmilesError,
    SmilesSyntaxError,
    UnsupportedAtom,
    ValenceViolation,
)
from moldesign.molgraph import Constraints, DesignState, canonical_key, valence_slack
from moldesign.smiles import (
    parse,
    read_corpus,
    replay,
    to_action_trace,
    to_subactions,
    write,
)

from helpers import brute_isomorphic, permuted

CNO = solvent_cno()
DRUG = drug_full()
CORPUS = Path(__file__).resolve().parents[1] / "src" / "moldesign" / "data" / "corpus.smi"


class TestParse:
    def test_formaldehyde(self):
        m = parse("C=O", CNO)
        assert list(m.atoms) == [0, 2]
        assert m.bonds[0, 1] == 2

    def test_methane_implicit_h(self):
        m = parse("C", CNO)
        assert m.n_atoms == 1 and valence_slack(m, 0) == 4

    def test_benzene_kekulized(self):
        m = parse("c1ccccc1", CNO)
        # each carbon: ring orders sum to 3, one implicit hydrogen
        for i in range(6):
            assert m.degree(i) == 3 and valence_slack(m, i) == 1
        orders = sorted(int(m.bonds[i, j]) for i in range(6) for j in range(i) if m.bonds[i, j])
        assert orders == [1, 1, 1, 2, 2, 2]

    def test_pyridine_vs_pyrrole_nitrogen(self):
        pyridine = parse("c1ccncc1", CNO)
        n_idx = [i for i in range(6) if pyridine.spec(i).symbol == "N"][0]
        assert valence_slack(pyridine, n_idx) == 0
        pyrrole = parse("c1cc[nH]c1", CNO)
        n_idx = [i for i in range(5) if pyrrole.spec(i).symbol == "N"][0]
        assert valence_slack(pyrrole, n_idx) == 1

    def test_fused_aromatic(self):
        m = parse("c1ccc2ccccc2c1", CNO)
        assert m.n_atoms == 10
        assert all(m.degree(i) in (3, 4) for i in range(10))

    def test_charged_and_chiral_brackets(self):
        m = parse("C[C@H](N)C(=O)O", DRUG)
        tags = [m.spec(i).chiral_tag for i in range(m.n_atoms)]
        assert "cw" in tags
        m = parse("[NH4+]", DRUG)
        assert m.spec(0).formal_charge == 1 and valence_slack(m, 0) == 4

    def test_ring_closure_percent(self):
        m = parse("C%10CCCC%10", CNO)
        assert m.degree(0) == 2 and m.n_atoms == 5

    def test_explicit_h_assertion(self):
        assert parse("[NH3]", DRUG).n_atoms == 1
        with pytest.raises(ValenceViolation):
            parse("[NH2]", DRUG)

    @pytest.mark.parametrize(
        "bad,exc",
        [
            ("", SmilesSyntaxError),
            ("C/C=C/C", SmilesSyntaxError),
            ("[13C]", SmilesSyntaxError),
            ("CC(C", SmilesSyntaxError),
            ("C1CC", SmilesSyntaxError),
            ("C.C", SmilesSyntaxError),
            ("C=", SmilesSyntaxError),
            ("=C", SmilesSyntaxError),
            ("C==C", SmilesSyntaxError),
            ("C%1C", SmilesSyntaxError),
            ("C11", SmilesSyntaxError),
            ("C-1CC=1", SmilesSyntaxError),
            ("[Xe]C", UnsupportedAtom),
            ("[N+3]", UnsupportedAtom),
            ("O=C(=O)=O", ValenceViolation),
            ("c1cccc1", KekulizationFailure),
            ("c1ccCcc1", KekulizationFailure),
        ],
    )
    def test_rejects(self, bad, exc):
        with pytest.raises(exc):
            parse(bad, DRUG)

    def test_syntax_errors_carry_position(self):
        with pytest.raises(SmilesSyntaxError) as info:
            parse("CC.C", DRUG)
        assert info.value.position == 2


class TestWrite:
    def test_single_atom(self):
        assert write(parse("C", CNO)) == "C"

    def test_round_trip_is_isomorphic(self):
        for s in ["C=O", "CC(C)C", "C1CCCCC1", "c1ccccc1", "CC(=O)[O-]", "C[C@@H](N)O"]:
            m = parse(s, DRUG)
            again = parse(write(m), DRUG)
            assert canonical_key(again) == canonical_key(m), s

    def test_deterministic_across_atom_orderings(self):
        rng = random.Random(5)
        m = parse("CC(=O)NC1CCOC1", DRUG)
        base = write(m)
        for _ in range(10):
            perm = list(range(m.n_atoms))
            rng.shuffle(perm)
            assert write(permuted(m, perm)) == base

    def test_cyclohexane_single_ring_digit(self):
        s = write(parse("C1CCCCC1", CNO))
        assert s.count("1") == 2 and s.count("C") == 6


class TestActionTrace:
    def test_formaldehyde_trace(self):
        tr = to_action_trace(parse("C=O", CNO))
        assert len(tr.steps) == 2  # one AddAtom, then stop
        assert canonical_key(replay(tr)) == canonical_key(parse("C=O", CNO))

    def test_single_atom_trace(self):
        tr = to_action_trace(parse("O", CNO))
        assert len(tr.steps) == 1

    def test_cyclopropane_trace_shape(self):
        tr = to_action_trace(parse("C1CC1", CNO))
        assert len(tr.steps) == 4  # 2 AddAtom + 1 AddBond + stop

    def test_traces_are_legal_rollouts(self):
        strings = ["C", "C=O", "CC(C)C", "C1CCCCC1", "c1ccc2ccccc2c1", "C[N+](=O)[O-]"]
        for s in strings:
            m = parse(s, DRUG)
            tr = to_action_trace(m)
            state = DesignState.from_molecule(tr.initial, Constraints.unrestricted(m.n_atoms))
            state.replay(to_subactions(tr), check=True)
            assert state.done
            assert canonical_key(state.to_molecule()) == canonical_key(m)


class TestCorpus:
    def test_corpus_large_enough(self):
        assert len(read_corpus(CORPUS)) >= 1000

    def test_corpus_round_trip(self):
        strings = read_corpus(CORPUS)
        failures = []
        for s in strings:
            try:
                m = parse(s, DRUG)
                again = parse(write(m), DRUG)
                if canonical_key(again) != canonical_key(m):
                    failures.append(s)
            except SmilesError:
                failures.append(s)
        assert not failures, f"{len(failures)} round-trip failures, first: {failures[:3]}"

    def test_mutation_fuzz_never_crashes(self):
        rng = random.Random(99)
        strings = read_corpus(CORPUS)
        charset = "CNOPSFIclnos@+-=#()[]123456789%Br"
        for _ in range(3000):
            s = rng.choice(strings)
            pos = rng.randrange(len(s))
            op = rng.randrange(3)
            if op == 0:
                s = s[:pos] + rng.choice(charset) + s[pos + 1:]
            elif op == 1:
                s = s[:pos] + s[pos + 1:]
            else:
                s = s[:pos] + rng.choice(charset) + s[pos:]
            if not s:
                continue
            try:
                parse(s, DRUG)
            except SmilesError:
                pass


class TestManyRings:
    def test_two_digit_ring_closures_round_trip(self):
        # a complete graph on eight heptavalent atoms forces more than nine
        # simultaneously open ring bonds, i.e. %nn closures
        import numpy as np
        from moldesign.molgraph import Molecule

        n = 8
        bonds = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
        m = Molecule(DRUG, [DRUG.index("P")] * n, bonds)
        s = write(m)
        assert "%1" in s
        again = parse(s, DRUG)
        assert canonical_key(again) == canonical_key(m)


class TestDisconnected:
    def test_trace_requires_connected(self):
        import numpy as np
        from moldesign.molgraph import Molecule

        bonds = np.zeros((2, 2), dtype=np.int64)
        m = Molecule(CNO, [0, 0], bonds, _validate=False)
        with pytest.raises(DisconnectedMolecule):
            to_action_trace(m)

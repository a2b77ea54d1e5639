import numpy as np
import pytest

from moldesign import learner
from moldesign.alphabet import Alphabet, AtomSpec, solvent_cno
from moldesign.molgraph import Constraints, DesignState, Molecule, canonical_key
from moldesign.objectives import AtomCountTarget, IsomerFormula
from moldesign.policy import PolicyConfig, PolicyParams
from moldesign.smiles import parse

CNO = solvent_cno()


def scored(m, value, subactions=(0,), epoch=0):
    return learner.ScoredMolecule(molecule=m, value=value, subactions=subactions, epoch=epoch)


class TestArchive:
    def test_duplicate_with_lower_score_ignored(self):
        archive = learner.Archive(5)
        butane = parse("CCCC", CNO)
        archive.merge([scored(butane, 1.0)], epoch=0)
        archive.merge([scored(parse("CCCC", CNO), 0.5)], epoch=1)
        assert len(archive) == 1
        assert archive.entries[0].value == 1.0
        assert archive.entries[0].epoch == 0

    def test_duplicate_with_higher_score_replaces(self):
        archive = learner.Archive(5)
        archive.merge([scored(parse("CCCC", CNO), 0.5)], epoch=0)
        archive.merge([scored(parse("CCCC", CNO), 0.9)], epoch=1)
        assert len(archive) == 1 and archive.entries[0].value == 0.9

    def test_overflow_drops_lowest(self):
        archive = learner.Archive(3)
        mols = [parse(s, CNO) for s in ["C", "CC", "CCC", "CCCC"]]
        archive.merge([scored(m, float(i)) for i, m in enumerate(mols)], epoch=0)
        assert len(archive) == 3
        assert [e.value for e in archive.entries] == [3.0, 2.0, 1.0]

    def test_merge_empty_is_identity(self):
        archive = learner.Archive(3)
        archive.merge([scored(parse("CC", CNO), 1.0)], epoch=0)
        before = [(e.key, e.value) for e in archive.entries]
        archive.merge([], epoch=1)
        assert [(e.key, e.value) for e in archive.entries] == before

    def test_non_finite_excluded(self):
        archive = learner.Archive(3)
        archive.merge([scored(parse("CC", CNO), float("-inf"))], epoch=0)
        assert len(archive) == 0

    def test_tie_break_earlier_discovery(self):
        archive = learner.Archive(5)
        a, b = parse("CC", CNO), parse("CCC", CNO)
        archive.merge([scored(a, 1.0)], epoch=0)
        archive.merge([scored(b, 1.0)], epoch=1)
        assert archive.entries[0].key == canonical_key(a)


class TestRun:
    def test_atom_count_reaches_forced_optimum(self):
        alpha = Alphabet(specs=(AtomSpec("C", 6, 4),), max_bond_order=1)
        cfg = PolicyConfig.for_alphabet(alpha, d_model=32, n_layers=2, n_heads=4, ff_dim=64)
        params = PolicyParams.init(cfg, np.random.default_rng(0))
        hyper = learner.LearnConfig(top_s=10, beam_width=32, step_size=12, epochs=5,
                                    batches_per_epoch=8, batch_size=32, lr=1e-3, seed=0)
        archive, _, records = learner.run(
            params, Molecule.single_atom(alpha, 0), AtomCountTarget(6),
            Constraints.unrestricted(6), hyper,
        )
        assert archive.best == 6.0
        bests = [r["best"] for r in records]
        assert all(b >= a for a, b in zip(bests, bests[1:]))

    def test_archived_traces_replay_to_their_molecules(self):
        alpha = CNO
        cfg = PolicyConfig.for_alphabet(alpha, d_model=32, n_layers=1, n_heads=2, ff_dim=32)
        params = PolicyParams.init(cfg, np.random.default_rng(1))
        cons = Constraints.unrestricted(4)
        hyper = learner.LearnConfig(top_s=8, beam_width=16, step_size=6, epochs=3,
                                    batches_per_epoch=4, batch_size=16, lr=1e-3, seed=1)
        m0 = Molecule.single_atom(alpha, 0)
        archive, _, _ = learner.run(params, m0, IsomerFormula("C3H8"), cons, hyper)
        assert len(archive) > 1
        for entry in archive.entries:
            state = DesignState.from_molecule(m0, cons)
            state.replay(entry.subactions, check=True)
            assert state.done
            assert canonical_key(state.to_molecule()) == entry.key

    def test_full_run_determinism(self):
        outputs = []
        for _ in range(2):
            cfg = PolicyConfig.for_alphabet(CNO, d_model=32, n_layers=1, n_heads=2, ff_dim=32)
            params = PolicyParams.init(cfg, np.random.default_rng(5), dtype=np.float64)
            hyper = learner.LearnConfig(top_s=6, beam_width=8, step_size=6, epochs=3,
                                        batches_per_epoch=4, batch_size=8, lr=1e-3, seed=5)
            archive, trained, _ = learner.run(
                params, Molecule.single_atom(CNO, 0), AtomCountTarget(4),
                Constraints.unrestricted(4), hyper,
            )
            outputs.append((
                [(e.key, e.value, e.subactions) for e in archive.entries],
                {n: trained[n].tobytes() for n in trained.names()},
            ))
        assert outputs[0][0] == outputs[1][0]
        assert outputs[0][1] == outputs[1][1]

    def test_nonfinite_gradient_aborts_epoch_training(self, monkeypatch):
        from moldesign.errors import NonFiniteGradient

        calls = {"n": 0}
        real = learner.cross_entropy_loss

        def explosive(params, batch, **kwargs):
            calls["n"] += 1
            if calls["n"] == 1:
                raise NonFiniteGradient("boom")
            return real(params, batch, **kwargs)

        monkeypatch.setattr(learner, "cross_entropy_loss", explosive)
        cfg = PolicyConfig.for_alphabet(CNO, d_model=32, n_layers=1, n_heads=2, ff_dim=32)
        params = PolicyParams.init(cfg, np.random.default_rng(0))
        before = {n: params[n].copy() for n in params.names()}
        hyper = learner.LearnConfig(top_s=4, beam_width=4, step_size=3, epochs=2,
                                    batches_per_epoch=3, batch_size=4, lr=1e-2, seed=0)
        archive, trained, records = learner.run(
            params, Molecule.single_atom(CNO, 0), AtomCountTarget(3),
            Constraints.unrestricted(3), hyper,
        )
        assert len(records) == 2
        # epoch 0 training was rolled back; epoch 1 trained normally
        assert calls["n"] > 1
        assert any(not np.array_equal(trained[n], before[n]) for n in trained.names())

    def test_all_minus_inf_objective_survives(self):
        # nothing scorable: the archive stays empty and training is skipped
        class Hopeless:
            def score_batch(self, mols):
                return [float("-inf")] * len(mols)

        cfg = PolicyConfig.for_alphabet(CNO, d_model=32, n_layers=1, n_heads=2, ff_dim=32)
        params = PolicyParams.init(cfg, np.random.default_rng(0))
        hyper = learner.LearnConfig(top_s=4, beam_width=4, step_size=3, epochs=2,
                                    batches_per_epoch=2, batch_size=4, lr=1e-3, seed=0)
        archive, _, records = learner.run(
            params, Molecule.single_atom(CNO, 0), Hopeless(),
            Constraints.unrestricted(3), hyper,
        )
        assert len(archive) == 0
        assert archive.best is None
        assert len(records) == 2

    def test_initial_molecule_respected_with_frozen_atoms(self):
        # start from ethanol-like C-C-O with the hydroxyl oxygen frozen
        start = parse("CCO", CNO)
        cons = Constraints(max_atoms=6, frozen_atoms={2})
        cfg = PolicyConfig.for_alphabet(CNO, d_model=32, n_layers=1, n_heads=2, ff_dim=32)
        params = PolicyParams.init(cfg, np.random.default_rng(2))
        hyper = learner.LearnConfig(top_s=8, beam_width=8, step_size=6, epochs=2,
                                    batches_per_epoch=2, batch_size=8, lr=1e-3, seed=2)
        archive, _, _ = learner.run(params, start, AtomCountTarget(6), cons, hyper)
        for entry in archive.entries:
            m = entry.molecule
            assert list(m.atoms[:3]) == [0, 0, 2]
            assert np.array_equal(m.bonds[2, :3], start.bonds[2])
            assert not m.bonds[2, 3:].any()

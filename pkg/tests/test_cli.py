import csv
import json
from pathlib import Path

import pytest

from moldesign.cli import main

CORPUS = Path(__file__).resolve().parents[1] / "src" / "moldesign" / "data" / "corpus.smi"


def write_config(tmp_path, **overrides):
    config = {
        "alphabet": "solvent-CNO",
        "constraints": {"max_atoms": 4},
        "policy": {"d_model": 32, "n_layers": 1, "n_heads": 2, "ff_dim": 32},
        "hyper": {"top_s": 6, "beam_width": 8, "step_size": 6, "epochs": 2,
                  "batches_per_epoch": 2, "batch_size": 8, "lr": 1e-3, "seed": 0},
        "objective": {"type": "atom_count", "target": 4},
        "initial_molecule": "C",
        "output_dir": str(tmp_path / "run"),
    }
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


class TestDesign:
    def test_design_run_writes_outputs(self, tmp_path, capsys):
        config = write_config(tmp_path)
        assert main(["design", "--config", str(config)]) == 0
        out = tmp_path / "run"
        for name in ("best.csv", "best.json", "final.ckpt", "epochs.jsonl", "manifest.json"):
            assert (out / name).exists(), name
        with open(out / "best.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert rows and float(rows[0]["objective"]) == 4.0
        json_rows = json.loads((out / "best.json").read_text())
        assert len(json_rows) == len(rows)
        for a, b in zip(rows, json_rows):
            assert a["smiles"] == b["smiles"]
            assert float(a["objective"]) == b["objective"]
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["alphabet"] == "solvent-CNO"
        epochs = [json.loads(line) for line in (out / "epochs.jsonl").read_text().splitlines()]
        assert {"epoch", "best", "mean_top20", "archive_size", "sampled", "wall_ms"} <= set(epochs[0])

    def test_seed_repetition_reproduces_best_csv(self, tmp_path):
        config = write_config(tmp_path, precision="float64",
                             output_dir=str(tmp_path / "run_a"))
        assert main(["design", "--config", str(config)]) == 0
        config_b = write_config(tmp_path, precision="float64",
                                output_dir=str(tmp_path / "run_b"))
        assert main(["design", "--config", str(config_b)]) == 0
        a = (tmp_path / "run_a" / "best.csv").read_bytes()
        b = (tmp_path / "run_b" / "best.csv").read_bytes()
        assert a == b

    def test_manifest_is_accepted_as_config(self, tmp_path):
        config = write_config(tmp_path, precision="float64",
                              output_dir=str(tmp_path / "run_a"))
        assert main(["design", "--config", str(config)]) == 0
        manifest = tmp_path / "run_a" / "manifest.json"
        rerun = json.loads(manifest.read_text())
        rerun["config"]["output_dir"] = str(tmp_path / "run_b")
        manifest_b = tmp_path / "manifest_b.json"
        manifest_b.write_text(json.dumps(rerun))
        assert main(["design", "--config", str(manifest_b)]) == 0
        assert (tmp_path / "run_a" / "best.csv").read_bytes() == \
            (tmp_path / "run_b" / "best.csv").read_bytes()

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        config = write_config(tmp_path, extra_key=1)
        assert main(["design", "--config", str(config)]) == 2
        assert "unknown keys" in capsys.readouterr().err

    def test_bad_initial_molecule_exits_2(self, tmp_path):
        config = write_config(tmp_path, initial_molecule="C(((")
        assert main(["design", "--config", str(config)]) == 2

    def test_checkpoint_alphabet_mismatch_exits_2(self, tmp_path):
        import numpy as np
        from moldesign.alphabet import drug_full
        from moldesign.policy import PolicyConfig, PolicyParams, save_checkpoint

        other = drug_full()
        params = PolicyParams.init(
            PolicyConfig.for_alphabet(other, d_model=32, n_layers=1, n_heads=2, ff_dim=32),
            np.random.default_rng(0),
        )
        ckpt = tmp_path / "other.ckpt"
        save_checkpoint(params, other, ckpt)
        config = write_config(tmp_path)
        assert main(["design", "--config", str(config), "--checkpoint", str(ckpt)]) == 2

    def test_design_from_structure_with_frozen_group(self, tmp_path):
        config = write_config(
            tmp_path,
            initial_molecule="CCO",
            constraints={"max_atoms": 6, "frozen_atoms": [2],
                         "forbidden_patterns": ["solvent-stability"]},
            objective={"type": "atom_count", "target": 6},
        )
        assert main(["design", "--config", str(config)]) == 0
        rows = json.loads((tmp_path / "run" / "best.json").read_text())
        assert rows
        # every archived molecule keeps the untouched hydroxyl oxygen
        from moldesign.alphabet import solvent_cno
        from moldesign.molgraph import valence_slack
        from moldesign.smiles import parse as parse_smiles

        for row in rows:
            m = parse_smiles(row["smiles"], solvent_cno())
            oxygens = [i for i in range(m.n_atoms)
                       if m.spec(i).symbol == "O" and m.degree(i) == 1
                       and valence_slack(m, i) == 1]
            assert oxygens, row["smiles"]

    def test_unreachable_oracle_exits_3(self, tmp_path):
        config = write_config(
            tmp_path,
            objective={"type": "solvent_iba",
                       "oracle": {"command": ["/nonexistent/oracle"]}},
        )
        assert main(["design", "--config", str(config)]) == 3


class TestPretrainCommand:
    def test_small_corpus_pretrain(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.smi"
        corpus.write_text("# comment\nC\nCC\nC=O\nnot_a_molecule\n")
        config = write_config(tmp_path, pretrain={"epochs": 1, "batches_per_epoch": 2,
                                                  "batch_size": 4, "val_fraction": 0.0})
        ckpt = tmp_path / "model.ckpt"
        code = main(["pretrain", "--corpus", str(corpus), "--out", str(ckpt),
                     "--config", str(config)])
        assert code == 0
        assert ckpt.exists()
        out = capsys.readouterr().out
        assert "3 usable, 1 rejected" in out

    def test_single_line_corpus(self, tmp_path, capsys):
        corpus = tmp_path / "one.smi"
        corpus.write_text("C\n")
        config = write_config(tmp_path, pretrain={"epochs": 1, "batches_per_epoch": 1,
                                                  "batch_size": 2, "val_fraction": 0.0})
        ckpt = tmp_path / "model.ckpt"
        assert main(["pretrain", "--corpus", str(corpus), "--out", str(ckpt),
                     "--config", str(config)]) == 0
        assert "0 rejected" in capsys.readouterr().out

    def test_unusable_corpus_exits_2(self, tmp_path, capsys):
        corpus = tmp_path / "bad.smi"
        corpus.write_text("[Xe]\nnope\n")
        config = write_config(tmp_path)
        assert main(["pretrain", "--corpus", str(corpus), "--out",
                     str(tmp_path / "m.ckpt"), "--config", str(config)]) == 2

    def test_missing_corpus_exits_2(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["pretrain", "--corpus", str(tmp_path / "missing.smi"),
                     "--out", str(tmp_path / "m.ckpt"), "--config", str(config)]) == 2

    def test_pretrained_checkpoint_feeds_design(self, tmp_path):
        corpus = tmp_path / "corpus.smi"
        corpus.write_text("C\nCC\nCCC\nCCCC\n")
        config = write_config(tmp_path, pretrain={"epochs": 1, "batches_per_epoch": 2,
                                                  "batch_size": 4, "val_fraction": 0.0})
        ckpt = tmp_path / "pre.ckpt"
        assert main(["pretrain", "--corpus", str(corpus), "--out", str(ckpt),
                     "--config", str(config)]) == 0
        assert main(["design", "--config", str(config), "--checkpoint", str(ckpt)]) == 0
        assert (tmp_path / "run" / "best.csv").exists()

    def test_frozen_index_out_of_range_exits_2(self, tmp_path):
        config = write_config(tmp_path, constraints={"max_atoms": 4, "frozen_atoms": [5]})
        assert main(["design", "--config", str(config)]) == 2

    def test_enumerate_cap_exits_2(self, capsys):
        assert main(["enumerate", "--max-atoms", "7"]) == 2


class TestOracleCommands:
    def test_enumerate_two_carbon(self, capsys):
        code = main([
            "enumerate",
            "--alphabet", json.dumps({"specs": [{"symbol": "C", "atomic_number": 6, "valence": 4}],
                                      "max_bond_order": 3}),
            "--max-atoms", "2",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("count: 4")

    def test_score_isomer(self, capsys):
        assert main(["score", "--objective", json.dumps({"type": "isomer", "formula": "C4H10"}),
                     "--smiles", "CCCC", "CC(C)C", "C"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].endswith("1.0") and lines[1].endswith("1.0")
        assert lines[2].endswith("0.1")

    def test_roundtrip_bundled_corpus(self, capsys):
        assert main(["roundtrip", "--corpus", str(CORPUS)]) == 0
        out = capsys.readouterr().out
        assert "\nsummary: " in out
        head, _, tail = out.rpartition("summary: ")
        passed, total = tail.strip().split("/")
        assert passed == total.split()[0]

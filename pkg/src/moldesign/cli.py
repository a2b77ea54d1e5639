"""Command-line entry points: pretraining, design runs, and oracle commands
for enumeration, scoring, and round-trip checking.

Runs are configured by a single JSON document validated up front; unknown
keys are rejected. Exit codes: 0 success, 2 configuration error, 3 oracle
error, 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, learner
from .alphabet import Alphabet, load_preset
from .errors import (
    BudgetExceeded,
    ConfigError,
    MolDesignError,
    OracleTimeout,
    OracleUnreachable,
    ProtocolError,
    SmilesError,
)
from .molgraph import (
    Constraints,
    PatternRule,
    bond_rule,
    canonical_key,
    check_structural_constraints,
    enumerate_molecules,
    stability_pattern_rules,
)
from .objectives import (
    AtomCountTarget,
    Composite,
    IsomerFormula,
    OracleClient,
    SolventIBA,
    SolventTMB,
    SubstructureCount,
)
from .policy import PolicyConfig, PolicyParams, load_checkpoint, save_checkpoint
from .smiles import parse, read_corpus, to_action_trace, write
from .trainer import PretrainConfig, pretrain


def _require_keys(obj: dict, allowed: dict, context: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{context}: expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown keys {sorted(unknown)}")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ConfigError(f"{context}: missing required key '{key}'")


def _build_alphabet(spec) -> Alphabet:
    if isinstance(spec, str):
        try:
            return load_preset(spec)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(spec, dict):
        try:
            return Alphabet.from_json(spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"alphabet: {exc}") from exc
    raise ConfigError("alphabet: expected a preset name or an inline object")


def _build_pattern(obj) -> PatternRule:
    if isinstance(obj, dict) and "bond" in obj:
        _require_keys(obj, {"bond": True, "order": True, "unless": False}, "pattern")
        a, b = obj["bond"]
        unless = _build_pattern(obj["unless"]) if obj.get("unless") else None
        return bond_rule(a, b, int(obj["order"]), unless=unless)
    _require_keys(
        obj,
        {"center": True, "neighbors": False, "implicit_h": False,
         "exact": False, "unless": False},
        "pattern",
    )
    unless = _build_pattern(obj["unless"]) if obj.get("unless") else None
    return PatternRule(
        center=obj["center"],
        neighbors=tuple((s, int(o)) for s, o in obj.get("neighbors", [])),
        implicit_h=obj.get("implicit_h"),
        exact=bool(obj.get("exact", False)),
        unless=unless,
    )


def _build_constraints(obj, initial_n: int) -> Constraints:
    _require_keys(
        obj,
        {"max_atoms": False, "allowed_ring_sizes": False,
         "forbidden_patterns": False, "frozen_atoms": False},
        "constraints",
    )
    patterns = []
    for entry in obj.get("forbidden_patterns", []):
        if entry == "solvent-stability":
            patterns.extend(stability_pattern_rules())
        else:
            patterns.append(_build_pattern(entry))
    max_atoms = int(obj.get("max_atoms", 25))
    if max_atoms < initial_n:
        raise ConfigError(
            f"constraints.max_atoms={max_atoms} below initial molecule size {initial_n}"
        )
    frozen = obj.get("frozen_atoms", [])
    if any(not 0 <= int(i) < initial_n for i in frozen):
        raise ConfigError("constraints.frozen_atoms: index outside the initial molecule")
    rings = obj.get("allowed_ring_sizes")
    return Constraints(
        max_atoms=max_atoms,
        allowed_ring_sizes=frozenset(int(s) for s in rings) if rings is not None else None,
        forbidden_patterns=tuple(patterns),
        frozen_atoms=frozenset(int(i) for i in frozen),
    )


def _build_objective(obj, alphabet: Alphabet):
    _require_keys(
        obj,
        {"type": True, "formula": False, "target": False, "pattern": False,
         "weight": False, "min_slack": False, "temperature": False, "oracle": False,
         "iba_smiles": False, "water_smiles": False, "tmb_smiles": False,
         "dmba_smiles": False, "parts": False, "timeout": False},
        "objective",
    )
    kind = obj["type"]
    if kind == "isomer":
        return IsomerFormula(obj["formula"])
    if kind == "atom_count":
        return AtomCountTarget(int(obj["target"]))
    if kind == "substructure":
        pattern = parse(obj["pattern"], alphabet)
        return SubstructureCount(pattern, weight=float(obj.get("weight", 1.0)),
                                 min_slack=obj.get("min_slack"))
    if kind == "composite":
        parts = [
            (float(p["weight"]), _build_objective(p["objective"], alphabet))
            for p in obj["parts"]
        ]
        return Composite(parts)
    if kind in ("solvent_iba", "solvent_tmb"):
        oracle_spec = obj.get("oracle", {})
        _require_keys(oracle_spec, {"command": False, "tcp": False}, "objective.oracle")
        client = OracleClient(
            command=oracle_spec.get("command"),
            tcp=tuple(oracle_spec["tcp"]) if oracle_spec.get("tcp") else None,
            timeout=float(obj.get("timeout", 30.0)),
        )
        temperature = float(obj.get("temperature", 298.0))
        if kind == "solvent_iba":
            kwargs = {}
            if "iba_smiles" in obj:
                kwargs["iba_smiles"] = obj["iba_smiles"]
            if "water_smiles" in obj:
                kwargs["water_smiles"] = obj["water_smiles"]
            return SolventIBA(client, temperature, **kwargs)
        for required in ("tmb_smiles", "dmba_smiles"):
            if required not in obj:
                raise ConfigError(f"objective: solvent_tmb requires '{required}'")
        kwargs = {"water_smiles": obj["water_smiles"]} if "water_smiles" in obj else {}
        return SolventTMB(client, obj["tmb_smiles"], obj["dmba_smiles"], temperature, **kwargs)
    raise ConfigError(f"objective: unknown type {kind!r}")


RUN_CONFIG_KEYS = {
    "alphabet": True, "constraints": False, "policy": False, "hyper": False,
    "objective": False, "initial_molecule": False, "output_dir": False,
    "precision": False, "pretrain": False,
}
HYPER_KEYS = {
    "top_s": False, "beam_width": False, "step_size": False, "epochs": False,
    "batches_per_epoch": False, "batch_size": False, "lr": False, "seed": False,
    "budget_factor": False, "train_full": False, "patience": False,
    "wall_clock_limit": False,
}
POLICY_KEYS = {
    "d_model": False, "n_layers": False, "n_heads": False, "ff_dim": False,
    "max_degree": False, "dropout": False,
}
PRETRAIN_KEYS = {
    "epochs": False, "batches_per_epoch": False, "batch_size": False,
    "lr": False, "dropout": False, "val_fraction": False, "seed": False,
}


class RunConfig:
    """Validated run configuration."""

    def __init__(self, raw: dict):
        _require_keys(raw, RUN_CONFIG_KEYS, "config")
        self.raw = raw
        self.alphabet = _build_alphabet(raw["alphabet"])
        self.precision = raw.get("precision", "float32")
        if self.precision not in ("float32", "float64"):
            raise ConfigError("precision must be 'float32' or 'float64'")
        self.dtype = np.float32 if self.precision == "float32" else np.float64

        initial = raw.get("initial_molecule", "C")
        try:
            self.initial_molecule = parse(initial, self.alphabet)
        except SmilesError as exc:
            raise ConfigError(f"initial_molecule: {exc}") from exc

        self.constraints = _build_constraints(
            raw.get("constraints", {}), self.initial_molecule.n_atoms
        )
        ok, violations = check_structural_constraints(self.initial_molecule, self.constraints)
        if not ok:
            raise ConfigError(f"initial molecule violates constraints: {violations}")

        policy_obj = dict(raw.get("policy", {}))
        _require_keys(policy_obj, POLICY_KEYS, "policy")
        try:
            self.policy = PolicyConfig.for_alphabet(self.alphabet, **policy_obj)
        except ValueError as exc:
            raise ConfigError(f"policy: {exc}") from exc

        hyper_obj = dict(raw.get("hyper", {}))
        _require_keys(hyper_obj, HYPER_KEYS, "hyper")
        try:
            self.hyper = learner.LearnConfig(**hyper_obj)
        except TypeError as exc:
            raise ConfigError(f"hyper: {exc}") from exc

        pre_obj = dict(raw.get("pretrain", {}))
        _require_keys(pre_obj, PRETRAIN_KEYS, "pretrain")
        self.pretrain_options = PretrainConfig(**pre_obj)

        self._objective_spec = raw.get("objective")
        self.output_dir = Path(raw.get("output_dir", "runs/latest"))

    def build_objective(self):
        if self._objective_spec is None:
            raise ConfigError("config has no 'objective' section")
        return _build_objective(self._objective_spec, self.alphabet)


def _alphabet_arg(text: str) -> Alphabet:
    if text.strip().startswith("{"):
        try:
            return _build_alphabet(json.loads(text))
        except ValueError as exc:
            raise ConfigError(f"--alphabet: {exc}") from exc
    return _build_alphabet(text)


def _read_corpus_checked(path) -> list:
    try:
        return read_corpus(path)
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if "config" in raw and "manifest_version" in raw:
        raw = raw["config"]  # accept a run manifest for reproduction
    return RunConfig(raw)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


# --- commands ---

def cmd_pretrain(args) -> int:
    config = load_config(args.config)
    strings = _read_corpus_checked(args.corpus)
    if not strings:
        print("error: corpus is empty", file=sys.stderr)
        return 2
    traces = []
    rejects = 0
    for s in strings:
        try:
            traces.append(to_action_trace(parse(s, config.alphabet)))
        except (SmilesError, MolDesignError) as exc:
            rejects += 1
            print(f"reject: {s!r}: {exc}", file=sys.stderr)
    print(f"corpus: {len(strings)} lines, {len(traces)} usable, {rejects} rejected")
    if not traces:
        print("error: no usable molecules in corpus (EmptyCorpus)", file=sys.stderr)
        return 2
    rng = np.random.default_rng(config.pretrain_options.seed)
    params = PolicyParams.init(config.policy, rng, dtype=config.dtype)
    params, history = pretrain(params, traces, config.pretrain_options)
    for record in history:
        print(json.dumps(record))
    save_checkpoint(params, config.alphabet, args.out)
    print(f"checkpoint written to {args.out}")
    return 0


def cmd_design(args) -> int:
    config = load_config(args.config)
    if args.checkpoint:
        params, ck_alphabet = load_checkpoint(args.checkpoint)
        if ck_alphabet.digest() != config.alphabet.digest():
            raise ConfigError("checkpoint alphabet does not match the run configuration")
        if params.config != config.policy:
            raise ConfigError("checkpoint policy dimensions do not match the run configuration")
        params = params.astype(config.dtype)
    else:
        rng = np.random.default_rng(config.hyper.seed)
        params = PolicyParams.init(config.policy, rng, dtype=config.dtype)

    objective = config.build_objective()
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)

    epoch_log = open(out / "epochs.jsonl", "w", encoding="utf-8")

    def progress(record):
        epoch_log.write(json.dumps(record) + "\n")
        epoch_log.flush()
        print(json.dumps(record))

    try:
        archive, params, _ = learner.run(
            params,
            config.initial_molecule,
            objective,
            config.constraints,
            config.hyper,
            progress=progress,
        )
    finally:
        epoch_log.close()
        closer = getattr(objective, "oracle", None)
        if closer is not None:
            closer.close()

    rows = [
        {"rank": i + 1, "smiles": write(e.molecule), "objective": e.value,
         "epoch_found": e.epoch}
        for i, e in enumerate(archive.entries)
    ]
    with open(out / "best.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["rank", "smiles", "objective", "epoch_found"])
        writer.writeheader()
        writer.writerows(rows)
    with open(out / "best.json", "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2)
        fh.write("\n")
    ckpt_path = out / "final.ckpt"
    save_checkpoint(params.astype(np.float32), config.alphabet, ckpt_path)
    manifest = {
        "manifest_version": 1,
        "package_version": __version__,
        "config": config.raw,
        "seed": config.hyper.seed,
        "alphabet_digest": config.alphabet.digest(),
        "input_checkpoint": _sha256(args.checkpoint) if args.checkpoint else None,
        "final_checkpoint": _sha256(ckpt_path),
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    best = archive.best if len(archive) else float("-inf")
    print(f"done: archive size {len(archive)}, best objective {best}")
    return 0


def cmd_enumerate(args) -> int:
    if args.alphabet:
        alphabet = _alphabet_arg(args.alphabet)
    else:
        alphabet = load_preset("solvent-CNO")
    if args.max_bond_order:
        alphabet = Alphabet(specs=alphabet.specs, max_bond_order=args.max_bond_order)
    constraints = Constraints.unrestricted(args.max_atoms)
    try:
        mols = enumerate_molecules(alphabet, constraints, args.max_atoms)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"count: {len(mols)}")
    for m in sorted(mols.values(), key=lambda m: (m.n_atoms, write(m))):
        print(write(m))
    return 0


def cmd_score(args) -> int:
    spec = json.loads(args.objective)
    alphabet = _alphabet_arg(args.alphabet) if args.alphabet else load_preset("solvent-CNO")
    objective = _build_objective(spec, alphabet)
    mols = [parse(s, alphabet) for s in args.smiles]
    try:
        for s, value in zip(args.smiles, objective.score_batch(mols)):
            print(f"{s}\t{value}")
    finally:
        closer = getattr(objective, "oracle", None)
        if closer is not None:
            closer.close()
    return 0


def cmd_roundtrip(args) -> int:
    alphabet = _alphabet_arg(args.alphabet) if args.alphabet else load_preset("drug-full")
    strings = _read_corpus_checked(args.corpus)
    failures = 0
    for s in strings:
        try:
            m = parse(s, alphabet)
            again = parse(write(m), alphabet)
            ok = canonical_key(again) == canonical_key(m)
        except (SmilesError, MolDesignError):
            ok = False
        print(f"{'pass' if ok else 'FAIL'}\t{s}")
        failures += 0 if ok else 1
    print(f"summary: {len(strings) - failures}/{len(strings)} pass")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="moldesign",
        description="Molecular design by sequential graph edits with a learned policy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pretrain", help="train next-action prediction on a SMILES corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("design", help="run the optimization loop")
    p.add_argument("--config", required=True)
    p.add_argument("--checkpoint")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("enumerate", help="exhaustively enumerate small molecules")
    p.add_argument("--alphabet")
    p.add_argument("--max-atoms", type=int, required=True)
    p.add_argument("--max-bond-order", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("score", help="score SMILES with an objective spec (JSON)")
    p.add_argument("--objective", required=True)
    p.add_argument("--alphabet")
    p.add_argument("--smiles", nargs="+", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("roundtrip", help="parse/write/parse every corpus line")
    p.add_argument("--corpus", required=True)
    p.add_argument("--alphabet")
    p.set_defaults(func=cmd_roundtrip)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OracleUnreachable, OracleTimeout, ProtocolError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return 3
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except SmilesError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

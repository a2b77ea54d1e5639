"""Objective functions over molecules. All return floats with -inf marking
invalid or unscorable candidates; score_batch never raises for per-molecule
failures, only for systemic ones (e.g. an unreachable oracle)."""

from __future__ import annotations

import math
import re
from typing import Optional

from ..errors import SmilesError
from ..molgraph import Molecule, valence_slack
from ..smiles import write
from .solvent import solvent_iba_objective, solvent_tmb_objective
from .subiso import count_embeddings

_FORMULA_TOKEN = re.compile(r"([A-Z][a-z]?)(\d*)")

WATER_SMILES = "O"
IBA_SMILES = "CC(C)CO"


def parse_formula(formula: str) -> dict:
    """'C4H10' -> {'C': 4, 'H': 10}."""
    counts: dict = {}
    pos = 0
    for match in _FORMULA_TOKEN.finditer(formula):
        if match.start() != pos:
            raise ValueError(f"bad formula {formula!r} at offset {pos}")
        element, digits = match.groups()
        counts[element] = counts.get(element, 0) + (int(digits) if digits else 1)
        pos = match.end()
    if pos != len(formula) or not counts:
        raise ValueError(f"bad formula {formula!r}")
    return counts


def molecular_formula(m: Molecule) -> dict:
    """Element counts including implicit hydrogens (charged variants count
    as their base element)."""
    counts: dict = {}
    hydrogens = 0
    for i in range(m.n_atoms):
        spec = m.spec(i)
        counts[spec.element] = counts.get(spec.element, 0) + 1
        hydrogens += valence_slack(m, i)
    if hydrogens:
        counts["H"] = counts.get("H", 0) + hydrogens
    return counts


def isomer_score(m: Molecule, target) -> float:
    """1.0 on an exact formula match, else 1/(1 + L1 distance of counts)."""
    target = parse_formula(target) if isinstance(target, str) else dict(target)
    actual = molecular_formula(m)
    distance = 0
    for element in set(actual) | set(target):
        distance += abs(actual.get(element, 0) - target.get(element, 0))
    return 1.0 / (1.0 + distance)


def substructure_count(m: Molecule, pattern: Molecule, min_slack=None) -> int:
    """Embeddings of `pattern` in `m` modulo pattern automorphisms."""
    return count_embeddings(m, pattern, min_slack=min_slack)


class IsomerFormula:
    def __init__(self, formula):
        self.target = parse_formula(formula) if isinstance(formula, str) else dict(formula)

    def score_batch(self, mols: list) -> list:
        return [isomer_score(m, self.target) for m in mols]


class SubstructureCount:
    def __init__(self, pattern: Molecule, weight: float = 1.0, min_slack=None):
        if not math.isfinite(weight):
            raise ValueError("weight must be finite")
        self.pattern = pattern
        self.weight = weight
        self.min_slack = min_slack

    def score_batch(self, mols: list) -> list:
        return [
            self.weight * count_embeddings(m, self.pattern, self.min_slack) for m in mols
        ]


class AtomCountTarget:
    """target - |n - target|: increases up to the target size, then decays."""

    def __init__(self, target: int):
        self.target = int(target)

    def score_batch(self, mols: list) -> list:
        return [float(self.target - abs(m.n_atoms - self.target)) for m in mols]


class Composite:
    def __init__(self, parts: list):
        for weight, _ in parts:
            if not math.isfinite(weight):
                raise ValueError("weights must be finite")
        self.parts = list(parts)

    def score_batch(self, mols: list) -> list:
        totals = [0.0] * len(mols)
        for weight, objective in self.parts:
            for i, value in enumerate(objective.score_batch(mols)):
                totals[i] += weight * value
        return totals


class _SolventObjective:
    """Shared plumbing: write solvents, batch-query the oracle once, map
    failures to -inf."""

    def __init__(self, oracle, temperature: float):
        if not temperature > 0:
            raise ValueError("temperature must be positive (kelvin)")
        self.oracle = oracle
        self.temperature = temperature

    def _solvent_smiles(self, mols: list) -> list:
        out = []
        for m in mols:
            try:
                out.append(write(m))
            except SmilesError:
                out.append(None)
        return out

    def pairs_for(self, solvent: str) -> list:
        raise NotImplementedError

    def combine(self, ln_gammas: list) -> float:
        raise NotImplementedError

    def score_batch(self, mols: list) -> list:
        smiles = self._solvent_smiles(mols)
        pairs = []
        for s in smiles:
            if s is not None:
                pairs.extend(self.pairs_for(s))
        answers = iter(self.oracle.query(pairs)) if pairs else iter(())
        width = len(self.pairs_for("C"))
        scores = []
        for s in smiles:
            if s is None:
                scores.append(float("-inf"))
                continue
            values = [next(answers) for _ in range(width)]
            if any(v is None for v in values):
                scores.append(float("-inf"))
            else:
                scores.append(self.combine(values))
        return scores


class SolventIBA(_SolventObjective):
    """Isobutanol/water extraction objective over oracle-supplied gammas."""

    def __init__(self, oracle, temperature: float = 298.0,
                 iba_smiles: str = IBA_SMILES, water_smiles: str = WATER_SMILES):
        super().__init__(oracle, temperature)
        self.iba = iba_smiles
        self.water = water_smiles

    def pairs_for(self, solvent: str) -> list:
        t = self.temperature
        return [
            (self.iba, solvent, t),
            (solvent, self.water, t),
            (self.water, solvent, t),
        ]

    def combine(self, ln_gammas: list) -> float:
        g_iba_s, g_s_w, g_w_s = (math.exp(v) for v in ln_gammas)
        return solvent_iba_objective(g_iba_s, g_s_w, g_w_s)


class SolventTMB(_SolventObjective):
    """TMB-vs-DMBA selectivity objective; product/educt strings supplied by
    configuration."""

    def __init__(self, oracle, tmb_smiles: str, dmba_smiles: str,
                 temperature: float = 298.0, water_smiles: str = WATER_SMILES):
        super().__init__(oracle, temperature)
        self.tmb = tmb_smiles
        self.dmba = dmba_smiles
        self.water = water_smiles

    def pairs_for(self, solvent: str) -> list:
        t = self.temperature
        return [
            (self.tmb, solvent, t),
            (self.dmba, solvent, t),
            (solvent, self.water, t),
            (self.water, solvent, t),
        ]

    def combine(self, ln_gammas: list) -> float:
        g_tmb_s, g_dmba_s, g_s_w, g_w_s = (math.exp(v) for v in ln_gammas)
        return solvent_tmb_objective(g_tmb_s, g_dmba_s, g_s_w, g_w_s)

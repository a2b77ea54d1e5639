"""Objective functions: graph-native built-ins, solvent-design combinators,
and the external oracle client."""

from .builtins import (
    IBA_SMILES,
    WATER_SMILES,
    AtomCountTarget,
    Composite,
    IsomerFormula,
    SolventIBA,
    SolventTMB,
    SubstructureCount,
    isomer_score,
    molecular_formula,
    parse_formula,
    substructure_count,
)
from .oracle import ENV_COMMAND_OVERRIDE, OracleClient
from .solvent import (
    MISCIBILITY_THRESHOLD,
    miscibility_penalty,
    solvent_iba_objective,
    solvent_tmb_objective,
)
from .subiso import count_embeddings

__all__ = [
    "AtomCountTarget", "Composite", "ENV_COMMAND_OVERRIDE", "IBA_SMILES",
    "IsomerFormula", "MISCIBILITY_THRESHOLD", "OracleClient", "SolventIBA",
    "SolventTMB", "SubstructureCount", "WATER_SMILES", "count_embeddings",
    "isomer_score", "miscibility_penalty", "molecular_formula", "parse_formula",
    "solvent_iba_objective", "solvent_tmb_objective", "substructure_count",
]

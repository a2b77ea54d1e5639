"""Exception types shared across the package."""


class MolDesignError(Exception):
    """Base class for all package errors."""


# --- graph / masking ---

class InfeasibleAction(MolDesignError):
    """An action failed validation on apply. Indicates a caller bug:
    the masking engine should have excluded it."""


class BudgetExceeded(MolDesignError):
    """Exhaustive enumeration passed its configured state cap."""


# --- SMILES ---

class SmilesError(MolDesignError):
    """Base for SMILES parsing/writing failures."""


class SmilesSyntaxError(SmilesError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnsupportedAtom(SmilesError):
    pass


class KekulizationFailure(SmilesError):
    pass


class ValenceViolation(SmilesError):
    pass


class DisconnectedMolecule(SmilesError):
    pass


# --- policy / training ---

class ShapeMismatch(MolDesignError):
    pass


class EmptyFeasibleSet(MolDesignError):
    pass


class CorruptCheckpoint(MolDesignError):
    pass


class TargetMasked(MolDesignError):
    """A training target is infeasible under the molecule's mask."""


class NonFiniteGradient(MolDesignError):
    pass


class EmptyCorpus(MolDesignError):
    pass


# --- objectives / oracle ---

class NonPositiveGamma(MolDesignError):
    pass


class OracleUnreachable(MolDesignError):
    pass


class OracleTimeout(MolDesignError):
    pass


class ProtocolError(MolDesignError):
    pass


# --- configuration ---

class ConfigError(MolDesignError):
    pass

"""SMILES subset parsing/writing and action-trace conversion."""

from .parser import parse
from .trace import ActionTrace, encode_action, replay, to_action_trace, to_subactions
from .writer import write


def read_corpus(path) -> list:
    """SMILES strings from a UTF-8 file, one per line; '#' lines and blanks skipped."""
    strings = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                strings.append(line)
    return strings


__all__ = [
    "ActionTrace", "encode_action", "parse", "read_corpus", "replay",
    "to_action_trace", "to_subactions", "write",
]

"""Tiny abstract decision trees and rigged policies used to test the sampler
against exact enumeration."""

from __future__ import annotations

import numpy as np


class ToyState:
    """Duck-typed stand-in for DesignState over an explicit tree.

    The tree maps a path tuple to a list of (choice, probability) pairs;
    a missing or empty entry marks a leaf.
    """

    __slots__ = ("tree", "path", "done")

    def __init__(self, tree, path=()):
        self.tree = tree
        self.path = path
        self.done = not tree.get(path)

    def feasible_actions(self):
        return [c for c, _ in self.tree[self.path]]

    def clone(self):
        return ToyState(self.tree, self.path)

    def step(self, choice, check=False):
        self.path = self.path + (choice,)
        self.done = not self.tree.get(self.path)

    def to_molecule(self):
        return self.path


class ToyPolicy:
    def __init__(self, tree):
        self.tree = tree

    def log_probs(self, states):
        out = []
        for s in states:
            entries = self.tree[s.path]
            out.append(([c for c, _ in entries], np.log([p for _, p in entries])))
        return out


class PathObjective:
    """Scores toy 'molecules' (paths) from a table; unknown paths get -inf."""

    def __init__(self, table):
        self.table = table

    def score_batch(self, paths):
        return [self.table.get(p, float("-inf")) for p in paths]


def leaf_probabilities(tree, path=(), prob=1.0, acc=None):
    if acc is None:
        acc = {}
    kids = tree.get(path)
    if not kids:
        acc[path] = prob
        return acc
    for choice, p in kids:
        leaf_probabilities(tree, path + (choice,), prob * p, acc)
    return acc


TREE_A = {
    (): [(0, 0.5), (1, 0.3), (2, 0.2)],
    (0,): [(0, 0.7), (1, 0.3)],
    (1,): [(0, 0.1), (1, 0.9)],
    (2,): [(0, 0.4), (1, 0.6)],
}

TREE_B = {
    (): [(0, 0.85), (1, 0.15)],
    (0,): [(0, 0.5), (1, 0.5)],
    (1,): [(0, 0.2), (1, 0.2), (2, 0.6)],
    (1, 2): [(0, 0.3), (1, 0.7)],
}

TREE_C = {
    (): [(0, 1.0 / 3), (1, 1.0 / 3), (2, 1.0 / 3)],
    (0,): [(0, 0.99), (1, 0.01)],
}

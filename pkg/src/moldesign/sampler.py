"""Sequence sampling without replacement and the step-and-reconsider driver.

Stochastic beam search perturbs cumulative log-probabilities with conditional
Gumbel noise: children of a node with perturbed score G receive independent
Gumbel(phi_i) draws whose maximum is then shifted to equal G, computed in a
cancellation-free form. Keeping the top-beta perturbed scores at every depth
yields distinct sequences distributed as sampling without replacement.

The TASAR loop alternates sampling with committing: after each beam, the best
sequence found so far is followed for a fixed number of sub-actions and the
search re-expands from that prefix, skipping sequences seen earlier.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .molgraph import Constraints, DesignState, Molecule
from .molgraph.state import to_logit_index
from .policy import PolicyParams, forward, masked_distribution


class NetworkPolicy:
    """Batched conditional log-probabilities from the transformer."""

    def __init__(self, params: PolicyParams):
        self.params = params

    def log_probs(self, states: list) -> list:
        """Per state: (feasible choices, aligned log-probabilities)."""
        feasibles = [s.feasible_actions() for s in states]
        views = [s.network_view() for s in states]
        logits, _ = forward(self.params, views)
        out = []
        for state, choices, vec in zip(states, feasibles, logits):
            idx = [to_logit_index(state.level, c) for c in choices]
            probs = masked_distribution(vec, idx)
            out.append((choices, np.log(probs[idx])))
        return out


@dataclass
class BeamNode:
    state: DesignState
    trace: tuple
    logp: float          # cumulative log-probability, <= 0
    score: float         # Gumbel-perturbed log-probability
    terminated: bool


def _log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(x)) for x <= 0, stable at both ends; -inf at x == 0."""
    out = np.empty_like(x)
    lo = x < -np.log(2.0)
    with np.errstate(divide="ignore"):
        out[lo] = np.log1p(-np.exp(x[lo]))
        out[~lo] = np.log(-np.expm1(x[~lo]))
    return out


def _conditional_gumbels(g: np.ndarray, target_max: float) -> np.ndarray:
    """Shift raw Gumbels so their maximum equals target_max (Gumbel-max
    conditioning), without exp-space cancellation."""
    Z = g.max()
    v = target_max - g + _log1mexp(g - Z)
    return target_max - np.maximum(v, 0.0) - np.log1p(np.exp(-np.abs(v)))


def stochastic_beam_search(
    policy,
    root: DesignState,
    beam_width: int,
    rng: np.random.Generator,
) -> list:
    """Up to beam_width distinct terminated traces, highest perturbed score
    first. The root state is not mutated."""
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    beam = [BeamNode(state=root.clone(), trace=(), logp=0.0, score=0.0,
                     terminated=root.done)]
    while True:
        live = [n for n in beam if not n.terminated]
        if not live:
            break
        done = [n for n in beam if n.terminated]
        stepped = policy.log_probs([n.state for n in live])
        candidates = [(n.score, n.logp, n, None) for n in done]
        for node, (choices, logps) in zip(live, stepped):
            phis = node.logp + logps
            raw = phis + rng.gumbel(size=len(phis))
            scores = _conditional_gumbels(raw, node.score)
            for choice, phi, score in zip(choices, phis, scores):
                candidates.append((float(score), float(phi), node, choice))
        candidates.sort(key=lambda c: (-c[0], c[2].trace, c[3] if c[3] is not None else -1))
        beam = []
        for score, phi, node, choice in candidates[:beam_width]:
            if choice is None:
                beam.append(node)
            else:
                state = node.state.clone()
                state.step(choice)
                beam.append(
                    BeamNode(state=state, trace=node.trace + (choice,), logp=phi,
                             score=score, terminated=state.done)
                )
    beam.sort(key=lambda n: -n.score)
    return beam


@dataclass
class ScoredTrace:
    subactions: tuple
    molecule: Molecule
    value: float
    logp: float


@dataclass
class TasarState:
    committed: tuple = ()
    rounds: int = 0
    seen: set = None
    incumbent: Optional[ScoredTrace] = None


def tasar_sample(
    policy,
    m0: Molecule,
    constraints: Constraints,
    beam_width: int,
    step_size: int,
    objective,
    budget: int,
    rng: np.random.Generator,
) -> list:
    """Sample scored traces by repeated beam search with prefix commitment.

    step_size counts sub-actions. Traces are deduplicated across rounds by
    their exact sub-action sequence; molecules behind distinct traces may
    repeat. Per-trace objective failures score -inf; the traces are still
    returned and counted against the budget.
    """
    if step_size < 1:
        raise ValueError("step_size must be >= 1")
    if budget < beam_width:
        raise ValueError("budget must be at least beam_width")
    state = TasarState(seen=set())
    if isinstance(m0, Molecule):
        root = DesignState.from_molecule(m0, constraints)
    else:
        root = m0  # prebuilt state-like root (tests, custom spaces)
    scored: list = []

    while True:
        start = root.clone()
        for choice in state.committed:
            start.step(choice)
        if start.done:
            break
        leaves = stochastic_beam_search(policy, start, beam_width, rng)
        state.rounds += 1
        fresh = []
        for leaf in leaves:
            full = state.committed + leaf.trace
            if full in state.seen:
                continue
            state.seen.add(full)
            fresh.append((full, leaf))
        if fresh:
            mols = [leaf.state.to_molecule() for _, leaf in fresh]
            values = objective.score_batch(mols)
            for (full, leaf), mol, value in zip(fresh, mols, values):
                entry = ScoredTrace(
                    subactions=full,
                    molecule=mol,
                    value=float(value),
                    logp=leaf.logp,
                )
                scored.append(entry)
                if state.incumbent is None or entry.value > state.incumbent.value:
                    state.incumbent = entry
        if len(scored) >= budget:
            break
        if state.incumbent is None:
            break
        state.committed = state.incumbent.subactions[: len(state.committed) + step_size]
        if len(state.committed) >= len(state.incumbent.subactions):
            break
    return scored

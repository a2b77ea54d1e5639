"""Loss, optimizer, and the self-supervised pretraining driver."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyCorpus, NonFiniteGradient, TargetMasked
from .molgraph import Constraints, DesignState
from .molgraph.state import to_logit_index
from .policy import PolicyParams, backward, forward, masked_distribution
from .smiles import ActionTrace, to_subactions


@dataclass
class TrainItem:
    """One supervised position: a design state snapshot, the feasible set,
    and the target, both in logits-index space for the item's level."""

    view: dict
    feasible: list
    target: int


@dataclass
class OptimState:
    """Adam accumulator state. lr/betas/eps are standard transformer-training
    defaults; the reference work does not specify an optimizer."""

    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: Optional[float] = 1.0
    step_count: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def positions_from_trace(
    subactions: list,
    initial_state: DesignState,
) -> list:
    """Expand a flat sub-action trace into supervised (state, target) items."""
    state = initial_state
    items = []
    for choice in subactions:
        feasible = state.feasible_actions()
        if choice not in feasible:
            raise TargetMasked(
                f"target {choice} infeasible at level {state.level} (n={state.n_atoms})"
            )
        level = state.level
        items.append(
            TrainItem(
                view=state.network_view(),
                feasible=[to_logit_index(level, c) for c in feasible],
                target=to_logit_index(level, choice),
            )
        )
        state.step(choice)
    return items


def trace_positions(trace: ActionTrace, constraints: Constraints) -> list:
    state = DesignState.from_molecule(trace.initial, constraints)
    return positions_from_trace(to_subactions(trace), state)


def cross_entropy_loss(
    params: PolicyParams,
    batch: list,
    dropout: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    trainable: Optional[list] = None,
):
    """Mean negative log-likelihood of the targets under the masked policy.

    Returns (loss, grads). Gradients of logits outside the feasible set are
    exactly zero (masking happens before normalization). `trainable` limits
    the returned gradient dict to those tensor names.
    """
    if not batch:
        raise ValueError("empty batch")
    logits, cache = forward(params, [item.view for item in batch], dropout=dropout, rng=rng)
    total = 0.0
    dlogits = []
    inv_b = 1.0 / len(batch)
    for item, vec in zip(batch, logits):
        if item.target not in item.feasible:
            raise TargetMasked(f"target {item.target} not in feasible set {item.feasible}")
        probs = masked_distribution(vec, item.feasible)
        p_target = probs[item.target]
        total -= np.log(max(p_target, 1e-300))
        grad = probs * inv_b
        grad[item.target] -= inv_b
        dlogits.append(grad.astype(params.dtype))
    grads = backward(cache, dlogits)
    if trainable is not None:
        keep = set(trainable)
        grads = {n: g for n, g in grads.items() if n in keep}
    return total * inv_b, grads


def global_norm(grads: dict) -> float:
    return float(np.sqrt(sum(float((g.astype(np.float64) ** 2).sum()) for g in grads.values())))


def optimizer_step(params: PolicyParams, grads: dict, state: OptimState):
    """One Adam update over the tensors present in `grads`; returns
    (new_params, state). Raises NonFiniteGradient on NaN/inf gradients."""
    norm = global_norm(grads)
    if not np.isfinite(norm):
        raise NonFiniteGradient(f"gradient norm is {norm}")
    scale = 1.0
    if state.clip_norm is not None and norm > state.clip_norm:
        scale = state.clip_norm / norm
    state.step_count += 1
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1 ** state.step_count
    bias2 = 1.0 - b2 ** state.step_count
    new_tensors = dict(params.tensors)
    for name, g in grads.items():
        g = g * scale
        m = state.m.get(name)
        if m is None:
            m = np.zeros_like(g, dtype=np.float64)
            state.m[name] = m
            state.v[name] = np.zeros_like(g, dtype=np.float64)
        v = state.v[name]
        m *= b1
        m += (1 - b1) * g
        v *= b2
        v += (1 - b2) * np.square(g, dtype=np.float64)
        update = state.lr * (m / bias1) / (np.sqrt(v / bias2) + state.eps)
        new_tensors[name] = (params[name] - update).astype(params.dtype)
    return PolicyParams(params.config, new_tensors), state


@dataclass
class PretrainConfig:
    epochs: int = 5
    batches_per_epoch: int = 200
    batch_size: int = 32
    lr: float = 3e-4
    dropout: Optional[float] = None  # None: use the policy config's rate
    val_fraction: float = 0.1
    seed: int = 0
    log_path: Optional[str] = None


def pretrain(params: PolicyParams, traces: list, options: PretrainConfig,
             constraints: Optional[Constraints] = None):
    """Next-sub-action training over all positions of all traces.

    Positions are sampled uniformly across the corpus. Returns
    (params, history) where history has one dict per epoch with train/val
    losses. Training is reproducible given the seed.
    """
    if not traces:
        raise EmptyCorpus("no usable traces in corpus")
    rng = np.random.default_rng(options.seed)

    all_items = []
    for trace in traces:
        cons = constraints or Constraints.unrestricted(max(trace.initial.n_atoms, 2) + len(trace.steps))
        all_items.append(trace_positions(trace, cons))
    n_val = int(len(all_items) * options.val_fraction)
    val_items = [it for group in all_items[:n_val] for it in group]
    train_items = [it for group in all_items[n_val:] for it in group]
    if not train_items:
        raise EmptyCorpus("corpus has no training positions")

    optim = OptimState(lr=options.lr)
    dropout = params.config.dropout if options.dropout is None else options.dropout
    history = []
    log_fh = open(options.log_path, "a", newline="") if options.log_path else None
    writer = csv.writer(log_fh) if log_fh else None
    if writer and log_fh.tell() == 0:
        writer.writerow(["epoch", "batch", "loss", "grad_norm", "wall_ms"])
    try:
        for epoch in range(options.epochs):
            epoch_loss = 0.0
            for b in range(options.batches_per_epoch):
                t0 = time.perf_counter()
                idx = rng.integers(0, len(train_items), size=options.batch_size)
                batch = [train_items[i] for i in idx]
                loss, grads = cross_entropy_loss(
                    params, batch, dropout=dropout, rng=rng
                )
                norm = global_norm(grads)
                params, optim = optimizer_step(params, grads, optim)
                epoch_loss += loss
                if writer:
                    writer.writerow(
                        [epoch, b, f"{loss:.6f}", f"{norm:.6f}",
                         f"{(time.perf_counter() - t0) * 1e3:.1f}"]
                    )
            record = {
                "epoch": epoch,
                "train_loss": epoch_loss / options.batches_per_epoch,
                "val_loss": evaluate_loss(params, val_items) if val_items else None,
            }
            history.append(record)
    finally:
        if log_fh:
            log_fh.close()
    return params, history


def evaluate_loss(params: PolicyParams, items: list, batch_size: int = 256) -> float:
    """Mean per-decision loss with dropout off."""
    if not items:
        return 0.0
    total = 0.0
    for start in range(0, len(items), batch_size):
        chunk = items[start : start + batch_size]
        logits, _ = forward(params, [it.view for it in chunk])
        for it, vec in zip(chunk, logits):
            probs = masked_distribution(vec, it.feasible)
            total -= np.log(max(probs[it.target], 1e-300))
    return total / len(items)

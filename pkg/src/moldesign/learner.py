"""Self-improving fine-tuning loop: sample with TASAR, keep the best
molecules found so far, train the policy on them, repeat."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteGradient
from .molgraph import Constraints, DesignState, Molecule, canonical_key
from .policy import PolicyParams
from .sampler import NetworkPolicy, tasar_sample
from .trainer import OptimState, cross_entropy_loss, optimizer_step, positions_from_trace


@dataclass
class ScoredMolecule:
    molecule: Molecule
    value: float
    subactions: tuple  # from the run's initial molecule
    epoch: int
    key: bytes = b""
    order: int = 0     # global discovery counter, for deterministic ties
    _positions: Optional[list] = field(default=None, repr=False, compare=False)


class Archive:
    """Top-s molecules by objective, deduplicated by canonical key.

    Ordering: higher value first, then earlier discovery, then lexicographic
    canonical key.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.entries: list = []
        self._counter = 0

    def merge(self, scored: list, epoch: int) -> None:
        by_key = {e.key: e for e in self.entries}
        for item in scored:
            if not np.isfinite(item.value):
                continue
            key = item.key or canonical_key(item.molecule)
            existing = by_key.get(key)
            if existing is not None and existing.value >= item.value:
                continue
            entry = ScoredMolecule(
                molecule=item.molecule,
                value=item.value,
                subactions=item.subactions,
                epoch=epoch,
                key=key,
                order=self._counter,
            )
            self._counter += 1
            by_key[key] = entry
        self.entries = sorted(by_key.values(), key=lambda e: (-e.value, e.order, e.key))
        del self.entries[self.capacity:]

    @property
    def best(self) -> Optional[float]:
        return self.entries[0].value if self.entries else None

    def mean_top(self, count: int) -> Optional[float]:
        if not self.entries:
            return None
        top = self.entries[: min(count, len(self.entries))]
        return float(np.mean([e.value for e in top]))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class LearnConfig:
    top_s: int = 100
    beam_width: int = 512
    step_size: int = 12        # sub-actions: four graph edits between reconsiderations
    epochs: int = 50
    batches_per_epoch: int = 20
    batch_size: int = 64
    lr: float = 3e-4
    budget_factor: int = 4     # completed traces per epoch <= budget_factor * beam_width
    train_full: bool = False   # default: only the output heads are trained
    patience: int = 50
    wall_clock_limit: Optional[float] = None  # seconds
    seed: int = 0


def run(
    params: PolicyParams,
    m0: Molecule,
    objective,
    constraints: Constraints,
    hyper: LearnConfig,
    progress: Optional[Callable[[dict], None]] = None,
):
    """Execute the optimization loop; returns (archive, params, records)."""
    rng = np.random.default_rng(hyper.seed)
    archive = Archive(hyper.top_s)
    t_start = time.perf_counter()

    (v0,) = objective.score_batch([m0])
    archive.merge(
        [ScoredMolecule(molecule=m0, value=float(v0), subactions=(0,), epoch=-1)],
        epoch=-1,
    )

    optim = OptimState(lr=hyper.lr)
    trainable = params.trainable_names(heads_only=not hyper.train_full)
    records = []
    best_seen = -np.inf
    stale_epochs = 0

    for epoch in range(hyper.epochs):
        t0 = time.perf_counter()
        scored = tasar_sample(
            NetworkPolicy(params),
            m0,
            constraints,
            beam_width=hyper.beam_width,
            step_size=hyper.step_size,
            objective=objective,
            budget=hyper.budget_factor * hyper.beam_width,
            rng=rng,
        )
        archive.merge(
            [
                ScoredMolecule(molecule=s.molecule, value=s.value, subactions=s.subactions,
                               epoch=epoch)
                for s in scored
            ],
            epoch=epoch,
        )

        positions = []
        for entry in archive.entries:
            if entry._positions is None:
                state = DesignState.from_molecule(m0, constraints)
                entry._positions = positions_from_trace(list(entry.subactions), state)
            positions.extend(entry._positions)

        snapshot = params
        try:
            for _ in range(hyper.batches_per_epoch if positions else 0):
                idx = rng.integers(0, len(positions), size=hyper.batch_size)
                batch = [positions[i] for i in idx]
                _, grads = cross_entropy_loss(params, batch, trainable=trainable)
                params, optim = optimizer_step(params, grads, optim)
        except NonFiniteGradient:
            params = snapshot

        record = {
            "epoch": epoch,
            "best": archive.best,
            "mean_top20": archive.mean_top(20),
            "archive_size": len(archive),
            "sampled": len(scored),
            "wall_ms": round((time.perf_counter() - t0) * 1e3, 1),
        }
        records.append(record)
        if progress is not None:
            progress(record)

        if archive.best is not None and archive.best > best_seen:
            best_seen = archive.best
            stale_epochs = 0
        else:
            stale_epochs += 1
        if stale_epochs >= hyper.patience:
            break
        if (hyper.wall_clock_limit is not None
                and time.perf_counter() - t_start > hyper.wall_clock_limit):
            break

    return archive, params, records


def merge_archive(archive: Archive, scored: list, epoch: int = 0) -> Archive:
    """Functional wrapper over Archive.merge for one-off use."""
    archive.merge(scored, epoch)
    return archive

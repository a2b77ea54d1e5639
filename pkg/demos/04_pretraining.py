"""Self-supervised pretraining: predict the next edit along known molecules.

Every molecule in a corpus becomes an action trace; training samples
(intermediate state, next sub-action) pairs uniformly across all traces and
minimizes masked cross-entropy.
"""

from pathlib import Path

import numpy as np

from moldesign.alphabet import drug_full
from moldesign.policy import PolicyConfig, PolicyParams
from moldesign.smiles import parse, read_corpus, to_action_trace
from moldesign.trainer import PretrainConfig, pretrain

corpus_path = Path(__file__).resolve().parents[1] / "src" / "moldesign" / "data" / "corpus.smi"
alpha = drug_full()

# a small slice of the bundled corpus keeps this demo fast
strings = read_corpus(corpus_path)[:120]
traces = []
for s in strings:
    try:
        traces.append(to_action_trace(parse(s, alpha)))
    except Exception as exc:
        print("skip", s, "->", exc)
print(f"{len(traces)} traces, "
      f"{sum(len(t.steps) for t in traces)} actions total")

config = PolicyConfig.for_alphabet(alpha, d_model=32, n_layers=2, n_heads=4, ff_dim=64)
params = PolicyParams.init(config, np.random.default_rng(0))

options = PretrainConfig(epochs=3, batches_per_epoch=60, batch_size=24,
                         lr=1e-3, dropout=0.1, val_fraction=0.1, seed=0)
params, history = pretrain(params, traces, options)
for record in history:
    print(f"epoch {record['epoch']}: train {record['train_loss']:.3f} nats"
          + (f", val {record['val_loss']:.3f}" if record["val_loss"] is not None else ""))

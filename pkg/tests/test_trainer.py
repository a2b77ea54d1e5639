import numpy as np
import pytest

from moldesign.alphabet import solvent_cno
from moldesign.errors import EmptyCorpus, NonFiniteGradient, TargetMasked
from moldesign.molgraph import Constraints
from moldesign.policy import PolicyConfig, PolicyParams, forward, masked_distribution
from moldesign.smiles import parse, to_action_trace
from moldesign.trainer import (
    OptimState,
    PretrainConfig,
    TrainItem,
    cross_entropy_loss,
    evaluate_loss,
    optimizer_step,
    pretrain,
    trace_positions,
)

CNO = solvent_cno()


def make_params(seed=0, dtype=np.float32, **overrides):
    cfg = PolicyConfig.for_alphabet(CNO, d_model=16, n_layers=2, n_heads=2,
                                    ff_dim=32, **overrides)
    rng = np.random.default_rng(seed)
    params = PolicyParams.init(cfg, rng, dtype=dtype)
    for name in params.tensors:
        if "gate" in name or name == "attn_bias":
            params.tensors[name] = rng.normal(0, 0.5, params.tensors[name].shape).astype(dtype)
    return params


def batch_from(smiles_list, limit=None):
    batch = []
    for s in smiles_list:
        trace = to_action_trace(parse(s, CNO))
        batch.extend(trace_positions(trace, Constraints.unrestricted(12)))
    return batch[:limit] if limit else batch


class TestCrossEntropy:
    def test_uniform_policy_loss_is_log_count(self):
        # fresh params with zero gates and zero heads give uniform distributions
        cfg = PolicyConfig.for_alphabet(CNO, d_model=16, n_layers=1, n_heads=2, ff_dim=32)
        params = PolicyParams.init(cfg, np.random.default_rng(0))
        for name in params.tensors:
            if name.startswith("head_"):
                params.tensors[name] = np.zeros_like(params.tensors[name])
        item = batch_from(["C=O"])[0]  # level-0 position with 4 feasible choices
        assert len(item.feasible) == 4
        loss, _ = cross_entropy_loss(params, [item])
        assert abs(loss - np.log(4)) < 1e-6

    def test_confident_policy_loss_near_zero(self):
        params = make_params()
        item = batch_from(["C=O"])[0]
        params.tensors["head_class_w"] = np.zeros_like(params.tensors["head_class_w"])
        params.tensors["head_class_b"] = np.full_like(params.tensors["head_class_b"], -50.0)
        params.tensors["head_class_b"][item.target] = 50.0
        loss, _ = cross_entropy_loss(params, [item])
        assert loss < 1e-6

    def test_masked_logit_gradients_are_zero(self):
        params = make_params(dtype=np.float64)
        batch = batch_from(["CC(C)=O", "NCO"])
        level0 = [it for it in batch if it.view["level"] == 0 and len(it.feasible) < len(CNO) + 1 + it.view["n_real"]]
        assert level0, "need a level-0 item with an infeasible entry"
        item = level0[0]
        infeasible = [i for i in range(len(CNO) + 1 + item.view["n_real"]) if i not in item.feasible]
        # gradient of the class-head bias for an infeasible class index must be 0
        loss, grads = cross_entropy_loss(params, [item])
        k = params.config.alphabet_size
        for idx in infeasible:
            if idx < k + 1:
                assert grads["head_class_b"][idx] == 0.0

    def test_target_outside_mask_raises(self):
        params = make_params()
        item = batch_from(["C=O"])[0]
        bad = TrainItem(view=item.view, feasible=item.feasible, target=item.feasible[-1] + 99)
        with pytest.raises(TargetMasked):
            cross_entropy_loss(params, [bad])

    def test_gradient_check_against_finite_differences(self):
        params = make_params(dtype=np.float64)
        batch = batch_from(["CC(C)=O", "C1CCCCC1", "NCO"], limit=10)
        loss, grads = cross_entropy_loss(params, batch)
        gen = np.random.default_rng(5)
        h = 1e-5
        checked = 0
        for name in sorted(grads):
            flat = params.tensors[name].ravel()
            gflat = grads[name].ravel()
            for idx in gen.choice(flat.size, size=min(3, flat.size), replace=False):
                orig = flat[idx]
                flat[idx] = orig + h
                lp, _ = cross_entropy_loss(params, batch)
                flat[idx] = orig - h
                lm, _ = cross_entropy_loss(params, batch)
                flat[idx] = orig
                fd = (lp - lm) / (2 * h)
                an = gflat[idx]
                # 1e-6 floor: below it, central differences are pure noise
                rel = abs(fd - an) / max(abs(fd), abs(an), 1e-6)
                assert rel < 1e-3, f"{name}[{idx}]: analytic={an} fd={fd}"
                checked += 1
        assert checked >= 100


class TestOptimizer:
    def test_zero_gradient_keeps_params(self):
        params = make_params()
        grads = {n: np.zeros_like(a) for n, a in params.tensors.items()}
        new, _ = optimizer_step(params, grads, OptimState(lr=0.1))
        for name in params.names():
            assert np.array_equal(new[name], params[name])

    def test_first_step_is_lr_sized(self):
        # bias-corrected Adam moves a fresh scalar by ~lr regardless of g scale
        params = make_params()
        grads = {"head_class_b": np.zeros_like(params["head_class_b"])}
        grads["head_class_b"][0] = 1.0
        new, _ = optimizer_step(params, grads, OptimState(lr=0.1, clip_norm=None))
        moved = params["head_class_b"][0] - new["head_class_b"][0]
        assert abs(moved - 0.1) < 1e-6

    def test_repeated_identical_gradients_move_monotonically(self):
        params = make_params()
        state = OptimState(lr=0.01)
        grads = {"head_class_b": np.ones_like(params["head_class_b"])}
        prev = params["head_class_b"][0]
        for _ in range(5):
            params, state = optimizer_step(params, grads, state)
            assert params["head_class_b"][0] < prev
            prev = params["head_class_b"][0]

    def test_nonfinite_gradient_raises(self):
        params = make_params()
        grads = {"head_class_b": np.full_like(params["head_class_b"], np.nan)}
        with pytest.raises(NonFiniteGradient):
            optimizer_step(params, grads, OptimState())

    def test_determinism(self):
        runs = []
        for _ in range(2):
            params = make_params(seed=4, dtype=np.float64)
            state = OptimState(lr=1e-3)
            batch = batch_from(["CC(C)=O"])
            losses = []
            for _ in range(5):
                loss, grads = cross_entropy_loss(params, batch)
                params, state = optimizer_step(params, grads, state)
                losses.append(loss)
            runs.append(losses)
        assert runs[0] == runs[1]


class TestPretrain:
    def test_memorizes_single_trace(self):
        params = make_params(seed=1)
        trace = to_action_trace(parse("C=O", CNO))
        corpus = [trace] * 50
        options = PretrainConfig(epochs=5, batches_per_epoch=40, batch_size=16,
                                 lr=3e-3, dropout=0.1, val_fraction=0.1, seed=0)
        trained, history = pretrain(params, corpus, options)
        vals = [h["val_loss"] for h in history]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:])), vals
        assert vals[-1] < 0.05, vals

    def test_dont_change_only_corpus(self):
        params = make_params(seed=2)
        trace = to_action_trace(parse("C", CNO))
        corpus = [trace] * 30
        options = PretrainConfig(epochs=4, batches_per_epoch=30, batch_size=8,
                                 lr=3e-3, dropout=0.0, val_fraction=0.0, seed=0)
        trained, _ = pretrain(params, corpus, options)
        items = trace_positions(trace, Constraints.unrestricted(2))
        logits, _ = forward(trained, [items[0].view])
        probs = masked_distribution(logits[0], items[0].feasible)
        assert probs[0] > 0.99

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            pretrain(make_params(), [], PretrainConfig())

    def test_training_log_written(self, tmp_path):
        params = make_params(seed=3)
        trace = to_action_trace(parse("CC", CNO))
        log = tmp_path / "train.csv"
        options = PretrainConfig(epochs=1, batches_per_epoch=3, batch_size=4,
                                 val_fraction=0.0, seed=0, log_path=str(log))
        pretrain(params, [trace] * 5, options)
        lines = log.read_text().strip().splitlines()
        assert lines[0].startswith("epoch,batch,loss,grad_norm")
        assert len(lines) == 4

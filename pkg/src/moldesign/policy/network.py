"""Graph transformer forward/backward in plain numpy.

The molecule's atoms enter as an unordered set: a virtual atom at position 0
aggregates global state, there is no positional encoding, and bonding enters
only through additive attention biases looked up by bond code, so outputs are
permutation equivariant. ReZero gates scale both sublayers of every block.

The forward pass returns one logits vector per sample for its active action
level; `backward` consumes the matching upstream gradients and produces a
gradient dict over all tensors. Dropout uses inverted scaling and draws its
masks from an explicit generator, so training is reproducible under a seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyFeasibleSet, ShapeMismatch
from .params import PolicyParams

NEG = -1e9  # additive mask for pad keys and infeasible logits


def view_from(molecule, level_state) -> dict:
    """Network view for an immutable molecule + cursor (see DesignState)."""
    from ..molgraph import DesignState, Constraints

    ds = DesignState.from_molecule(molecule, Constraints.unrestricted(max(molecule.n_atoms + 1, 2)))
    ds.set_level_state(level_state)
    return ds.network_view()


class Batch:
    __slots__ = ("token", "deg", "sel0", "sel1", "level", "bias_idx", "real",
                 "n_real", "B", "L")


def build_batch(views: list, config) -> Batch:
    b = Batch()
    B = len(views)
    lengths = [1 + len(v["types"]) for v in views]
    L = max(lengths)
    y = config.max_bond_order
    virtual_code = y + 1

    token = np.zeros((B, L), dtype=np.int64)
    deg = np.zeros((B, L), dtype=np.int64)
    sel0 = np.zeros((B, L), dtype=np.int64)
    sel1 = np.zeros((B, L), dtype=np.int64)
    level = np.zeros(B, dtype=np.int64)
    bias_idx = np.zeros((B, L, L), dtype=np.int64)
    real = np.zeros((B, L), dtype=bool)
    n_real = []

    for s, v in enumerate(views):
        types = v["types"]
        n_in = len(types)
        if any(t < 0 or t >= config.alphabet_size for t in types):
            raise ShapeMismatch("atom type outside configured alphabet size")
        real[s, : n_in + 1] = True
        token[s, 1 : n_in + 1] = np.asarray(types) + 1
        deg[s, 1 : n_in + 1] = np.minimum(v["degrees"], config.max_degree)
        level[s] = v["level"]
        if v["sel0"] is not None:
            sel0[s, 1 + v["sel0"]] = 1
        if v["sel1"] is not None:
            sel1[s, 1 + v["sel1"]] = 1
        bias_idx[s, 0, : n_in + 1] = virtual_code
        bias_idx[s, : n_in + 1, 0] = virtual_code
        bond = v["bond"]
        nb = len(bond)  # pending atom has no bond row
        for i in range(nb):
            row = bond[i]
            for j in range(nb):
                if row[j]:
                    bias_idx[s, 1 + i, 1 + j] = row[j]
        n_real.append(v["n_real"])

    b.token, b.deg, b.sel0, b.sel1 = token, deg, sel0, sel1
    b.level, b.bias_idx, b.real, b.n_real = level, bias_idx, real, n_real
    b.B, b.L = B, L
    return b


def _split(x, H, dh):
    B, L, _ = x.shape
    return x.reshape(B, L, H, dh).transpose(0, 2, 1, 3)


def _merge(x):
    B, H, L, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(B, L, H * dh)


def forward(params: PolicyParams, views: list, dropout: float = 0.0, rng=None):
    """Run the network; returns (logits_list, cache).

    logits_list[s] is the active-level logits vector for sample s: level 0
    gives ``[stop, new-type 1..k, existing atom 1..n]``, level 1 per-atom
    scores, level 2 bond-order scores.
    """
    if dropout and rng is None:
        raise ValueError("dropout requires an rng")
    cfg = params.config
    t = params.tensors
    dtype = params.dtype
    batch = build_batch(views, cfg)
    B, L, H, dh = batch.B, batch.L, cfg.n_heads, cfg.head_dim
    scale = 1.0 / np.sqrt(dh)

    X = t["atom_embed"][batch.token].copy()
    X[:, 0, :] += t["level_embed"][batch.level]
    atom_add = t["degree_embed"][batch.deg] + t["sel0_embed"][batch.sel0] + t["sel1_embed"][batch.sel1]
    X[:, 1:, :] += atom_add[:, 1:, :]
    X[~batch.real] = 0

    key_mask = np.where(batch.real[:, None, None, :], 0.0, NEG).astype(dtype)

    keep = lambda shape: (rng.random(shape) >= dropout).astype(dtype) / (1.0 - dropout)

    layers = []
    for i in range(cfg.n_layers):
        p = lambda name: t[f"layer{i}.{name}"]
        Xin = X
        Q = Xin @ p("wq") + p("bq")
        K = Xin @ p("wk") + p("bk")
        V = Xin @ p("wv") + p("bv")
        Qh, Kh, Vh = _split(Q, H, dh), _split(K, H, dh), _split(V, H, dh)
        bias = t["attn_bias"][i][:, batch.bias_idx].transpose(1, 0, 2, 3)  # (B,H,L,L)
        S = Qh @ Kh.transpose(0, 1, 3, 2) * scale + bias + key_mask
        S -= S.max(axis=-1, keepdims=True)
        E = np.exp(S)
        A = E / E.sum(axis=-1, keepdims=True)
        attn_keep = keep(A.shape) if dropout else None
        Ad = A * attn_keep if dropout else A
        Zh = Ad @ Vh
        Z = _merge(Zh)
        O = Z @ p("wo") + p("bo")
        out_keep = keep(O.shape) if dropout else None
        Od = O * out_keep if dropout else O
        Y = Xin + p("gate_attn")[0] * Od

        H1 = Y @ p("ff_w1") + p("ff_b1")
        R = np.maximum(H1, 0)
        ff_keep = keep(R.shape) if dropout else None
        Rd = R * ff_keep if dropout else R
        F = Rd @ p("ff_w2") + p("ff_b2")
        ffout_keep = keep(F.shape) if dropout else None
        Fd = F * ffout_keep if dropout else F
        X = Y + p("gate_ff")[0] * Fd

        layers.append(dict(Xin=Xin, Qh=Qh, Kh=Kh, Vh=Vh, A=A, Ad=Ad, Z=Z, Od=Od,
                           Y=Y, H1=H1, Rd=Rd, Fd=Fd, attn_keep=attn_keep,
                           out_keep=out_keep, ff_keep=ff_keep, ffout_keep=ffout_keep))

    e0 = X[:, 0, :]                                   # (B, d)
    p_class = e0 @ t["head_class_w"] + t["head_class_b"]   # (B, k+1)
    p_order = e0 @ t["head_order_w"] + t["head_order_b"]   # (B, y)
    q0 = (X @ t["head_pick0_w"])[:, :, 0] + t["head_pick0_b"][0]  # (B, L)
    q1 = (X @ t["head_pick1_w"])[:, :, 0] + t["head_pick1_b"][0]

    logits = []
    for s in range(B):
        n = batch.n_real[s]
        lvl = int(batch.level[s])
        if lvl == 0:
            logits.append(np.concatenate([p_class[s], q0[s, 1 : 1 + n]]))
        elif lvl == 1:
            logits.append(q1[s, 1 : 1 + n].copy())
        else:
            logits.append(p_order[s].copy())

    cache = dict(batch=batch, layers=layers, X=X, e0=e0, params=params)
    return logits, cache


def backward(cache: dict, dlogits: list) -> dict:
    """Gradients of all tensors given upstream per-sample logits gradients."""
    params: PolicyParams = cache["params"]
    cfg = params.config
    t = params.tensors
    batch: Batch = cache["batch"]
    B, L, H, dh = batch.B, batch.L, cfg.n_heads, cfg.head_dim
    scale = 1.0 / np.sqrt(dh)
    dtype = params.dtype
    k = cfg.alphabet_size

    grads = {name: np.zeros_like(arr) for name, arr in t.items()}
    X = cache["X"]
    dX = np.zeros_like(X)
    dp_class = np.zeros((B, k + 1), dtype=dtype)
    dp_order = np.zeros((B, cfg.max_bond_order), dtype=dtype)
    dq0 = np.zeros((B, L), dtype=dtype)
    dq1 = np.zeros((B, L), dtype=dtype)

    for s in range(B):
        g = np.asarray(dlogits[s], dtype=dtype)
        n = batch.n_real[s]
        lvl = int(batch.level[s])
        if lvl == 0:
            if g.shape != (k + 1 + n,):
                raise ShapeMismatch(f"sample {s}: expected {(k + 1 + n,)}, got {g.shape}")
            dp_class[s] = g[: k + 1]
            dq0[s, 1 : 1 + n] = g[k + 1 :]
        elif lvl == 1:
            dq1[s, 1 : 1 + n] = g
        else:
            dp_order[s] = g

    e0 = cache["e0"]
    grads["head_class_w"] += e0.T @ dp_class
    grads["head_class_b"] += dp_class.sum(axis=0)
    grads["head_order_w"] += e0.T @ dp_order
    grads["head_order_b"] += dp_order.sum(axis=0)
    de0 = dp_class @ t["head_class_w"].T + dp_order @ t["head_order_w"].T
    grads["head_pick0_w"][:, 0] += (X * dq0[:, :, None]).sum(axis=(0, 1))
    grads["head_pick0_b"][0] += dq0.sum()
    grads["head_pick1_w"][:, 0] += (X * dq1[:, :, None]).sum(axis=(0, 1))
    grads["head_pick1_b"][0] += dq1.sum()
    dX += dq0[:, :, None] * t["head_pick0_w"][:, 0][None, None, :]
    dX += dq1[:, :, None] * t["head_pick1_w"][:, 0][None, None, :]
    dX[:, 0, :] += de0

    for i in reversed(range(cfg.n_layers)):
        ly = cache["layers"][i]
        p = lambda name: t[f"layer{i}.{name}"]
        gname = lambda name: f"layer{i}.{name}"
        gate_ff = p("gate_ff")[0]
        gate_attn = p("gate_attn")[0]

        # X = Y + gate_ff * Fd
        grads[gname("gate_ff")][0] += float((dX * ly["Fd"]).sum())
        dF = gate_ff * dX
        if ly["ffout_keep"] is not None:
            dF = dF * ly["ffout_keep"]
        flatR = ly["Rd"].reshape(-1, cfg.ff_dim)
        flatdF = dF.reshape(-1, cfg.d_model)
        grads[gname("ff_w2")] += flatR.T @ flatdF
        grads[gname("ff_b2")] += flatdF.sum(axis=0)
        dRd = dF @ p("ff_w2").T
        dR = dRd * ly["ff_keep"] if ly["ff_keep"] is not None else dRd
        dH1 = dR * (ly["H1"] > 0)
        flatY = ly["Y"].reshape(-1, cfg.d_model)
        flatdH1 = dH1.reshape(-1, cfg.ff_dim)
        grads[gname("ff_w1")] += flatY.T @ flatdH1
        grads[gname("ff_b1")] += flatdH1.sum(axis=0)
        dY = dX + dH1 @ p("ff_w1").T

        # Y = Xin + gate_attn * Od
        grads[gname("gate_attn")][0] += float((dY * ly["Od"]).sum())
        dO = gate_attn * dY
        if ly["out_keep"] is not None:
            dO = dO * ly["out_keep"]
        flatZ = ly["Z"].reshape(-1, cfg.d_model)
        flatdO = dO.reshape(-1, cfg.d_model)
        grads[gname("wo")] += flatZ.T @ flatdO
        grads[gname("bo")] += flatdO.sum(axis=0)
        dZ = dO @ p("wo").T
        dZh = _split(dZ, H, dh)
        dAd = dZh @ ly["Vh"].transpose(0, 1, 3, 2)
        dVh = ly["Ad"].transpose(0, 1, 3, 2) @ dZh
        dA = dAd * ly["attn_keep"] if ly["attn_keep"] is not None else dAd
        A = ly["A"]
        dS = A * (dA - (dA * A).sum(axis=-1, keepdims=True))

        flat_idx = batch.bias_idx.ravel()
        n_codes = cfg.max_bond_order + 2
        for h in range(H):
            grads["attn_bias"][i, h] += np.bincount(
                flat_idx, weights=dS[:, h].ravel(), minlength=n_codes
            )[:n_codes]

        dQh = dS @ ly["Kh"] * scale
        dKh = dS.transpose(0, 1, 3, 2) @ ly["Qh"] * scale
        dQ, dK, dV = _merge(dQh), _merge(dKh), _merge(dVh)
        Xin = ly["Xin"]
        flatX = Xin.reshape(-1, cfg.d_model)
        for name, darr in (("wq", dQ), ("wk", dK), ("wv", dV)):
            flatd = darr.reshape(-1, cfg.d_model)
            grads[gname(name)] += flatX.T @ flatd
            grads[gname("b" + name[1])] += flatd.sum(axis=0)
        dX = dY + dQ @ p("wq").T + dK @ p("wk").T + dV @ p("wv").T

    # input embeddings
    dX[~batch.real] = 0
    np.add.at(grads["atom_embed"], batch.token[batch.real], dX[batch.real])
    np.add.at(grads["level_embed"], batch.level, dX[:, 0, :])
    atom_real = batch.real.copy()
    atom_real[:, 0] = False
    np.add.at(grads["degree_embed"], batch.deg[atom_real], dX[atom_real])
    np.add.at(grads["sel0_embed"], batch.sel0[atom_real], dX[atom_real])
    np.add.at(grads["sel1_embed"], batch.sel1[atom_real], dX[atom_real])
    return grads


def masked_distribution(logits: np.ndarray, feasible) -> np.ndarray:
    """Probabilities over the logits vector: softmax on feasible entries,
    exact zeros elsewhere."""
    feasible = list(feasible)
    if not feasible:
        raise EmptyFeasibleSet("no feasible choices to normalize over")
    probs = np.zeros(len(logits), dtype=np.float64)
    sub = np.asarray([logits[i] for i in feasible], dtype=np.float64)
    sub -= sub.max()
    e = np.exp(sub)
    probs[feasible] = e / e.sum()
    return probs

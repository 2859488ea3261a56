"""Miniature Transformer encoder-decoder in plain numpy.

Every forward pass keeps the intermediates it needs, and a matching
hand-written backward pass produces gradients for every parameter array.
Nothing here depends on an autodiff framework, so the gradient path can
be audited line by line and checked against finite differences.

The input representation at every position is the sum of a token
embedding, a position embedding and a language embedding.  The encoder
receives the source language embedding, the decoder the target one.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

PAD, BOS, EOS, MASK, UNK = 0, 1, 2, 3, 4
SPECIAL_TOKENS = ("<pad>", "<s>", "</s>", "<mask>", "<unk>")
NEG_INF = -1e9


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    max_len: int = 32
    embed_dim: int = 64
    hidden_dim: int = 128
    num_layers: int = 2
    num_heads: int = 2
    learning_rate: float = 0.1
    seed: int = 0
    dtype: str = "float64"

    def __post_init__(self):
        for name in ("vocab_size", "max_len", "embed_dim", "hidden_dim",
                     "num_layers", "num_heads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.embed_dim % self.num_heads:
            raise ValueError(
                f"embed_dim {self.embed_dim} not divisible by num_heads {self.num_heads}")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype}")
        if self.vocab_size <= len(SPECIAL_TOKENS):
            raise ValueError("vocab_size must leave room beyond the special tokens")


# Real-data presets; desk-scale runs use the defaults above.
MULTILINGUAL_PRESET = dict(num_layers=6, num_heads=8, embed_dim=512, hidden_dim=2048)
BILINGUAL_PRESET = dict(num_layers=5, num_heads=2, embed_dim=512, hidden_dim=2048)


@dataclass
class Batch:
    """Padded source/target id matrices for one language pair.

    ``tgt`` holds the gold output sequence (ending in EOS); the decoder
    input is derived from it by shifting right behind BOS.
    """

    src: np.ndarray
    src_lang: str
    tgt: np.ndarray
    tgt_lang: str

    @property
    def src_mask(self) -> np.ndarray:
        return self.src != PAD

    @property
    def tgt_mask(self) -> np.ndarray:
        return self.tgt != PAD

    @property
    def dec_in(self) -> np.ndarray:
        out = np.empty_like(self.tgt)
        out[:, 0] = BOS
        out[:, 1:] = self.tgt[:, :-1]
        out[~self.tgt_mask] = PAD
        return out


def pad_sequences(seqs: Sequence[Sequence[int]], append_eos: bool = True) -> np.ndarray:
    extra = 1 if append_eos else 0
    width = max(len(s) for s in seqs) + extra
    arr = np.full((len(seqs), width), PAD, dtype=np.int64)
    for i, s in enumerate(seqs):
        arr[i, :len(s)] = s
        if append_eos:
            arr[i, len(s)] = EOS
    return arr


def make_batch(src_seqs, src_lang, tgt_seqs, tgt_lang, max_len=None) -> Batch:
    """Build a batch, appending EOS to both sides.

    Sequences longer than ``max_len - 1`` are truncated so that the
    appended EOS still fits.
    """
    if len(src_seqs) != len(tgt_seqs):
        raise ValueError(f"{len(src_seqs)} sources vs {len(tgt_seqs)} targets")
    if max_len is not None:
        src_seqs = [list(s)[:max_len - 1] for s in src_seqs]
        tgt_seqs = [list(t)[:max_len - 1] for t in tgt_seqs]
    return Batch(pad_sequences(src_seqs), src_lang, pad_sequences(tgt_seqs), tgt_lang)


class Seq2SeqModel:
    """Parameter container plus the language inventory it was built for."""

    def __init__(self, config: ModelConfig, langs: Sequence[str], params: dict[str, np.ndarray]):
        self.config = config
        self.langs = list(langs)
        self.lang_index = {lang: i for i, lang in enumerate(self.langs)}
        self.params = params

    def copy(self) -> "Seq2SeqModel":
        return Seq2SeqModel(self.config, self.langs,
                            {k: v.copy() for k, v in self.params.items()})

    def num_parameters(self) -> int:
        return sum(p.size for p in self.params.values())

    def lang_id(self, lang: str) -> int:
        try:
            return self.lang_index[lang]
        except KeyError:
            raise KeyError(f"language {lang!r} not in model languages {self.langs}") from None


# --------------------------------------------------------------------------
# initialisation

def _param_shapes(cfg: ModelConfig, num_langs: int) -> dict[str, tuple[int, ...]]:
    D, F, V = cfg.embed_dim, cfg.hidden_dim, cfg.vocab_size
    shapes: dict[str, tuple[int, ...]] = {
        "tok_emb": (V, D),
        "pos_emb": (cfg.max_len, D),
        "lang_emb": (num_langs, D),
    }

    def attn(prefix):
        # no key bias: it shifts every score of a query equally and gets zero gradient
        for m in ("q", "k", "v", "o"):
            shapes[f"{prefix}.w{m}"] = (D, D)
            if m != "k":
                shapes[f"{prefix}.b{m}"] = (D,)

    def ln(prefix):
        shapes[f"{prefix}.g"] = (D,)
        shapes[f"{prefix}.b"] = (D,)

    def ffn(prefix):
        shapes[f"{prefix}.w1"] = (D, F)
        shapes[f"{prefix}.b1"] = (F,)
        shapes[f"{prefix}.w2"] = (F, D)
        shapes[f"{prefix}.b2"] = (D,)

    for i in range(cfg.num_layers):
        p = f"enc.{i}"
        ln(f"{p}.ln1"); attn(f"{p}.self"); ln(f"{p}.ln2"); ffn(f"{p}.ffn")
    ln("enc.ln")
    for i in range(cfg.num_layers):
        p = f"dec.{i}"
        ln(f"{p}.ln1"); attn(f"{p}.self"); ln(f"{p}.ln2"); attn(f"{p}.cross")
        ln(f"{p}.ln3"); ffn(f"{p}.ffn")
    ln("dec.ln")
    shapes["out.w"] = (D, V)
    shapes["out.b"] = (V,)
    return shapes


def init_bound(name: str, shape: tuple[int, ...]) -> float:
    """Half-width of the uniform init range for one parameter array (0 for constants)."""
    if name.endswith(".g") or len(shape) == 1:
        return 0.0
    if name in ("tok_emb", "pos_emb", "lang_emb"):
        return math.sqrt(3.0 / shape[1])
    return math.sqrt(6.0 / (shape[0] + shape[1]))


def init_model(config: ModelConfig, langs: Sequence[str]) -> Seq2SeqModel:
    langs = list(langs)
    if not langs or len(set(langs)) != len(langs):
        raise ValueError(f"need a non-empty list of distinct languages, got {langs}")
    rng = np.random.default_rng(config.seed)
    params = {}
    for name, shape in _param_shapes(config, len(langs)).items():
        if name.endswith(".g"):
            params[name] = np.ones(shape)
        elif len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            a = init_bound(name, shape)
            params[name] = rng.uniform(-a, a, size=shape)
    params = {k: v.astype(config.dtype) for k, v in params.items()}
    return Seq2SeqModel(config, langs, params)


# --------------------------------------------------------------------------
# layer primitives (forward returns (out, cache); backward consumes cache)

_LN_EPS = 1e-5


def _ln_fwd(x, g, b):
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(-1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + _LN_EPS)
    xhat = xc * rstd
    return xhat * g + b, (xhat, rstd, g)


def _ln_bwd(dy, cache):
    xhat, rstd, g = cache
    D = xhat.shape[-1]
    red = tuple(range(dy.ndim - 1))
    dg = (dy * xhat).sum(red)
    db = dy.sum(red)
    dxhat = dy * g
    dx = rstd / D * (D * dxhat - dxhat.sum(-1, keepdims=True)
                     - xhat * (dxhat * xhat).sum(-1, keepdims=True))
    return dx, dg, db


_GELU_C = math.sqrt(2.0 / math.pi)


def _gelu_fwd(x):
    inner = _GELU_C * (x + 0.044715 * (x * x * x))
    t = np.tanh(inner)
    return 0.5 * x * (1.0 + t), (x, t)


def _gelu_bwd(dy, cache):
    x, t = cache
    dinner = _GELU_C * (1.0 + 3 * 0.044715 * x * x)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dinner)


def _split_heads(x, H):
    B, T, D = x.shape
    return x.reshape(B, T, H, D // H).transpose(0, 2, 1, 3)


def _merge_heads(x):
    B, H, T, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(B, T, H * dh)


def _attn_fwd(p, prefix, xq, xkv, bias, H):
    """Multi-head scaled dot-product attention.

    ``bias`` is an additive mask broadcastable to (B, H, Tq, Tk).
    """
    wq, wk, wv, wo = (p[f"{prefix}.w{m}"] for m in "qkvo")
    q = _split_heads(xq @ wq + p[f"{prefix}.bq"], H)
    k = _split_heads(xkv @ wk, H)
    v = _split_heads(xkv @ wv + p[f"{prefix}.bv"], H)
    scale = 1.0 / math.sqrt(q.shape[-1])
    s = q @ k.transpose(0, 1, 3, 2) * scale + bias
    s = s - s.max(-1, keepdims=True)
    e = np.exp(s)
    a = e / e.sum(-1, keepdims=True)
    o = _merge_heads(a @ v)
    out = o @ wo + p[f"{prefix}.bo"]
    return out, (prefix, xq, xkv, q, k, v, a, o, scale, xq is xkv)


def _attn_bwd(dout, cache, p, grads, H):
    prefix, xq, xkv, q, k, v, a, o, scale, shared = cache
    red = (0, 1)
    grads[f"{prefix}.wo"] += o.reshape(-1, o.shape[-1]).T @ dout.reshape(-1, dout.shape[-1])
    grads[f"{prefix}.bo"] += dout.sum(red)
    do = _split_heads(dout @ p[f"{prefix}.wo"].T, H)
    da = do @ v.transpose(0, 1, 3, 2)
    dv = a.transpose(0, 1, 3, 2) @ do
    ds = a * (da - (da * a).sum(-1, keepdims=True)) * scale
    dq = ds @ k
    dk = ds.transpose(0, 1, 3, 2) @ q
    dq, dk, dv = _merge_heads(dq), _merge_heads(dk), _merge_heads(dv)
    fq = xq.reshape(-1, xq.shape[-1])
    fkv = xkv.reshape(-1, xkv.shape[-1])
    grads[f"{prefix}.wq"] += fq.T @ dq.reshape(-1, dq.shape[-1])
    grads[f"{prefix}.wk"] += fkv.T @ dk.reshape(-1, dk.shape[-1])
    grads[f"{prefix}.wv"] += fkv.T @ dv.reshape(-1, dv.shape[-1])
    grads[f"{prefix}.bq"] += dq.sum(red)
    grads[f"{prefix}.bv"] += dv.sum(red)
    dxq = dq @ p[f"{prefix}.wq"].T
    dxkv = dk @ p[f"{prefix}.wk"].T + dv @ p[f"{prefix}.wv"].T
    return dxq, dxkv


def _ffn_fwd(p, prefix, x):
    h = x @ p[f"{prefix}.w1"] + p[f"{prefix}.b1"]
    g, gc = _gelu_fwd(h)
    return g @ p[f"{prefix}.w2"] + p[f"{prefix}.b2"], (prefix, x, g, gc)


def _ffn_bwd(dy, cache, p, grads):
    prefix, x, g, gc = cache
    D = dy.shape[-1]
    grads[f"{prefix}.w2"] += g.reshape(-1, g.shape[-1]).T @ dy.reshape(-1, D)
    grads[f"{prefix}.b2"] += dy.sum((0, 1))
    dh = _gelu_bwd(dy @ p[f"{prefix}.w2"].T, gc)
    grads[f"{prefix}.w1"] += x.reshape(-1, D).T @ dh.reshape(-1, dh.shape[-1])
    grads[f"{prefix}.b1"] += dh.sum((0, 1))
    return dh @ p[f"{prefix}.w1"].T


# --------------------------------------------------------------------------
# encoder / decoder stacks

def _check_ids(model: Seq2SeqModel, ids: np.ndarray, what: str):
    cfg = model.config
    if ids.shape[1] > cfg.max_len:
        raise ValueError(f"{what} length {ids.shape[1]} exceeds max_len {cfg.max_len}")
    if ids.size and (ids.min() < 0 or ids.max() >= cfg.vocab_size):
        bad = ids[(ids < 0) | (ids >= cfg.vocab_size)][0]
        raise IndexError(f"{what} id {bad} out of range [0, {cfg.vocab_size})")


def embed(model: Seq2SeqModel, ids: np.ndarray, lang: str) -> np.ndarray:
    """Input representation: token + position + language embedding."""
    p = model.params
    T = ids.shape[1]
    return p["tok_emb"][ids] + p["pos_emb"][:T] + p["lang_emb"][model.lang_id(lang)]


def _key_bias(mask: np.ndarray, dtype) -> np.ndarray:
    return np.where(mask, 0.0, NEG_INF).astype(dtype)[:, None, None, :]


def _causal_bias(T: int, dtype) -> np.ndarray:
    return np.triu(np.full((T, T), NEG_INF, dtype=dtype), k=1)[None, None]


def _encode(model, src, src_lang):
    p, cfg = model.params, model.config
    H = cfg.num_heads
    bias = _key_bias(src != PAD, cfg.dtype)
    h = embed(model, src, src_lang)
    caches = []
    for i in range(cfg.num_layers):
        pre = f"enc.{i}"
        a, c1 = _ln_fwd(h, p[f"{pre}.ln1.g"], p[f"{pre}.ln1.b"])
        att, c2 = _attn_fwd(p, f"{pre}.self", a, a, bias, H)
        h = h + att
        f, c3 = _ln_fwd(h, p[f"{pre}.ln2.g"], p[f"{pre}.ln2.b"])
        ff, c4 = _ffn_fwd(p, f"{pre}.ffn", f)
        h = h + ff
        caches.append((c1, c2, c3, c4))
    out, cl = _ln_fwd(h, p["enc.ln.g"], p["enc.ln.b"])
    return out, (caches, cl)


def _encode_bwd(model, dout, cache, grads, src, src_lang):
    p, cfg = model.params, model.config
    H = cfg.num_heads
    caches, cl = cache
    dh, dg, db = _ln_bwd(dout, cl)
    grads["enc.ln.g"] += dg
    grads["enc.ln.b"] += db
    for i in reversed(range(cfg.num_layers)):
        pre = f"enc.{i}"
        c1, c2, c3, c4 = caches[i]
        df = _ffn_bwd(dh, c4, p, grads)
        dx, dg, db = _ln_bwd(df, c3)
        grads[f"{pre}.ln2.g"] += dg
        grads[f"{pre}.ln2.b"] += db
        dh = dh + dx
        dq, dkv = _attn_bwd(dh, c2, p, grads, H)
        dx, dg, db = _ln_bwd(dq + dkv, c1)
        grads[f"{pre}.ln1.g"] += dg
        grads[f"{pre}.ln1.b"] += db
        dh = dh + dx
    _embed_bwd(model, dh, grads, src, src_lang)


def _embed_bwd(model, dh, grads, ids, lang):
    np.add.at(grads["tok_emb"], ids, dh)
    T = ids.shape[1]
    grads["pos_emb"][:T] += dh.sum(0)
    grads["lang_emb"][model.lang_id(lang)] += dh.sum((0, 1))


def _decode(model, dec_in, tgt_lang, enc_out, src_mask):
    p, cfg = model.params, model.config
    H = cfg.num_heads
    T = dec_in.shape[1]
    self_bias = _causal_bias(T, cfg.dtype)
    cross_bias = _key_bias(src_mask, cfg.dtype)
    h = embed(model, dec_in, tgt_lang)
    caches = []
    for i in range(cfg.num_layers):
        pre = f"dec.{i}"
        a, c1 = _ln_fwd(h, p[f"{pre}.ln1.g"], p[f"{pre}.ln1.b"])
        att, c2 = _attn_fwd(p, f"{pre}.self", a, a, self_bias, H)
        h = h + att
        c, c3 = _ln_fwd(h, p[f"{pre}.ln2.g"], p[f"{pre}.ln2.b"])
        att, c4 = _attn_fwd(p, f"{pre}.cross", c, enc_out, cross_bias, H)
        h = h + att
        f, c5 = _ln_fwd(h, p[f"{pre}.ln3.g"], p[f"{pre}.ln3.b"])
        ff, c6 = _ffn_fwd(p, f"{pre}.ffn", f)
        h = h + ff
        caches.append((c1, c2, c3, c4, c5, c6))
    out, cl = _ln_fwd(h, p["dec.ln.g"], p["dec.ln.b"])
    return out, (caches, cl)


def _decode_bwd(model, dout, cache, grads, dec_in, tgt_lang):
    """Backprop through the decoder; returns the gradient w.r.t. encoder output."""
    p, cfg = model.params, model.config
    H = cfg.num_heads
    caches, cl = cache
    dh, dg, db = _ln_bwd(dout, cl)
    grads["dec.ln.g"] += dg
    grads["dec.ln.b"] += db
    denc = 0.0
    for i in reversed(range(cfg.num_layers)):
        pre = f"dec.{i}"
        c1, c2, c3, c4, c5, c6 = caches[i]
        df = _ffn_bwd(dh, c6, p, grads)
        dx, dg, db = _ln_bwd(df, c5)
        grads[f"{pre}.ln3.g"] += dg
        grads[f"{pre}.ln3.b"] += db
        dh = dh + dx
        dq, dkv = _attn_bwd(dh, c4, p, grads, H)
        denc = denc + dkv
        dx, dg, db = _ln_bwd(dq, c3)
        grads[f"{pre}.ln2.g"] += dg
        grads[f"{pre}.ln2.b"] += db
        dh = dh + dx
        dq, dkv = _attn_bwd(dh, c2, p, grads, H)
        dx, dg, db = _ln_bwd(dq + dkv, c1)
        grads[f"{pre}.ln1.g"] += dg
        grads[f"{pre}.ln1.b"] += db
        dh = dh + dx
    _embed_bwd(model, dh, grads, dec_in, tgt_lang)
    return denc


def _softmax_xent(logits, targets, mask):
    """Mean NLL over masked positions and its gradient w.r.t. logits."""
    z = logits - logits.max(-1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(-1, keepdims=True))
    n = mask.sum()
    if n == 0:
        return 0.0, np.zeros_like(logits)
    picked = np.take_along_axis(logp, targets[..., None], -1)[..., 0]
    loss = -(picked * mask).sum() / n
    dlogits = np.exp(logp)
    np.put_along_axis(dlogits, targets[..., None],
                      np.take_along_axis(dlogits, targets[..., None], -1) - 1.0, -1)
    dlogits *= (mask / n).astype(dlogits.dtype)[..., None]
    return float(loss), dlogits


def _project_bwd(dlogits, z, p, grads):
    D = z.shape[-1]
    grads["out.w"] += z.reshape(-1, D).T @ dlogits.reshape(-1, dlogits.shape[-1])
    grads["out.b"] += dlogits.sum((0, 1))
    return dlogits @ p["out.w"].T


def zeros_like_params(model: Seq2SeqModel) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in model.params.items()}


# Counts backward passes; lets callers assert that generation never
# contributes gradients.
BACKWARD_CALLS = {"count": 0}


def forward_loss(model: Seq2SeqModel, batch: Batch, need_grads: bool = True):
    """Teacher-forced mean token NLL of ``batch.tgt`` given ``batch.src``.

    Returns ``(loss, grads)``; ``grads`` is None when ``need_grads`` is False.
    """
    _check_ids(model, batch.src, "source")
    _check_ids(model, batch.tgt, "target")
    p = model.params
    dec_in = batch.dec_in
    enc_out, ecache = _encode(model, batch.src, batch.src_lang)
    z, dcache = _decode(model, dec_in, batch.tgt_lang, enc_out, batch.src_mask)
    logits = z @ p["out.w"] + p["out.b"]
    loss, dlogits = _softmax_xent(logits, batch.tgt, batch.tgt_mask)
    if not need_grads:
        return loss, None
    BACKWARD_CALLS["count"] += 1
    grads = zeros_like_params(model)
    dz = _project_bwd(dlogits, z, p, grads)
    denc = _decode_bwd(model, dz, dcache, grads, dec_in, batch.tgt_lang)
    _encode_bwd(model, denc, ecache, grads, batch.src, batch.src_lang)
    return loss, grads


def mlm_loss(model: Seq2SeqModel, ids: np.ndarray, lang: str, mask_rate: float,
             rng: np.random.Generator, need_grads: bool = True):
    """Masked-token prediction through the encoder and the shared output projection.

    ``ceil(mask_rate * n)`` real positions of each row are replaced by the
    mask id; only those positions are scored.  Rows whose real length is
    below 2 are left unmasked (masking their only token leaves nothing to
    condition on) and reported in ``skipped``.
    """
    if not 0.0 < mask_rate < 1.0:
        raise ValueError(f"mask_rate must lie in (0, 1), got {mask_rate}")
    _check_ids(model, ids, "input")
    p = model.params
    real = (ids != PAD) & (ids != EOS)
    lengths = real.sum(1)
    masked = ids.copy()
    score = np.zeros(ids.shape, dtype=bool)
    skipped = 0
    for i, n in enumerate(lengths):
        if n < 2:
            skipped += 1
            continue
        k = math.ceil(mask_rate * n)
        pos = rng.choice(int(n), size=min(k, int(n) - 1), replace=False)
        score[i, pos] = True
        masked[i, pos] = MASK
    enc_out, ecache = _encode(model, masked, lang)
    logits = enc_out @ p["out.w"] + p["out.b"]
    loss, dlogits = _softmax_xent(logits, ids, score)
    if not need_grads or not score.any():
        return loss, None, skipped
    BACKWARD_CALLS["count"] += 1
    grads = zeros_like_params(model)
    denc = _project_bwd(dlogits, enc_out, p, grads)
    _encode_bwd(model, denc, ecache, grads, masked, lang)
    return loss, grads, skipped


def grad_step(model: Seq2SeqModel, grads: dict[str, np.ndarray], learning_rate: float,
              clip_norm: float | None = None) -> Seq2SeqModel:
    """In-place SGD update ``p <- p - lr * g``; returns the model for chaining.

    With ``clip_norm`` set, the gradient is rescaled first so that its
    global L2 norm does not exceed it.
    """
    for name, g in grads.items():
        if name not in model.params:
            raise KeyError(f"gradient for unknown parameter {name!r}")
        if g.shape != model.params[name].shape:
            raise ValueError(f"shape mismatch for {name}: {g.shape} vs {model.params[name].shape}")
    scale = 1.0
    if clip_norm is not None:
        norm = math.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        if norm > clip_norm:
            scale = clip_norm / norm
    for name, g in grads.items():
        model.params[name] -= (learning_rate * scale) * g
    return model


# --------------------------------------------------------------------------
# incremental greedy decoding

def _attn_step(p, prefix, xq, k, v, bias, H):
    """Attention for a single query position against precomputed K/V heads."""
    q = _split_heads(xq @ p[f"{prefix}.wq"] + p[f"{prefix}.bq"], H)
    s = q @ k.transpose(0, 1, 3, 2) / math.sqrt(q.shape[-1])
    if bias is not None:
        s = s + bias
    s = s - s.max(-1, keepdims=True)
    e = np.exp(s)
    a = e / e.sum(-1, keepdims=True)
    return _merge_heads(a @ v) @ p[f"{prefix}.wo"] + p[f"{prefix}.bo"]


def _kv(p, prefix, x, H):
    k = _split_heads(x @ p[f"{prefix}.wk"], H)
    v = _split_heads(x @ p[f"{prefix}.wv"] + p[f"{prefix}.bv"], H)
    return k, v


def step_logits(model, enc_out, src_mask, tgt_lang, prefix_ids):
    """Full (non-incremental) next-token logits for every prefix position."""
    z, _ = _decode(model, prefix_ids, tgt_lang, enc_out, src_mask)
    return z @ model.params["out.w"] + model.params["out.b"]


def encode(model: Seq2SeqModel, src: np.ndarray, src_lang: str) -> np.ndarray:
    _check_ids(model, src, "source")
    return _encode(model, src, src_lang)[0]


def greedy_decode(model: Seq2SeqModel, sources: Sequence[Sequence[int]], src_lang: str,
                  tgt_lang: str, max_len: int | None = None) -> list[list[int]]:
    """Argmax decoding for a list of source id sequences.

    Decoding stops per row at EOS or after ``max_len`` tokens.  Returns
    the emitted ids without BOS/EOS.  Uses cached keys/values, so each
    step costs one position per layer.
    """
    if not len(sources):
        return []
    if any(len(s) == 0 for s in sources):
        raise ValueError("cannot decode an empty source sequence")
    cfg, p = model.config, model.params
    H = cfg.num_heads
    limit = cfg.max_len - 1 if max_len is None else min(max_len, cfg.max_len - 1)
    src = pad_sequences([list(s)[:cfg.max_len - 1] for s in sources])
    src_mask = src != PAD
    enc_out = encode(model, src, src_lang)
    cross_bias = _key_bias(src_mask, cfg.dtype)
    cross_kv = [_kv(p, f"dec.{i}.cross", enc_out, H) for i in range(cfg.num_layers)]
    self_k = [[] for _ in range(cfg.num_layers)]
    self_v = [[] for _ in range(cfg.num_layers)]
    B = len(sources)
    lang_vec = p["lang_emb"][model.lang_id(tgt_lang)]
    cur = np.full(B, BOS, dtype=np.int64)
    done = np.zeros(B, dtype=bool)
    out = np.zeros((B, limit), dtype=np.int64)
    n_out = 0
    for t in range(limit):
        h = (p["tok_emb"][cur] + p["pos_emb"][t] + lang_vec)[:, None, :]
        for i in range(cfg.num_layers):
            pre = f"dec.{i}"
            a, _ = _ln_fwd(h, p[f"{pre}.ln1.g"], p[f"{pre}.ln1.b"])
            k, v = _kv(p, f"{pre}.self", a, H)
            self_k[i].append(k)
            self_v[i].append(v)
            K = np.concatenate(self_k[i], axis=2)
            V = np.concatenate(self_v[i], axis=2)
            h = h + _attn_step(p, f"{pre}.self", a, K, V, None, H)
            c, _ = _ln_fwd(h, p[f"{pre}.ln2.g"], p[f"{pre}.ln2.b"])
            h = h + _attn_step(p, f"{pre}.cross", c, *cross_kv[i], cross_bias, H)
            f, _ = _ln_fwd(h, p[f"{pre}.ln3.g"], p[f"{pre}.ln3.b"])
            h = h + _ffn_fwd(p, f"{pre}.ffn", f)[0]
        z, _ = _ln_fwd(h, p["dec.ln.g"], p["dec.ln.b"])
        logits = z[:, 0] @ p["out.w"] + p["out.b"]
        # never emit specials other than EOS
        logits[:, [PAD, BOS, MASK]] = -np.inf
        nxt = logits.argmax(-1)
        nxt[done] = PAD
        out[:, t] = nxt
        n_out = t + 1
        done |= nxt == EOS
        if done.all():
            break
        cur = nxt
    result = []
    for row in out[:, :n_out]:
        seq = []
        for tok in row:
            if tok in (EOS, PAD):
                break
            seq.append(int(tok))
        result.append(seq)
    return result


# --------------------------------------------------------------------------
# checkpoints

CHECKPOINT_MAGIC = b"UNMTCKPT"
CHECKPOINT_VERSION = 1


def save_checkpoint(model: Seq2SeqModel, path: str | Path) -> Path:
    """Write a binary checkpoint plus a ``.manifest`` text companion.

    Layout: 8-byte magic, uint32 version, uint32 header length, UTF-8 JSON
    header (config, languages, array table), then each array as
    little-endian float64 in C order, in header order.
    """
    path = Path(path)
    names = sorted(model.params)
    table = [{"name": n, "shape": list(model.params[n].shape)} for n in names]
    header = json.dumps({"config": asdict(model.config), "langs": model.langs,
                         "arrays": table}, sort_keys=True).encode("utf-8")
    lines = [f"# checkpoint {path.name} version {CHECKPOINT_VERSION}"]
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(header)))
        fh.write(header)
        for n in names:
            data = np.ascontiguousarray(model.params[n], dtype="<f8").tobytes()
            fh.write(data)
            shape = "x".join(str(d) for d in model.params[n].shape)
            lines.append(f"{n}\t{shape}\t{hashlib.sha256(data).hexdigest()}")
    path.with_name(path.name + ".manifest").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_checkpoint(path: str | Path) -> Seq2SeqModel:
    with open(path, "rb") as fh:
        if fh.read(8) != CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        version, hlen = struct.unpack("<II", fh.read(8))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        header = json.loads(fh.read(hlen).decode("utf-8"))
        params = {}
        for entry in header["arrays"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(8 * count)
            if len(buf) != 8 * count:
                raise ValueError(f"{path}: truncated array {entry['name']}")
            params[entry["name"]] = np.frombuffer(buf, dtype="<f8").reshape(shape)
    config = ModelConfig(**header["config"])
    params = {k: v.astype(config.dtype) for k, v in params.items()}
    return Seq2SeqModel(config, header["langs"], params)

"""Independent reference implementations the tests compare against.

None of these share code with the package; they favour obviousness
over speed.
"""

import math
from functools import lru_cache

import numpy as np


def brute_overlap(sa, sb, n):
    """Materialise the full gram union and sum min/max directly; returns (num, den)."""
    def grams(sents):
        out = []
        for s in sents:
            for tok in s:
                out += [tok[i:i + n] for i in range(len(tok) - n + 1)]
        return out
    ga, gb = grams(sa), grams(sb)
    union = set(ga) | set(gb)
    num = sum(min(ga.count(w), gb.count(w)) for w in union)
    den = sum(max(ga.count(w), gb.count(w)) for w in union)
    return num, den


def brute_bleu(hyps, refs):
    """Corpus BLEU with clipping done by removing matched n-grams from a list."""
    match = [0] * 4
    total = [0] * 4
    for h, r in zip(hyps, refs):
        for n in range(1, 5):
            hg = [tuple(h[i:i + n]) for i in range(len(h) - n + 1)]
            pool = [tuple(r[i:i + n]) for i in range(len(r) - n + 1)]
            total[n - 1] += len(hg)
            for g in hg:
                if g in pool:
                    pool.remove(g)
                    match[n - 1] += 1
    c = sum(len(h) for h in hyps)
    r = sum(len(x) for x in refs)
    if any(t == 0 for t in total) or c == 0:
        return 0.0
    logs = []
    k = 1
    for m, t in zip(match, total):
        if m == 0:
            k *= 2
            logs.append(math.log(100 / (k * t)))
        else:
            logs.append(math.log(100 * m / t))
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return bp * math.exp(sum(logs) / 4)


def brute_distance(a, b):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))
    return d(len(a), len(b))


def closed_form_param_count(V, L, D, F, layers, langs):
    attn = 4 * D * D + 3 * D          # q, k, v, o weights; q, v, o biases
    ln = 2 * D
    ffn = D * F + F + F * D + D
    enc = layers * (2 * ln + attn + ffn) + ln
    dec = layers * (3 * ln + 2 * attn + ffn) + ln
    return V * D + L * D + langs * D + enc + dec + D * V + V


def finite_difference_errors(params, loss_fn, analytic, eps=1e-6):
    """Relative error per parameter array between ``analytic`` gradients and
    central differences of ``loss_fn()`` (which reads ``params`` in place)."""
    errors = {}
    for name, arr in params.items():
        num = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + eps
            up = loss_fn()
            arr[idx] = old - eps
            down = loss_fn()
            arr[idx] = old
            num[idx] = (up - down) / (2 * eps)
        g = analytic[name]
        scale = max(np.linalg.norm(num), np.linalg.norm(g), 1e-12)
        errors[name] = float(np.linalg.norm(num - g) / scale)
    return errors

"""
The numpy Transformer: gradients and greedy decoding
====================================================

The model's backward pass is written by hand, so it is checked against
central finite differences, then trained briefly on a copy task.
"""

import numpy as np

from unmtlab.model import ModelConfig, forward_loss, grad_step, greedy_decode, init_model, make_batch

config = ModelConfig(vocab_size=12, max_len=8, embed_dim=8, hidden_dim=12, seed=0)
model = init_model(config, ["a", "b"])
print(model.num_parameters(), "parameters")

batch = make_batch([[5, 6, 7], [8, 9]], "a", [[7, 6], [9, 10, 11]], "b")
loss, grads = forward_loss(model, batch)
name, idx, eps = "enc.0.ffn.w1", (2, 3), 1e-6
w = model.params[name]
w[idx] += eps
up, _ = forward_loss(model, batch, need_grads=False)
w[idx] -= 2 * eps
down, _ = forward_loss(model, batch, need_grads=False)
w[idx] += eps
print(f"analytic {grads[name][idx]:.8f}  numeric {(up - down) / (2 * eps):.8f}")

# Copy task: the same language on both sides.
model = init_model(ModelConfig(vocab_size=10, max_len=8, embed_dim=32, hidden_dim=64), ["a"])
rng = np.random.default_rng(0)
for step in range(400):
    seqs = [list(rng.integers(5, 10, size=rng.integers(2, 5))) for _ in range(16)]
    loss, grads = forward_loss(model, make_batch(seqs, "a", seqs, "a"))
    grad_step(model, grads, 0.1)
    if step % 100 == 0:
        print(step, round(loss, 3))
print(greedy_decode(model, [[5, 6, 7, 8], [9, 9, 5]], "a", "a"))

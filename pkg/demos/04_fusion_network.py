"""
Training the fusion network
===========================

Cluster heads combine their members' readings with a small multilayer
perceptron trained by backpropagation. Before using it in the simulator we
check its gradients and watch it learn a simple target.
"""

# %%
import numpy as np

from wsnfusion import verify
from wsnfusion.fusion import TrainBatch, fuse, init_weights, train

# %%
# Analytic gradients against central finite differences on 50 random nets.
print(verify.format_report(verify.gradcheck(seed=0, n_nets=50)))

# %%
# Learn the mean of four readings. Loss is printed every 250 epochs.
rng = np.random.default_rng(0)
x = rng.uniform(0, 10, (64, 4))
result = train(init_weights([4, 8, 1], 0), TrainBatch(x, x.mean(axis=1)), eta=0.01, epochs=2000)
for epoch in range(0, 2000, 250):
    print(f"epoch {epoch:4d}  mse {result.loss_history[epoch]:.5f}")
print(f"final mse {result.loss_history[-1]:.2e}")

# %%
# Short clusters are padded with the mean of what arrived, so a single
# reading is treated as a constant cluster.
for readings in ([3.0, 5.0, 7.0, 9.0], [6.0], [2.0, 4.0]):
    print(f"{readings} -> {fuse(result.net, readings):.3f}   (mean {np.mean(readings):.3f})")

# %%
# The simulator trains on synthetic clusters drawn from the deployed layout,
# so the net also learns where the head sits in the readings' spatial trend.
from wsnfusion.config import SimConfig
from wsnfusion.sim import train_fusion_model

model = train_fusion_model(SimConfig(seed=1))
print("trained layer sizes:", model.net.layer_sizes)

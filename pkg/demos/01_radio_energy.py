"""
Radio energy: what a packet costs
=================================

Transmit energy has an electronics term that does not care about distance
and an amplifier term that grows with d**2 out to the crossover distance d0
and with d**4 beyond it. This script walks through the numbers.
"""

# %%
# Default radio constants. d0 is derived from the two amplifier constants.
from wsnfusion.energy import RadioParams, mst_edge_tx_energy, rx_energy, tx_energy

radio = RadioParams()
print(f"d0 = sqrt(e_fs / e_mp) = {radio.d0:.2f} m")

# %%
# One 1000-bit packet at a few distances. The electronics floor is
# 50 uJ. Free-space amplification takes over near the crossover, and past d0
# the fourth-power term dominates quickly.
for d in (0.0, 25.0, 50.0, radio.d0, 150.0, 300.0, 500.0):
    print(f"{d:7.1f} m  tx {tx_energy(1000, d, radio) * 1e6:9.2f} uJ")
print(f"receive  {rx_energy(1000, radio) * 1e6:.2f} uJ at any distance")

# %%
# The two branches meet at d0, but their slopes do not match, so the curve has
# a kink there: the gap across d0 shrinks only linearly with the offset.
for k in (1e-3, 1e-6, 1e-9):
    eps = k * radio.d0
    gap = abs(tx_energy(1000, radio.d0 + eps, radio) - tx_energy(1000, radio.d0 - eps, radio))
    print(f"eps = {k:.0e} * d0   relative gap {gap / tx_energy(1000, radio.d0, radio):.2e}")

# %%
# Intra-cluster edges can also be charged with the normalised-distance form,
# which scales the free-space term by (d / d0)**2. For short cluster edges it
# is far cheaper than the raw d**2 form.
for d in (10.0, 40.0, radio.d0):
    eq1 = mst_edge_tx_energy(1000, d, radio, "eq1")
    eq24 = mst_edge_tx_energy(1000, d, radio, "eq24")
    print(f"edge {d:6.1f} m   raw {eq1 * 1e6:8.3f} uJ   normalised {eq24 * 1e6:8.3f} uJ")

"""
Electing cluster heads
======================

Each alive node is scored on four normalised criteria: residual energy,
closeness to the base station, local density and how tightly its neighbours
sit around it. The score is their plain mean, and only nodes above the 95th
percentile become cluster heads.
"""

# %%
import numpy as np

from wsnfusion import clustering
from wsnfusion.config import SimConfig
from wsnfusion.sim import elect, init_state

config = SimConfig(seed=1)
state = init_state(config)
layout, scores = elect(state)
print(f"{len(state.nodes)} nodes, {len(layout.ch_ids)} heads: {sorted(layout.ch_ids)}")

# %%
# The winners and their four inputs. Fuzzy labels (low / medium / high) are
# shown for reading convenience only; they do not influence the election.
# Their trapezoid breakpoints come from the config's fuzzy_sets key.
by_id = {s.node_id: s for s in scores}
for ch in sorted(layout.ch_ids):
    s = by_id[ch]
    labels = clustering.fuzzy_labels(s, config.trapezoids)
    print(
        f"node {ch:3d}  p={s.p_ch:.3f}  e={s.e_norm:.2f} d={s.d_norm:.2f} "
        f"c={s.c_norm:.2f} theta={s.theta_norm:.2f}  {labels}"
    )

# %%
# Everyone else joins the nearest head, so cluster sizes vary with geometry.
for ch, members in layout.clusters().items():
    print(f"head {ch:3d}: {len(members):2d} members")

# %%
# Scaling every battery by the same factor changes nothing: energy enters the
# score only relative to the fullest node.
for node in state.nodes:
    node.energy *= 0.25
again, _ = elect(state)
print("same heads after uniform drain:", again.ch_ids == layout.ch_ids)

# %%
# Draining only the current heads rotates the role to other nodes.
for ch in layout.ch_ids:
    state.nodes[ch].energy *= 0.2
rotated, _ = elect(state)
print("heads after draining the old ones:", sorted(rotated.ch_ids))
print("overlap:", sorted(set(rotated.ch_ids) & set(layout.ch_ids)))
print("mean p_ch:", np.mean([s.p_ch for s in scores]).round(3))

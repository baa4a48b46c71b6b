"""
Relay load under multihop routing
=================================

Every packet goes along its row and then down its destination's column.
A node relays for sources in its row and destinations in its column, so
its load never exceeds 2 sqrt(n). On average it is about sqrt(n).
"""

import numpy as np

from ratekit import multihop

n = 64 * 64
stats = multihop.relay_traffic_montecarlo(n, trials=100, seed=0)
print(f"center node: mean {stats.mean_center_traffic:.1f}, max {stats.center_traffic.max()}, "
      f"sqrt(n) = {np.sqrt(n):.0f}, bound 2 sqrt(n) = {stats.bound}")
print(f"busiest node over all trials: {stats.max_traffic}")

# load profile along the middle row: heaviest in the middle, light at the edges
row = stats.node_traffic[32]
print("mean load along the middle row:", " ".join(f"{v:.0f}" for v in row[::8]))

for alpha in (4, 7):
    lo = multihop.multihop_sum_rate_lower(10 ** 5, alpha)
    print(f"alpha={alpha}: n=1e5 lower {lo.sum_rate:.1f}, average-load {2 * lo.sum_rate:.1f} bits/s/Hz (L={lo.L})")

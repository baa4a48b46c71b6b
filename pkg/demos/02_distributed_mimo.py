"""
The long-range MIMO hop
=======================

Each receiving cluster forwards quantized observations over a backhaul of
R0 bits per symbol. QMF tunes the quantization distortion; QF simply
matches it to the received power. In the large-array limit both rates
have closed forms, which we check against finite arrays here.
"""

import numpy as np

from ratekit import mimo

spec = mimo.QmfChannelSpec(r0=4.0, n0=1.0, snr=100.0)
level, qmf = mimo.optimal_quantization(spec)
print(f"sigma_q^2 in [{level.sigma_min2:.3f}, {level.sigma_max2:.3f}] -> optimum {level.sigma_q2:.4f}")
print(f"QMF {qmf:.4f}, QF {mimo.qf_rate_asymptotic(spec):.4f}, cut-set {mimo.cutset_rate_asymptotic(spec):.4f}")

# finite arrays: enumerate every receiver cut (m = 12 -> 4096 subsets)
vals = [mimo.qmf_rate_finite(mimo.FiniteChannelMatrix.sample(12, "uniform-phase", s),
                             4.0, 1.0, 100.0, level.sigma_q2) for s in range(50)]
print(f"finite m=12 QMF, 50 draws: {np.mean(vals):.4f} +- {np.std(vals):.4f}")

# random-matrix limit of the per-antenna log-det
for x in (1.0, 10.0, 100.0):
    mc = mimo.logdet_montecarlo(128, x, "complex-gaussian", trials=20, seed=1)
    print(f"x={x:>5g}: C(x)={mimo.c_of_x(x):.4f}  Monte Carlo m=128: {mc:.4f}")

"""
Choosing the reuse factor
=========================

A cluster transmits once every L^2 slots. Larger L means less interference
but fewer transmissions. The TIN rule picks L as the smallest reuse factor
that keeps the strongest interferer below sqrt(SNR). Here we compare that
choice against a brute-force search over (L, SNR).
"""

import numpy as np

from ratekit import core, schemes

n = 10 ** 4
for alpha in (3, 7):
    snr = core.optimal_snr_single_stage(alpha)
    L = core.reuse_factor(snr, alpha)
    tin = schemes.single_stage_sum_rate(n, alpha).sum_rate

    # brute force over reuse factors and a fine SNR grid
    best, arg = 0.0, None
    for cand in range(2, 13):
        for k in np.arange(1, 80, 0.25):
            r = schemes.single_stage_sum_rate(n, alpha, snr=2.0 ** k, L=cand).sum_rate
            if r > best:
                best, arg = r, (cand, k)

    print(f"alpha={alpha}: TIN picks L={L}, SNR=2^{np.log2(snr):.2f} -> {tin:.2f} bits/s/Hz")
    print(f"          grid max at L={arg[0]}, SNR=2^{arg[1]:.2f} -> {best:.2f} ({tin / best:.1%})")

# the interference budget behind each rate
snr = core.optimal_snr_single_stage(7)
full = core.interference_power_bound(n, snr, 5, 7).p_i
near = core.interference_power_dominant(snr, 5, 7).p_i
print(f"\nP_I at alpha=7, L=5: all rings {full:.4g}, nearest ring only {near:.4g}")

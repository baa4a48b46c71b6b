"""
How the coding rate settles across stages
=========================================

Stage t+1's backhaul is q times stage t's local rate, so the sustainable
rate shrinks stage by stage. With q=1 it keeps sliding; with q=2 it locks
onto a positive limit after two or three stages.
"""

from ratekit import coding

for q in (1, 2, 3):
    seq = coding.rate_sequence(3, q, "qmf", 8)
    print(f"alpha=3 q={q}: " + " ".join(f"{r:.3f}" for r in seq.rates))

print("\nlimit R*(alpha, 2):")
for alpha in range(3, 12):
    qmf = coding.coding_rate(alpha, "qmf")
    qf = coding.coding_rate(alpha, "qf")
    print(f"  alpha={alpha:>2}: QMF {qmf:.3f}  QF {qf:.3f}")

"""
Hierarchical cooperation, four ways
===================================

Method 1 is the original recursion. Method 2 applies TDMA only to the
long-range phase, method 3 treats the local exchange as a multiple-access
problem, and method 4 does both. For each method we search over the number
of stages t and the expansion factor q.
"""

from ratekit import multihop, schemes

alpha = 7
for n in (10 ** 3, 10 ** 4, 10 ** 5):
    print(f"n = {n}")
    for m in schemes.HIER_METHODS:
        b = schemes.best_sum_rate(m, n, alpha)
        sizes = ", ".join(f"{s:.1f}" for s in b.cluster_sizes)
        print(f"  {m}: {b.sum_rate:8.2f} bits/s/Hz  t={b.t_used} q={b.q_used}  clusters [{sizes}]")
    print(f"  original scheme (L=3, QF): {schemes.original_hc_baseline(n, alpha).sum_rate:8.2f}")
    print(f"  multihop lower bound:      {multihop.multihop_sum_rate_lower(n, alpha).sum_rate:8.2f}")

# how many stages pay off as the network grows
print("\nmethod-2 stage count, closed form vs search (q=2):")
for n in (1e3, 1e4, 1e5, 1e6, 1e7):
    t_real, t_int = schemes.optimal_stage_count_method2(n, 5)
    print(f"  n={n:.0e}: closed form {t_real:.2f} -> {t_int}, search {schemes.optimal_stage_count_search('m2', n, alpha)}")

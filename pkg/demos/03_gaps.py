"""
How far from capacity?
======================

Outside the exact regions the library bounds the distance between the best
achievable rate and a genie-aided outer bound.
"""

# %%
# For the three-user MAC strategy the genie correlation rho^2 trades the
# size of the region against the gap. ``rho_delta_curve`` tabulates the
# correlation needed for each gap.
import numpy as np

from manytoone import StandardChannel, check_t8, rho_for_gap, t3_gap, t6_gap
from manytoone.scanner import rho_delta_curve

for P3 in (1.0, 10.0):
    curve = rho_delta_curve(1.5, P3, np.linspace(0, 2, 5))
    print(f"P3={P3:g}:", [(d, round(r, 4)) for d, r in curve])

# %%
# The inverse relation, checked on one channel.
ch = StandardChannel(3, [5.0, 1.5], [1.0, 1.0, 1.0])
cert, gap = t3_gap(ch, 0.6)
print(cert.holds, round(gap.gap_bits, 6), round(rho_for_gap(gap.gap_bits, 1.5, 1.0), 6))

# %%
# With every cross gain at most 1, treating interference as noise is within
# K/2 - 1 bits of capacity; the realized gap is usually far smaller.
rng = np.random.default_rng(0)
for K in (3, 5, 8):
    worst = max(
        t6_gap(StandardChannel(K, rng.uniform(-1, 1, K - 1).tolist(), rng.uniform(0.1, 100, K).tolist())).gap_bits
        for _ in range(500)
    )
    print(f"K={K}: worst gap {worst:.3f} bits, bound {K / 2 - 1:g}")

# %%
# Choosing the order in which genies are handed out enlarges that region.
cert, rep = check_t8(StandardChannel(3, [1.3, 0.5], [2.0, 2.0, 2.0]))
print(cert.holds, cert.witness, round(cert.gap_bits, 4))

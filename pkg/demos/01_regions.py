"""
Where does treating interference as noise win?
==============================================

Sweep the two cross gains of a three-user many-to-one channel and print a
coarse map of the regions where each capacity result applies.
"""

# %%
# A channel in standard form: unit direct gains and unit noise, so only the
# cross gains ``a = h2`` and ``b = h3`` and the powers remain. The scan
# overrides the two gains cell by cell.
import numpy as np

from manytoone import StandardChannel
from manytoone.scanner import AxisRange, ScanSpec, boundary_trace, scan

base = StandardChannel(3, [0.0, 0.0], [1.0, 1.0, 1.0])
window = AxisRange(0.0, 3.0, 0.01)
spec = ScanSpec(base, "a", "b", window, window, ("T1", "T2", "T5", "T8", "best"))
region = scan(spec)
print(f"{region.cell_count} cells")

# %%
# ``T1`` is the noisy-interference disc ``a^2 + b^2 <= 1``; ``T2`` needs one
# gain strong enough for a two-user MAC. They never overlap.
both = region.holds["T1"] & region.holds["T2"]
print("cells in T1 and T2:", int(both.sum()))

# %%
# A coarse picture, every 15th cell, with b growing upwards.
symbol = {"T1": "1", "T2": "2"}
for r in range(spec.shape[0] - 1, -1, -15):
    row = ""
    for c in range(0, spec.shape[1], 15):
        labels = [symbol[l] for l in ("T1", "T2") if region.holds[l][r, c]]
        row += labels[0] if labels else "."
    print(row)

# %%
# The traced T1 boundary recovers the unit circle to within a grid step.
pts = np.vstack(boundary_trace(region, "T1"))
print("max deviation from the circle:", float(np.abs(np.hypot(*pts.T) - 1).max()))

# %%
# T8 extends the half-bit gap region T5 (all cross gains at most 1) beyond
# the unit square.
t5, t8 = region.holds["T5"], region.holds["T8"]
print("T5 cells:", int(t5.sum()), " T8 cells:", int(t8.sum()), " T5 outside T8:", int((t5 & ~t8).sum()))

# %%
# The best XC strategy per cell, counted.
names, counts = np.unique(np.array(region.best_strategy), return_counts=True)
print(dict(zip(names.tolist(), counts.tolist())))

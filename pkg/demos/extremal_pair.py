"""
The extremal multiplier pair near L^1
=====================================

A block-sign symbol with one Rademacher frequency per block, tested against a
normalized indicator, gives a pairing of exactly -n 2^-n. Scaled by the
natural L^q norms this grows like n, which is what separates the linear
(q-1)^-1 rate from the square-root rate.
"""

import numpy as np

from walshlab import lower_bound_lerner

print(f"{'n':>3} {'q':>7} {'pairing':>14} {'ratio':>9} {'(q-1)*ratio':>12} {'sqrt(q-1)*ratio':>16}")
for n in (2, 4, 6, 8, 10, 12, 16):
    rep = lower_bound_lerner(n)
    print(f"{n:3d} {rep.q:7.4f} {rep.pairing:14.6e} {rep.ratio:9.4f} "
          f"{rep.scaled_q:12.4f} {rep.scaled_sqrt:16.4f}")

# The first scaling column settles near a constant; the second keeps growing,
# but slowly: the exact ratio is n 2^(-2n/(n+1)), so sqrt(q-1)*ratio behaves
# like sqrt(n)/4 for large n.
ns = np.array([4, 16, 64, 256])
print("closed form sqrt(q-1)*ratio:", np.round(np.sqrt(ns) * 2.0 ** (-2 * ns / (ns + 1)), 3))

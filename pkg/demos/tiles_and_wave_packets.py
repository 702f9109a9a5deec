"""
Tiles, wave packets and the projection expansion
================================================

Every Fourier partial sum T_[0,n) is a sum of rank-one projections onto wave
packets. Each packet, multiplied by w_n, is a signed Haar function.
"""

import numpy as np

from walshlab.dyadic import FrequencyInterval
from walshlab.tiles import (all_tiles, apply_tiles, gram_matrix, intersection_matrix,
                            projection_tile_expansion, signed_haar_factor, wave_packet)
from walshlab.walsh import haar_function, project, walsh_function

N = 6
n = 45                      # binary 101101
tiles = projection_tile_expansion(n, N)
print(f"[0, {n}) at N={N} uses {len(tiles)} tiles; levels:",
      sorted({p.level for p in tiles}))

rng = np.random.default_rng(0)
f = rng.standard_normal(1 << N)
err = np.abs(apply_tiles(f, tiles, N) - project(f, FrequencyInterval(0, n))).max()
print(f"expansion reproduces the partial sum to {err:.1e}")

p = tiles[-1]
signed = walsh_function(n, N) * wave_packet(p, N)
sign = signed_haar_factor(n, p, N)
print(f"tile {p}: w_n times its packet equals {sign:+d} times the Haar function on {p.interval}:",
      np.allclose(signed, sign * haar_function(p.interval, N)))

# Orthogonality is decided by geometry alone: two packets are orthogonal
# exactly when their tiles are disjoint rectangles.
everything = all_tiles(4)
same = np.array_equal(np.abs(gram_matrix(everything, 4)) > 1e-12, intersection_matrix(everything))
print(f"{len(everything)} tiles at N=4, Gram support equals the intersection pattern: {same}")

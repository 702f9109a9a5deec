"""
Reading a sparse certificate
============================

Build an R_{q,1} atom, certify the pairing <T_m f, phi> on a spiky signal and
look at what the certificate records: the stopping collection, per-node
identity checks and the ratio against the sparse form.
"""

import numpy as np

from walshlab import AtomRq1, sparse_certify_multiplier
from walshlab.sparse import sparse_certify_lambda

N = 10
rng = np.random.default_rng(3)
f = rng.standard_normal(1 << N)
f[100:104] += 60.0          # a spike forces a stopping interval
phi = rng.standard_cauchy(1 << N)

atom = AtomRq1(1.5, 2, {3: [(4, 6), (7, 8)], 7: [(70, 90), (100, 120)]})
cert = sparse_certify_multiplier(f, phi, atom, q=1.5)

print(f"pairing {cert.pairing:+.5f}, sparse form {cert.form:.5f}, ratio {cert.ratio:.4f}")
print(f"{len(cert.collection)} intervals, smallest sparseness margin {cert.maxima['min_margin']:.3f}")
for node in cert.nodes[:4]:
    print(f"  {node.interval}: depth {node.depth}, {node.children} children, "
          f"cross terms {node.checks['cross_error']:.1e}")
print("violations:", cert.violations or "none")

# The same machinery covers the square function S_lambda, split into its
# martingale part and two good-collection residues.
lam = sparse_certify_lambda(f, np.abs(phi), lam=3, r=1.5)
for name, part in lam.parts.items():
    print(f"  {name:10s} ratio {part.ratio:.3f}, {len(part.collection)} intervals")
print("lambda certificate clean:", lam.ok)

"""Grid refinement exposes the infinite energy of a jump.

For the unit step and a monotone kernel the continuum double integral
diverges when p > 1: the near-jump pair sum scales like h^(1-p), so
each grid doubling multiplies the value by about 2^(p-1).  At p = 1
that rate degenerates to 1 and the values creep up only
logarithmically, the signature of a bounded-variation interface.

Run:  python demos/04_step_divergence.py
"""

import nlsobolev as nl

ns = [1024, 2048, 4096, 8192]

for p in (2.0, 1.5, 1.0):
    rep = nl.step_divergence(p, 0.1, ns)
    tag = "" if p > 1 else "  (exploration mode, uncalibrated)"
    print(f"p = {p}{tag}")
    print(f"  {'n':>6} {'value':>12} {'doubling ratio':>15}")
    for row in rep.rows:
        ratio = "-" if row.ratio is None else f"{row.ratio:.4f}"
        print(f"  {row.n:>6} {row.value:>12.4f} {ratio:>15}")
    print(f"  expected asymptotic rate 2^(p-1) = {2 ** (p - 1):.4f}; "
          f"divergence flag: {rep.divergence_flag}\n")

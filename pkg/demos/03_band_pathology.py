"""Why monotonicity matters: the band kernel misses a non-Sobolev step.

With phi supported on (1, 2) and u the indicator of (0, 1), every pair
of points realizes a difference quotient of exactly 0 or 1/delta.  For
delta < 1/2 the value 1/delta lands above the band and 0 below it, so
the functional vanishes identically although u is nowhere near a
Sobolev function.  The zero is exact, summand by summand, not merely
small.  For delta in (1/2, 1) the quotient falls inside the band and
the value jumps to a large positive number.

Run:  python demos/03_band_pathology.py
"""

import nlsobolev as nl

deltas = [0.75, 0.6, 0.51, 0.49, 0.25, 0.1]
rep = nl.band_pathology(deltas, grid_n=2048)

print("u = 1_(0,1) on (-1,2), normalized band kernel 1_(1,2), p = 2")
print(f"{'delta':>7} {'1/delta':>9} {'in band?':>9} {'value':>14}")
for row in rep.rows:
    q = 1.0 / row.delta
    print(f"{row.delta:>7.2f} {q:>9.3f} {str(1 < q < 2):>9} {row.value:>14.6g}")

zeros = [row.value for row in rep.rows if row.delta < 0.5]
print(f"\nall values below delta = 1/2 are binary zero: "
      f"{all(v == 0.0 for v in zeros)}")
print("a monotone kernel cannot do this: anything reaching past the")
print("threshold keeps weight there, which is demo 04's divergence")

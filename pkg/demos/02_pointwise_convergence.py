"""Pointwise convergence: Lambda_delta approaches the p-Dirichlet energy.

Two sweeps with the normalized indicator kernel:

  * u(x) = x on (0, 1): the value has the closed form (1 - delta)^2 at
    p = 2, so the table doubles as a quadrature accuracy check.
  * u(x) = sin(2 pi x) on (0, 1): the ratio to int |u'|^p drifts to 1
    as delta shrinks, for several p.

Run:  python demos/02_pointwise_convergence.py
"""

import nlsobolev as nl

# --- affine: exact reference available -------------------------------
f = nl.affine_function([1.0], 0.0, nl.bounded_box([0.0], [1.0]))
k = nl.normalize(nl.indicator_kernel(), 1, 2.0)
rep = nl.delta_sweep(f, k, 2.0, [0.4, 0.2, 0.1, 0.05], grid_n=4096)

print("u(x) = x on (0,1), p = 2, normalized indicator kernel, grid 4096")
print(f"{'delta':>7} {'value':>12} {'(1-delta)^2':>12} {'rel err':>10}")
for row in rep.rows:
    exact = (1 - row.delta) ** 2
    print(f"{row.delta:>7.3f} {row.value:>12.6f} {exact:>12.6f} "
          f"{abs(row.value - exact) / exact:>10.2e}")

# --- sine: several exponents ------------------------------------------
f = nl.sine_function(1.0, 1.0, nl.bounded_box([0.0], [1.0]))
deltas = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125]
print("\nu(x) = sin(2 pi x) on (0,1), grid 8192: ratio value / energy")
print(f"{'delta':>8}" + "".join(f"  p={p:<6}" for p in (1.5, 2.0, 3.0)))
columns = {}
for p in (1.5, 2.0, 3.0):
    kp = nl.normalize(nl.indicator_kernel(), 1, p)
    rp = nl.delta_sweep(f, kp, p, deltas, grid_n=8192)
    columns[p] = [row.ratio for row in rp.rows]
for i, d in enumerate(deltas):
    print(f"{d:>8.4f}" + "".join(f"  {columns[p][i]:<8.4f}" for p in (1.5, 2.0, 3.0)))
print("(each column drifts toward 1; the gap scales like delta)")

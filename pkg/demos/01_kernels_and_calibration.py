"""Kernels, structural conditions, and calibration.

Builds each named kernel shape, checks the growth / boundedness /
monotonicity conditions, and rescales so that

    gamma(d, p) * int_0^inf phi(t) t^-(p+1) dt = 1,

the calibration that makes the small-delta limit of the non-local
functional equal the p-Dirichlet energy with constant 1.

Run:  python demos/01_kernels_and_calibration.py
"""

import math

import nlsobolev as nl

P, D = 2.0, 1

kernels = {
    "indicator 1_(1,inf)": nl.indicator_kernel(),
    "band 1_(1,2)": nl.band_kernel(1.0, 2.0),
    "envelope a=b=1": nl.envelope_kernel(1.0, 1.0, P),
    "power t^3 cut at 1": nl.power_cutoff_kernel(3.0, 1.0),
    "tabulated ramp": nl.tabulated_kernel([0.0, 0.5, 1.0, 2.0], [0.0, 0.0, 1.0, 1.0]),
}

print(f"structural conditions at p = {P}")
print(f"{'kernel':<22} {'growth':>8} {'bounded':>8} {'monotone':>9} {'integral':>12}")
for name, k in kernels.items():
    rep = nl.validate(k, P, D)
    integral = nl.normalization_integral(k, P)
    print(f"{name:<22} {str(rep.cond_growth_ok):>8} {str(rep.cond_bounded_ok):>8} "
          f"{str(rep.cond_monotone_ok):>9} {integral:>12.6f}")

print("\nafter normalization (condition value should be exactly 1):")
for name, k in kernels.items():
    kn = nl.normalize(k, D, P)
    rep = nl.validate(kn, P, D)
    print(f"{name:<22} scale_c = {kn.scale_c:<12.8f} "
          f"condition value = {rep.normalization_value:.12f}")

# the band kernel is the classic non-monotone counterexample
band = nl.validate(nl.normalize(nl.band_kernel(), D, P), P, D)
print(f"\nband kernel monotone? {band.cond_monotone_ok} "
      "(this failure is what permits the pathology in demo 03)")

# angular moments: exactly 2 on the two-point sphere, pi at (d=2, p=2)
print(f"\ngamma(1, p) = {nl.gamma_dp(1, P)} for every p")
print(f"gamma(2, 2) = {nl.gamma_dp(2, 2.0):.12f} vs pi = {math.pi:.12f}")

# every kernel sits below its non-decreasing envelope
k = nl.band_kernel(1.0, 2.0)
env = nl.envelope_for(k, P)
ts = [0.3, 0.9, 1.0, 1.5, 2.5]
print("\nband kernel vs its envelope majorant:")
for t in ts:
    print(f"  t = {t}: phi = {nl.eval_kernel(k, t):.3f} <= "
          f"envelope = {nl.eval_kernel(env, t):.3f}")

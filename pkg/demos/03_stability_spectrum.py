"""Second variation of area on truncated cones: exact spectrum, discrete
oracle and the stability threshold.

Run with:  python3 demos/03_stability_spectrum.py
"""

import math

import conelab as cl

print("=== radial Dirichlet spectrum on [eps, 1]")
n, eps = 7, 1e-2
for k in (1, 2, 3):
    exact, _ = cl.radial_eigenvalue(n, eps, k)
    fd = cl.radial_eigenvalue_fd(n, eps, k)
    print(f"  k = {k}: (n-2)^2/4 + (k pi/log eps)^2 = {exact:.8f}, "
          f"finite differences {fd:.8f}")

print("\n=== stability margins and the sharp threshold")
for nn in (3, 4, 7, 10):
    kstar = cl.threshold_bisect(nn)
    print(f"  n = {nn:2d}: kappa* = {kstar:.10f} "
          f"(closed form {cl.threshold_kappa(nn):.10f})")

print("\n=== margins around the threshold for n = 7")
kstar = cl.threshold_kappa(7)
for dk in (-0.05, -0.01, 0.0, 0.01, 0.05):
    v = cl.stability_verdict(7, kstar + dk)
    word = "stable" if v.stable else "UNSTABLE"
    print(f"  kappa = kappa* {dk:+.2f}: margin {v.margin:+.5f} -> {word}")

print("\n=== the discrete Rayleigh quotient sees the same sign")
for dk in (-0.05, 0.05):
    prob = cl.ConeStabilityProblem(n=7, kappa=kstar + dk, epsilon=1e-4)
    q = cl.rayleigh_min(prob, basis_size=256)
    print(f"  kappa = kappa* {dk:+.2f}: min quotient {q:+.5f}")

print("\n=== Simons cone (link S^3 x S^3 of radius sqrt(2)/2, |B|^2 = 6)")
v = cl.stability_verdict(7, 1.0, B2_link=6.0)
print(f"  margin = (n-2)^2/4 - |B|^2 = 6.25 - 6 = {v.margin} -> "
      f"{'stable' if v.stable else 'unstable'}")

print("\n=== index form on an exact eigenfunction")
prob = cl.ConeStabilityProblem(n=7, kappa=0.8, epsilon=1e-2)
eig, ef = cl.radial_eigenvalue(7, 1e-2, 1)
got = cl.index_form(prob, ef)
norm2 = -math.log(1e-2) / 2
print(f"  I(phi_1, phi_1) = {got:.8f} "
      f"= (eig + c) ||phi_1||^2 = {(eig + prob.zeroth_order) * norm2:.8f}")

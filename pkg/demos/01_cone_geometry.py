"""Tour of the rotationally symmetric metrics: cones, capped cones and the
positive-curvature variant.

Run with:  python3 demos/01_cone_geometry.py
"""

import math

import numpy as np

import conelab as cl

KAPPA = 0.6
AMBIENT = 8  # dimension n+1, so hypersurfaces have dimension n = 7
N = AMBIENT - 1

print(f"=== spherical cone, kappa = {KAPPA}, ambient dimension {AMBIENT}")
cone = cl.cone_profile(KAPPA, AMBIENT)
for rho in (0.5, 1.0, 4.0):
    c = cl.curvature(cone, rho)
    print(f"  rho = {rho:4.1f}: K_radial = {c.K_radial:+.4f}, "
          f"K_spherical = {c.K_spherical:+.4f} "
          f"(expected {(1 - KAPPA**2) / (KAPPA * rho) ** 2:+.4f})")

vol = cl.volume_growth(cone, 100.0)
print(f"  volume growth Vol(B_r)/r^{N + 1} = {vol:.6f} "
      f"= omega_n kappa^n/(n+1) = "
      f"{cl.sphere_measure(N) * KAPPA**N / (N + 1):.6f}")

print(f"\n=== capped cone: the vertex is replaced by a smooth convex cap")
capped = cl.capped_cone_profile(KAPPA, AMBIENT)
k_tail, rho0 = capped.linear_tail
print(f"  cap ends at intrinsic radius rho0 = {rho0:.6f} "
      f"(must lie in (1, 1/kappa) = (1, {1 / KAPPA:.4f}))")
rep = cl.condition_check(capped, np.geomspace(1e-2, 1e2, 80))
print(f"  C1 Ricci >= 0: {rep.C1} (min entry {rep.min_ricci:+.2e})")
print(f"  C2 volume ratio at the largest radius: {rep.C2:.6f}")
print(f"  C3 sup rho^2 |K|: {rep.C3:.4f}")

print("\n=== conformally flat coordinates e^{Phi(r)} sum dx_i^2")
conf = cl.warped_to_conformal(capped)
for r in (0.05, 1.0, 50.0):
    dphi = float(conf.dphi_val(r))
    lo = -2 * (1 - KAPPA) / r
    print(f"  r = {r:6.2f}: Phi'(r) = {dphi:+.5f}, "
          f"required band [{lo:+.5f}, 0]")

print("\n=== the non-radial Ricci constant and the nonexistence verdict")
kp = cl.nonradial_ricci_constant(capped)
hardy = (N - 2) ** 2 / 4
verdict = cl.nonexistence_verdict(kp, N)
print(f"  kappa' = {kp:.6f} (closed form {(N - 1) * (1 / KAPPA**2 - 1):.6f})")
print(f"  Hardy constant (n-2)^2/4 = {hardy}")
print(f"  verdict: {verdict.value}")
kstar = cl.threshold_kappa(N)
print(f"  this flips exactly at kappa* = {kstar:.6f}: at kappa = kappa* the "
      f"constant equals {(N - 1) * (1 / kstar**2 - 1):.6f}")

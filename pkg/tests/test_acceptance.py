"""Acceptance suite: one check per headline property, each reporting a
single PASS/FAIL line with its measured figure of merit."""

import math
import time

import numpy as np
import pytest

import conelab as cl
from conelab import ScalarFieldPolar


def _report(name: str, ok: bool, detail: str = ""):
    tag = "PASS" if ok else "FAIL"
    line = f"[{tag}] {name}" + (f": {detail}" if detail else "")
    print(line)
    assert ok, line


def test_01_threshold_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(3, 11):
        got = cl.threshold_bisect(n)
        worst = max(worst, abs(got - 2 * math.sqrt(n - 1) / n))
    dt = time.perf_counter() - t0
    _report("threshold identity kappa* = (2/n) sqrt(n-1), n = 3..10",
            worst < 1e-10 and dt < 1.0,
            f"worst error {worst:.2e}, {dt:.2f} s")


def test_02_eigenvalue_law():
    t0 = time.perf_counter()
    worst_rel, worst_order = 0.0, 2.0
    for n in (3, 7):
        for eps in (1e-2, 1e-4):
            for k in (1, 2, 3):
                exact, _ = cl.radial_eigenvalue(n, eps, k)
                fd = cl.radial_eigenvalue_fd(n, eps, k, 10_000)
                worst_rel = max(worst_rel, abs(fd - exact) / abs(exact))
            # order measured on coarser grids, where the mesh error still
            # dominates the eigensolver's own roundoff (~1e-9)
            e1 = abs(cl.radial_eigenvalue_fd(n, eps, 1, 2_500)
                     - cl.radial_eigenvalue(n, eps, 1)[0])
            e2 = abs(cl.radial_eigenvalue_fd(n, eps, 1, 5_000)
                     - cl.radial_eigenvalue(n, eps, 1)[0])
            order = math.log2(e1 / e2)
            if abs(order - 2.0) > abs(worst_order - 2.0):
                worst_order = order
    dt = time.perf_counter() - t0
    _report("radial eigenvalue law (n-2)^2/4 + (k pi/log eps)^2",
            worst_rel < 1e-3 and abs(worst_order - 2.0) <= 0.2 and dt < 10.0,
            f"worst rel err {worst_rel:.2e}, order {worst_order:.2f}, {dt:.1f} s")


def _random_polar_field(rng):
    c1, c2, c3 = rng.uniform(-1, 1, 3)
    a = rng.uniform(0.5, 2.5)
    b = rng.uniform(0.5, 2.0)
    return ScalarFieldPolar(
        F=lambda t, r: c1 * t * r**a + c2 * t**2 * np.sin(r) + c3 * r**b,
        F_theta=lambda t, r: c1 * r**a + 2 * c2 * t * np.sin(r),
        F_r=lambda t, r: (c1 * a * t * r ** (a - 1) + c2 * t**2 * np.cos(r)
                          + c3 * b * r ** (b - 1)),
        F_thetatheta=lambda t, r: 2 * c2 * np.sin(r) + 0.0 * t,
        F_rr=lambda t, r: (c1 * a * (a - 1) * t * r ** (a - 2)
                           - c2 * t**2 * np.sin(r)
                           + c3 * b * (b - 1) * r ** (b - 2)),
        F_rtheta=lambda t, r: c1 * a * r ** (a - 1) + 2 * c2 * t * np.cos(r),
    )


def test_03_operator_triple_path():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    ambient = 8
    metrics = [cl.cone_conformal(0.8, ambient),
               cl.warped_to_conformal(cl.capped_cone_profile(0.8, ambient))]
    worst = 0.0
    for metric in metrics:
        for _ in range(50):
            field = _random_polar_field(rng)
            theta = rng.uniform(-0.9, 0.9)
            r = rng.uniform(0.5, 2.0)
            w = r * math.sqrt(1 - theta**2)
            x = np.zeros(ambient)
            x[0], x[-1] = w, theta * r
            lp = float(cl.L_polar(metric, field, theta, r))
            lc = cl.L_conformal(metric, field.to_cartesian(ambient), x)
            lf = cl.L_fd_oracle(metric, field.to_cartesian(ambient), x)
            for u, v in ((lp, lc), (lp, lf), (lc, lf)):
                tol = max(1e-6, 1e-4 * max(abs(u), abs(v)))
                worst = max(worst, abs(u - v) / tol)
    dt = time.perf_counter() - t0
    _report("operator triple-path agreement on 100 random fields",
            worst < 1.0 and dt < 30.0,
            f"worst error {worst:.3f} of tolerance, {dt:.1f} s")


def test_04_barrier_verification():
    cases = ((7, 1.0), (7, 0.8), (4, 0.9), (3, 0.95))
    overall = True
    details = []
    for n, kappa in cases:
        t0 = time.perf_counter()
        spec = cl.BarrierSpec.from_threshold(n, kappa)
        rep = cl.barrier_check(cl.cone_conformal(kappa, n + 1), spec)
        dt = time.perf_counter() - t0
        ok = rep.passed and rep.bound_ok and dt < 20.0
        overall = overall and ok
        details.append(f"(n={n},k={kappa}): margin "
                       f"{rep.min_margin_over_bound:+.1e}, {dt:.1f} s")
    _report("barrier sign and lower bound on the default grid", overall,
            "; ".join(details))


def test_05_exponent_identity():
    worst = 0.0
    floor_ok = True
    for n in range(3, 11):
        kstar = cl.threshold_kappa(n)
        for kappa in np.linspace(kstar, 1.0, 200):
            p = cl.barrier_exponent(n, float(kappa))
            worst = max(worst, abs(n * (kappa * p - 1) + 1 - p**2))
            floor_ok = floor_ok and p >= 1.0 / kappa - 1e-12
    _report("barrier exponent solves n(kp - 1) + 1 - p^2 = 0 with p >= 1/k",
            worst < 1e-12 and floor_ok, f"worst residual {worst:.1e}")


def test_06_cap_construction():
    ok = True
    details = []
    for kappa in (0.5, 0.7, 0.9):
        prof = cl.capped_cone_profile(kappa, 8)
        k_tail, rho0 = prof.linear_tail
        slopes = np.asarray(
            prof.dlam_val(np.linspace(rho0 * 1e-3, rho0, 1000)), float)
        slope_ok = bool(np.all(slopes >= kappa - 1e-8)
                        and np.all(slopes <= 1.0 + 1e-8))
        rho0_ok = 1.0 < rho0 < 1.0 / kappa
        conf = cl.warped_to_conformal(prof)
        r = np.geomspace(1e-2, 1e2, 300)
        dphi = np.asarray(conf.dphi_val(r), float)
        band_ok = bool(np.all(dphi <= 1e-6 / r)
                       and np.all(dphi >= (-2 * (1 - kappa) - 1e-6) / r))
        target = math.sqrt(1 - kappa**2) / kappa
        # the cap slope is flat to machine precision just below r = 1, so
        # the FD error collapses superquadratically; sample h where the
        # truncation error still dominates roundoff
        errs = [abs((cl.cap_function(1 + h, kappa)
                     - cl.cap_function(1 - h, kappa)) / (2 * h) - target)
                for h in (0.4, 0.2, 0.1)]
        order = math.log2(errs[0] / errs[1])
        fd_ok = errs[0] > errs[1] > errs[2] and order >= 1.0
        ok = ok and slope_ok and rho0_ok and band_ok and fd_ok
        details.append(f"k={kappa}: rho0={rho0:.4f}, slope order {order:.1f}")
    _report("cap construction (slopes, rho0 bounds, Phi' band, cap slope)",
            ok, "; ".join(details))


def test_07_kprime_identity():
    ok = True
    details = []
    for n_amb, kappa in ((8, 0.6), (5, 0.8)):
        n = n_amb - 1
        kp = cl.nonradial_ricci_constant(cl.capped_cone_profile(kappa, n_amb))
        expect = (n - 1) * (1 / kappa**2 - 1)
        rel = abs(kp - expect) / expect
        ok = ok and rel < 1e-4
        details.append(f"n={n}: rel {rel:.1e}")
    # at kappa = kappa* the constant collapses onto the Hardy constant
    for n in (4, 7):
        kstar = cl.threshold_kappa(n)
        kp_star = (n - 1) * (1 / kstar**2 - 1)
        ok = ok and abs(kp_star - (n - 2) ** 2 / 4) < 1e-10
        # verdict boundary coincides with the stability threshold
        for kappa in np.arange(0.4, 1.0, 1e-3):
            kp = (n - 1) * (1 / kappa**2 - 1)
            nonexist = cl.nonexistence_verdict(kp, n) is \
                cl.NonexistenceVerdict.NoStableHypersurface
            ok = ok and (nonexist == (kappa < kstar - 1e-12))
    _report("non-radial Ricci constant (n-1)(1/k^2 - 1) and its verdict"
            " boundary", ok, "; ".join(details))


def test_08_empirical_dichotomy():
    ok = True
    details = []
    for n, lo, hi in ((4, 0.80, 0.93), (7, 0.63, 0.76)):
        t0 = time.perf_counter()
        rows, khat = cl.threshold_scan(n, np.arange(lo, hi, 0.01),
                                       W=1.0, grid_size=256)
        dt = time.perf_counter() - t0
        kstar = cl.threshold_kappa(n)
        ok = ok and abs(khat - kstar) <= 0.03 and dt < 300.0
        details.append(f"n={n}: khat={khat:.3f} vs kstar={kstar:.4f}, "
                       f"{dt:.0f} s")
    _report("equivariant minimization locates the threshold within 0.03",
            ok, "; ".join(details))


def test_09_cross_module_second_variation():
    ok = True
    details = []
    eps = 0.1
    for n in (4, 7):
        kstar = cl.threshold_kappa(n)
        for kappa in (kstar - 0.05, kstar + 0.05):
            grid = cl.default_grid(1.0, 2048, w1_frac=1e-3)
            prob = cl.EquivariantAreaProblem(
                metric=cl.cone_conformal(kappa, n + 1), n=n, W=1.0,
                grid=grid, u=np.zeros_like(grid))
            phi = cl.eigenmode_perturbation(grid, n, kappa, eps)
            t = 1e-3 / np.max(np.abs(phi))
            lhs = cl.second_variation_fd(prob, phi, t=t)
            _, ef = cl.radial_eigenvalue(n, eps, 1)
            rhs = kappa ** (n - 1) * cl.index_form(
                cl.ConeStabilityProblem(n=n, kappa=kappa, epsilon=eps), ef)
            rel = abs(lhs - rhs) / abs(rhs)
            ok = ok and rel < 1e-2
            details.append(f"(n={n},k={kappa:.3f}): rel {rel:.1e}")
    _report("second variation of area = kappa^(n-1) x index form", ok,
            "; ".join(details))


def test_10_simons_cone_margin():
    margin = cl.stability_verdict(7, 1.0, B2_link=6.0).margin
    _report("Simons cone margin 6.25 - 6 = 0.25",
            abs(margin - 0.25) < 1e-12, f"margin {margin!r}")


def test_11_volume_growth():
    ok = True
    details = []
    for n_amb, kappa in ((8, 0.8), (5, 0.6)):
        n = n_amb - 1
        cone_val = cl.volume_growth(cl.cone_profile(kappa, n_amb), 100.0)
        expect = cl.sphere_measure(n) * kappa**n / (n + 1)
        rel = abs(cone_val - expect) / expect
        capped_val = cl.volume_growth(cl.capped_cone_profile(kappa, n_amb),
                                      1e3)
        rel_capped = abs(capped_val - expect) / expect
        ok = ok and rel < 1e-6 and rel_capped < 1e-2
        details.append(f"n={n}: cone rel {rel:.1e}, capped rel {rel_capped:.1e}")
    _report("Euclidean volume growth constant omega_n kappa^n/(n+1)", ok,
            "; ".join(details))

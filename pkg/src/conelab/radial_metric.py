"""Rotationally symmetric model metrics.

Two interchangeable descriptions are used throughout:

* warped-product polar form   ds^2 = d(rho)^2 + lambda(rho)^2 dtheta^2,
* radial conformally flat form ds^2 = e^{Phi(r)} sum_i dx_i^2,

together with their curvature, volume growth and the asymptotic
non-radial Ricci constant that drives the non-existence verdict.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import ConversionError, InversionError

__all__ = [
    "WarpedProfile",
    "ConformalRadialProfile",
    "CurvatureReport",
    "NonexistenceVerdict",
    "cone_profile",
    "cone_conformal",
    "cap_function",
    "cap_slope",
    "capped_cone_profile",
    "positive_curvature_profile",
    "table_profile",
    "warped_to_conformal",
    "curvature",
    "volume_growth",
    "condition_check",
    "nonradial_ricci_constant",
    "nonexistence_verdict",
    "sphere_measure",
    "threshold_kappa",
]

QUAD_TOL = 1e-10
INVERT_TOL = 1e-12


def threshold_kappa(n: int) -> float:
    """Sharp cone-opening threshold 2*sqrt(n-1)/n for hypersurface dim n."""
    return 2.0 * math.sqrt(n - 1.0) / n


def sphere_measure(n: int) -> float:
    """Riemannian measure of the unit n-sphere S^n."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def _fd_step(rho):
    return np.maximum(1e-5, 1e-5 * np.abs(rho))


@dataclass(frozen=True)
class WarpedProfile:
    """Warped-product metric d(rho)^2 + lambda(rho)^2 dtheta^2 on R^{n+1}.

    ``linear_tail=(kappa, rho0)`` records that lambda is exactly linear with
    slope kappa for rho >= rho0; it is required by the conformal conversion.
    """

    n_ambient: int
    lam: Callable
    dlam: Optional[Callable] = None
    d2lam: Optional[Callable] = None
    pole_regular: bool = False
    domain_min: float = 0.0
    linear_tail: Optional[Tuple[float, float]] = None
    label: str = "warped"

    def __post_init__(self):
        if self.n_ambient < 3:
            raise ValueError("ambient dimension must be >= 3")
        sample = np.geomspace(max(self.domain_min, 1e-3), 1e3, 13)
        if np.any(np.asarray(self.lam(sample)) <= 0):
            raise ValueError("lambda must be positive on the sampled domain")

    # derivative access with central-difference fallback
    def lam_val(self, rho):
        return self.lam(np.asarray(rho, dtype=float))

    def dlam_val(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.dlam is not None:
            return self.dlam(rho)
        h = _fd_step(rho)
        return (self.lam(rho + h) - self.lam(rho - h)) / (2 * h)

    def d2lam_val(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.d2lam is not None:
            return self.d2lam(rho)
        h = _fd_step(rho)
        return (self.lam(rho + h) - 2 * self.lam(rho) + self.lam(rho - h)) / h**2


@dataclass(frozen=True)
class ConformalRadialProfile:
    """Radial conformally flat metric e^{Phi(r)} sum dx_i^2 on R^{n_ambient}."""

    n_ambient: int
    phi: Callable
    dphi: Optional[Callable] = None
    d2phi: Optional[Callable] = None
    kappa_hint: Optional[float] = None
    label: str = "conformal"

    def phi_val(self, r):
        return self.phi(np.asarray(r, dtype=float))

    def dphi_val(self, r):
        r = np.asarray(r, dtype=float)
        if self.dphi is not None:
            return self.dphi(r)
        h = _fd_step(r)
        return (self.phi(r + h) - self.phi(r - h)) / (2 * h)

    def d2phi_val(self, r):
        r = np.asarray(r, dtype=float)
        if self.d2phi is not None:
            return self.d2phi(r)
        h = _fd_step(r)
        return (self.phi(r + h) - 2 * self.phi(r) + self.phi(r - h)) / h**2


@dataclass(frozen=True)
class CurvatureReport:
    """Sectional and Ricci curvature of a warped profile at one radius."""

    rho: float
    K_radial: float
    K_spherical: float
    Ric_radial: float
    Ric_spherical: float


class NonexistenceVerdict(enum.Enum):
    NoStableHypersurface = "NoStableHypersurface"
    Inconclusive = "Inconclusive"


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def cone_profile(kappa: float, n_ambient: int) -> WarpedProfile:
    """Spherical cone: lambda(rho) = kappa * rho, kappa in (0, 1]."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    k = float(kappa)
    return WarpedProfile(
        n_ambient=n_ambient,
        lam=lambda rho: k * np.asarray(rho, dtype=float),
        dlam=lambda rho: np.full_like(np.asarray(rho, dtype=float), k),
        d2lam=lambda rho: np.zeros_like(np.asarray(rho, dtype=float)),
        pole_regular=(k == 1.0),
        domain_min=0.0,
        linear_tail=(k, 1.0),
        label=f"cone(kappa={k:g})",
    )


def cone_conformal(kappa: float, n_ambient: int) -> ConformalRadialProfile:
    """Cone metric in conformal coordinates: Phi = 2 log k - 2(1-k) log r."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    k = float(kappa)

    def phi(r):
        r = np.asarray(r, dtype=float)
        return 2 * math.log(k) - 2 * (1 - k) * np.log(r)

    def dphi(r):
        return -2 * (1 - k) / np.asarray(r, dtype=float)

    def d2phi(r):
        return 2 * (1 - k) / np.asarray(r, dtype=float) ** 2

    return ConformalRadialProfile(
        n_ambient=n_ambient, phi=phi, dphi=dphi, d2phi=d2phi,
        kappa_hint=k, label=f"cone_conformal(kappa={k:g})",
    )


# ---------------------------------------------------------------------------
# the smooth convex cap and the capped cone
# ---------------------------------------------------------------------------

def _arctan_xi(s):
    """arctan(xi(s)) for xi(s) = s*(exp(1/(1-s^2)) - e), vectorized on [0, 1)."""
    s = np.asarray(s, dtype=float)
    out = np.full(s.shape, math.pi / 2.0)
    g = np.full(s.shape, np.inf)
    interior = np.abs(s) < 1.0
    g[interior] = 1.0 / (1.0 - s[interior] ** 2)
    safe = interior & (g < 500.0)
    out[safe] = np.arctan(s[safe] * (np.exp(g[safe]) - math.e))
    out[s == 0.0] = 0.0
    return out


def _dxi_over_1pxi2(s):
    """xi'(s) / (1 + xi(s)^2), vanishing smoothly as s -> 1^-."""
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    g = np.full(s.shape, np.inf)
    interior = np.abs(s) < 1.0
    g[interior] = 1.0 / (1.0 - s[interior] ** 2)
    safe = interior & (g < 350.0)
    ss, gg = s[safe], g[safe]
    E = np.exp(gg)
    xi = ss * (E - math.e)
    dxi = (E - math.e) + ss * E * 2 * ss * gg**2
    out[safe] = dxi / (1.0 + xi**2)
    return out


def cap_slope(r, kappa: float):
    """Radial derivative of the cap height Lambda; equals sqrt(1-k^2)/k
    for r >= 1 and rises smoothly from 0 inside the unit ball."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    c0 = math.sqrt(1.0 - kappa**2) / kappa
    r = np.asarray(r, dtype=float)
    inside = r < 1.0
    out = np.full(r.shape, c0)
    out[inside] = c0 * (2.0 / math.pi) * _arctan_xi(r[inside])
    return out


def _cap_curvature(r, kappa: float):
    """Second radial derivative of Lambda (zero outside the unit ball)."""
    c0 = math.sqrt(1.0 - kappa**2) / kappa
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    inside = r < 1.0
    out[inside] = c0 * (2.0 / math.pi) * _dxi_over_1pxi2(r[inside])
    return out


def cap_function(r: float, kappa: float) -> float:
    """Rotationally symmetric cap height Lambda(r).

    Linear with slope sqrt(1-k^2)/k outside the unit ball; inside, the
    arctan-integral profile that glues smoothly to the cone.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    c0 = math.sqrt(1.0 - kappa**2) / kappa
    if r >= 1.0:
        return c0 * r
    if r < 0.0:
        raise ValueError("radius must be non-negative")
    tail, _ = integrate.quad(
        lambda s: float(_arctan_xi(s)), r, 1.0,
        epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200,
    )
    return c0 * (1.0 - (2.0 / math.pi) * tail)


def capped_cone_profile(kappa: float, n_ambient: int) -> WarpedProfile:
    """Cone with its vertex replaced by the smooth convex cap.

    lambda(rho) = kappa*(rho + 1/kappa - rho0) beyond rho0 and the inverse
    of the cap arclength integral below it; globally smooth, lambda' in
    [kappa, 1], non-negative sectional curvature.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    k = float(kappa)

    # arclength of the cap graph: zeta^{-1}(s) = int_0^s sqrt(1 + Lambda'^2)
    s_grid = np.linspace(0.0, 1.0, 4097)
    speed = np.sqrt(1.0 + cap_slope(s_grid, k) ** 2)
    arclen = CubicSpline(s_grid, speed).antiderivative()
    rho0 = float(arclen(1.0))
    if not 1.0 < rho0 < 1.0 / k:
        raise InversionError(
            f"cap arclength rho0={rho0} escaped (1, 1/kappa)", (1.0, 1.0 / k))
    rho_nodes = np.asarray(arclen(s_grid), dtype=float)
    inv = PchipInterpolator(rho_nodes, s_grid)

    def zeta(rho):
        s = np.clip(inv(rho), 0.0, 1.0)
        # one safeguarded Newton step on arclen(s) = rho
        resid = np.asarray(arclen(s), dtype=float) - rho
        s = np.clip(s - resid / np.sqrt(1.0 + cap_slope(s, k) ** 2), 0.0, 1.0)
        return s

    def lam(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.where(rho >= rho0, k * (rho + 1.0 / k - rho0), 0.0)
        cap = rho < rho0
        if np.any(cap):
            out = np.array(out, dtype=float)
            out[cap] = zeta(rho[cap])
        return out

    def dlam(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.full(rho.shape, k)
        cap = rho < rho0
        if np.any(cap):
            s = zeta(rho[cap])
            out[cap] = 1.0 / np.sqrt(1.0 + cap_slope(s, k) ** 2)
        return out

    def d2lam(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros(rho.shape)
        cap = rho < rho0
        if np.any(cap):
            s = zeta(rho[cap])
            lp = cap_slope(s, k)
            out[cap] = -lp * _cap_curvature(s, k) / (1.0 + lp**2) ** 2
        return out

    return WarpedProfile(
        n_ambient=n_ambient, lam=lam, dlam=dlam, d2lam=d2lam,
        pole_regular=True, domain_min=0.0, linear_tail=(k, rho0),
        label=f"capped_cone(kappa={k:g})",
    )


def positive_curvature_profile(kappa: float, n_ambient: int,
                               s_max: float = 4.0e6) -> WarpedProfile:
    """Rotationally symmetric metric with strictly positive sectional
    curvature and asymptotic cone angle kappa.

    lambda is the inverse of s -> int_0^s sqrt(1 + c*arctan(t)^2) dt with
    c = 4(1-k^2)/(pi^2 k^2).
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    k = float(kappa)
    c = 4.0 * (1.0 - k**2) / (math.pi**2 * k**2)

    s_grid = np.concatenate([[0.0], np.geomspace(1e-8, s_max, 6000)])
    speed_vals = np.sqrt(1.0 + c * np.arctan(s_grid) ** 2)
    arclen = CubicSpline(s_grid, speed_vals).antiderivative()
    rho_nodes = np.asarray(arclen(s_grid), dtype=float)
    inv = PchipInterpolator(rho_nodes, s_grid)

    def lam(rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho > rho_nodes[-1]):
            raise InversionError(
                "radius beyond tabulated range", (0.0, float(rho_nodes[-1])))
        s = np.clip(inv(rho), 0.0, s_max)
        for _ in range(2):  # Newton polish of arclen(s) = rho
            resid = np.asarray(arclen(s), dtype=float) - rho
            s = np.clip(s - resid / np.sqrt(1.0 + c * np.arctan(s) ** 2), 0.0, s_max)
        return s

    def dlam(rho):
        s = lam(rho)
        return 1.0 / np.sqrt(1.0 + c * np.arctan(s) ** 2)

    def d2lam(rho):
        s = lam(rho)
        a = np.arctan(s)
        lp = 1.0 / np.sqrt(1.0 + c * a**2)
        return -(lp**3) * c * a * lp / (1.0 + s**2)

    return WarpedProfile(
        n_ambient=n_ambient, lam=lam, dlam=dlam, d2lam=d2lam,
        pole_regular=True, domain_min=0.0, linear_tail=None,
        label=f"positive_curvature(kappa={k:g})",
    )


def table_profile(rho_samples, lam_samples, n_ambient: int) -> WarpedProfile:
    """Profile from a two-column table (rho, lambda), cubic-interpolated."""
    rho = np.asarray(rho_samples, dtype=float)
    lam_v = np.asarray(lam_samples, dtype=float)
    if rho.ndim != 1 or rho.shape != lam_v.shape or len(rho) < 4:
        raise ValueError("table needs two equal-length columns, >= 4 rows")
    if np.any(np.diff(rho) <= 0):
        raise ValueError("table radii must be strictly increasing")
    spline = CubicSpline(rho, lam_v)
    d1, d2 = spline.derivative(1), spline.derivative(2)
    pole_regular = rho[0] <= 1e-12 and abs(float(d1(rho[0])) - 1.0) < 1e-6
    return WarpedProfile(
        n_ambient=n_ambient, lam=spline, dlam=d1, d2lam=d2,
        pole_regular=pole_regular, domain_min=float(rho[0]),
        linear_tail=None, label="table",
    )


# ---------------------------------------------------------------------------
# conversion to the conformally flat picture
# ---------------------------------------------------------------------------

def warped_to_conformal(profile: WarpedProfile,
                        r_coverage: float = 1e-13) -> ConformalRadialProfile:
    """Rewrite a warped profile with an exactly linear tail as a radial
    conformally flat metric e^{Phi(r)} sum dx_i^2.

    The radial change of variables psi with psi'(r) = lambda(psi)/r is
    obtained by quadrature of 1/lambda followed by monotone inversion,
    matched to psi(r) = r^kappa - b/kappa on the linear branch.
    """
    if profile.linear_tail is None:
        raise ValueError("profile must declare linear_tail=(kappa, rho0)")
    k, rho0 = profile.linear_tail
    lam0 = float(profile.lam_val(rho0))
    r_star = (lam0 / k) ** (1.0 / k)
    b = lam0 - k * rho0  # lambda(rho) = k*rho + b beyond rho0

    slopes = profile.dlam_val(np.geomspace(rho0 * 1e-6, rho0, 257))
    if np.any(slopes < k - 1e-8) or np.any(slopes > 1.0 + 1e-8):
        bad = float(np.geomspace(rho0 * 1e-6, rho0, 257)[
            int(np.argmax((slopes < k - 1e-8) | (slopes > 1.0 + 1e-8)))])
        raise ConversionError("cap slope escaped [kappa, 1]", bad)

    # cumulative zt(rho) = int d rho / lambda on a log grid below rho0
    span = -math.log(r_coverage) / k + 5.0
    x = np.linspace(math.log(rho0) - span, math.log(rho0), 4097)
    q = np.exp(x) / np.asarray(profile.lam_val(np.exp(x)), dtype=float)
    zt_spline = CubicSpline(x, q).antiderivative()
    zt = np.asarray(zt_spline(x), dtype=float) - float(zt_spline(x[-1]))
    if np.any(np.diff(zt) <= 0):
        raise ConversionError("radial change of variables is not monotone",
                              float(np.exp(x[int(np.argmax(np.diff(zt) <= 0))])))
    x_of_zt = PchipInterpolator(zt, x)

    def psi(r):
        """Solve zt(psi) = log(r / r_star) on the cap branch."""
        r = np.asarray(r, dtype=float)
        t = np.log(r / r_star)
        if np.any(t < zt[0]):
            raise ConversionError("radius below tabulated coverage",
                                  float(np.min(r)))
        xx = np.asarray(x_of_zt(np.clip(t, zt[0], 0.0)), dtype=float)
        for _ in range(2):  # Newton polish; d zt / dx = exp(x)/lambda
            rho_c = np.exp(xx)
            resid = np.asarray(zt_spline(xx), dtype=float) - float(zt_spline(x[-1])) - t
            xx = xx - resid * np.asarray(profile.lam_val(rho_c), dtype=float) / rho_c
        return np.exp(xx)

    def phi(r):
        r = np.asarray(r, dtype=float)
        out = np.where(r > 0, 2 * math.log(k) + (2 * k - 2) * np.log(np.maximum(r, 1e-300)), 0.0)
        capm = r < r_star
        if np.any(capm):
            out = np.array(out, dtype=float)
            rc = r[capm]
            out[capm] = 2 * np.log(
                np.asarray(profile.lam_val(psi(rc)), dtype=float) / rc)
        return out

    def dphi(r):
        r = np.asarray(r, dtype=float)
        out = (2 * k - 2) / r
        capm = r < r_star
        if np.any(capm):
            out = np.array(out, dtype=float)
            rc = r[capm]
            out[capm] = 2 * (np.asarray(
                profile.dlam_val(psi(rc)), dtype=float) - 1.0) / rc
        return out

    conf = ConformalRadialProfile(
        n_ambient=profile.n_ambient, phi=phi, dphi=dphi, d2phi=None,
        kappa_hint=k, label=profile.label + "->conformal",
    )

    r_check = np.geomspace(max(r_star * 1e-6, 1e-8), r_star * 10, 97)
    dp = np.asarray(conf.dphi_val(r_check), dtype=float)
    lo = -2 * (1 - k) / r_check
    if np.any(dp > 1e-6) or np.any(dp < lo - 1e-6 * np.abs(lo)):
        bad = float(r_check[int(np.argmax((dp > 1e-6) | (dp < lo - 1e-6 * np.abs(lo))))])
        raise ConversionError("Phi' escaped [-2(1-kappa)/r, 0]", bad)
    return conf


# ---------------------------------------------------------------------------
# curvature and asymptotic quantities
# ---------------------------------------------------------------------------

def curvature(profile: WarpedProfile, rho: float) -> CurvatureReport:
    """Sectional/Ricci curvature of the warped metric at radius rho.

    K_radial = -lambda''/lambda for radial 2-planes, K_spherical =
    (1 - lambda'^2)/lambda^2 for spherical ones; Ricci entries follow by
    tracing over an orthonormal frame.
    """
    if rho <= profile.domain_min or (rho <= 0 and not profile.pole_regular):
        raise ValueError(f"curvature undefined at rho={rho} for {profile.label}")
    n = profile.n_ambient - 1
    lam = float(profile.lam_val(rho))
    lp = float(profile.dlam_val(rho))
    lpp = float(profile.d2lam_val(rho))
    k_rad = -lpp / lam
    k_sph = (1.0 - lp**2) / lam**2
    return CurvatureReport(
        rho=float(rho),
        K_radial=k_rad,
        K_spherical=k_sph,
        Ric_radial=n * k_rad,
        Ric_spherical=(n - 1) * k_sph + k_rad,
    )


def volume_growth(profile: WarpedProfile, r_max: float) -> float:
    """Vol(B_r)/r^{n+1} with Vol(B_r) = omega_n * int_0^r lambda^n."""
    if r_max <= profile.domain_min:
        raise ValueError("r_max must exceed the profile domain minimum")
    n = profile.n_ambient - 1
    points = None
    if profile.linear_tail is not None and profile.linear_tail[1] < r_max:
        points = [profile.linear_tail[1]]

    def integrand(rho):
        return float(profile.lam_val(rho)) ** n

    val, err = integrate.quad(integrand, profile.domain_min, r_max,
                              epsabs=QUAD_TOL, epsrel=1e-12,
                              limit=400, points=points)
    if not math.isfinite(val) or err > max(QUAD_TOL, 1e-8 * abs(val)):
        raise ArithmeticError(f"volume quadrature failed: value={val}, err={err}")
    return sphere_measure(n) * val / r_max ** (n + 1)


@dataclass(frozen=True)
class ConditionReport:
    """C1 (Ricci >= 0), C2 (Euclidean volume growth constant) and C3
    (sup of rho^2 |curvature|) evaluated on a radius grid."""

    C1: bool
    C2: float
    C3: float
    min_ricci: float


def condition_check(profile: WarpedProfile, grid) -> ConditionReport:
    grid = np.asarray(grid, dtype=float)
    reports = [curvature(profile, r) for r in grid]
    ric = np.array([[c.Ric_radial, c.Ric_spherical] for c in reports])
    c1 = bool(np.min(ric) >= -1e-8)
    c2 = volume_growth(profile, float(np.max(grid)))
    c3 = float(np.max(grid**2 * np.array(
        [max(abs(c.K_radial), abs(c.K_spherical)) for c in reports])))
    return ConditionReport(C1=c1, C2=c2, C3=c3, min_ricci=float(np.min(ric)))


def nonradial_ricci_constant(profile: WarpedProfile, k_max: int = 20,
                             rtol: float = 1e-6) -> float:
    """lim inf of rho^2 * Ric(spherical) at infinity, by evaluation on the
    geometric ladder rho = 2^k with Richardson extrapolation in 1/rho."""
    k_min = 4
    if profile.linear_tail is not None:
        k_min = max(k_min, int(math.ceil(math.log2(profile.linear_tail[1]))) + 1)
    rhos = 2.0 ** np.arange(k_min, k_max + 1)
    f = np.array([r**2 * curvature(profile, r).Ric_spherical for r in rhos])

    table = [f]
    for j in range(1, 6):
        prev = table[-1]
        table.append((2.0**j * prev[1:] - prev[:-1]) / (2.0**j - 1.0))
    seq = np.array([row[-1] for row in table])
    scale = max(abs(seq[-1]), 1e-30)
    if abs(seq[-1] - seq[-2]) > rtol * scale:
        raise ArithmeticError(
            f"non-radial Ricci constant did not converge; samples {f.tolist()}")
    return float(seq[-1])


def nonexistence_verdict(kappa_prime: float, n: int) -> NonexistenceVerdict:
    """No complete stable minimal hypersurface (with at most Euclidean
    volume growth) once kappa' strictly exceeds the Hardy constant."""
    if kappa_prime < 0:
        raise ValueError("kappa_prime must be non-negative")
    if kappa_prime > (n - 2) ** 2 / 4.0:
        return NonexistenceVerdict.NoStableHypersurface
    return NonexistenceVerdict.Inconclusive

"""Quasilinear minimal-graph operator and barrier verification.

The operator L F = (1+|DF|^2)^{3/2} div(DF / sqrt(1+|DF|^2)) on a radial
conformally flat metric is evaluated three independent ways: from flat
Cartesian derivatives, from the polar (theta, r) expansion for fields with
rotational symmetry in the first n variables, and by finite differences of
the flux (the oracle).  F is a minimal graph iff L F = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import PreconditionError, ThresholdViolation
from .radial_metric import ConformalRadialProfile, threshold_kappa

__all__ = [
    "CartesianField",
    "ScalarFieldPolar",
    "BarrierSpec",
    "BarrierReport",
    "mean_curvature_graph",
    "L_conformal",
    "L_polar",
    "L_fd_oracle",
    "barrier_exponent",
    "barrier_field",
    "alternate_barrier_field",
    "barrier_check",
]


def _fd_step(scale):
    return 1e-5 * max(1.0, abs(scale))


@dataclass(frozen=True)
class CartesianField:
    """Scalar field on R^d with gradient/Hessian, finite-difference fallback."""

    f: Callable
    grad: Optional[Callable] = None
    hess: Optional[Callable] = None
    label: str = "field"

    def value(self, x):
        return float(self.f(np.asarray(x, dtype=float)))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        h = _fd_step(np.linalg.norm(x))
        g = np.empty(len(x))
        for i in range(len(x)):
            e = np.zeros(len(x)); e[i] = h
            g[i] = (self.f(x + e) - self.f(x - e)) / (2 * h)
        return g

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        h = _fd_step(np.linalg.norm(x))
        d = len(x)
        H = np.empty((d, d))
        f0 = self.f(x)
        for i in range(d):
            ei = np.zeros(d); ei[i] = h
            H[i, i] = (self.f(x + ei) - 2 * f0 + self.f(x - ei)) / h**2
            for j in range(i + 1, d):
                ej = np.zeros(d); ej[j] = h
                H[i, j] = H[j, i] = (
                    self.f(x + ei + ej) - self.f(x + ei - ej)
                    - self.f(x - ei + ej) + self.f(x - ei - ej)) / (4 * h**2)
        return H


@dataclass(frozen=True)
class ScalarFieldPolar:
    """Field F(theta, r) on [-1,1] x (0,inf), theta = x_{n+1}/|x|.

    Partial derivatives may be supplied; missing ones fall back to central
    differences with step 1e-5 * max(1, r).
    """

    F: Callable
    F_theta: Optional[Callable] = None
    F_r: Optional[Callable] = None
    F_thetatheta: Optional[Callable] = None
    F_rr: Optional[Callable] = None
    F_rtheta: Optional[Callable] = None
    label: str = "polar_field"

    def _d(self, which, theta, r):
        h_t = 1e-5
        h_r = _fd_step(r)
        F = self.F
        if which == "t":
            return (F(theta + h_t, r) - F(theta - h_t, r)) / (2 * h_t)
        if which == "r":
            return (F(theta, r + h_r) - F(theta, r - h_r)) / (2 * h_r)
        if which == "tt":
            return (F(theta + h_t, r) - 2 * F(theta, r) + F(theta - h_t, r)) / h_t**2
        if which == "rr":
            return (F(theta, r + h_r) - 2 * F(theta, r) + F(theta, r - h_r)) / h_r**2
        return (F(theta + h_t, r + h_r) - F(theta + h_t, r - h_r)
                - F(theta - h_t, r + h_r) + F(theta - h_t, r - h_r)) / (4 * h_t * h_r)

    def partials(self, theta, r):
        """(F_theta, F_r, F_thetatheta, F_rr, F_rtheta) at (theta, r)."""
        ft = self.F_theta(theta, r) if self.F_theta else self._d("t", theta, r)
        fr = self.F_r(theta, r) if self.F_r else self._d("r", theta, r)
        ftt = self.F_thetatheta(theta, r) if self.F_thetatheta else self._d("tt", theta, r)
        frr = self.F_rr(theta, r) if self.F_rr else self._d("rr", theta, r)
        frt = self.F_rtheta(theta, r) if self.F_rtheta else self._d("rt", theta, r)
        return ft, fr, ftt, frr, frt

    def to_cartesian(self, n_ambient: int) -> CartesianField:
        """Exact chain rule through theta = x_last/|x|, r = |x|."""
        last = n_ambient - 1

        def split(x):
            r = float(np.linalg.norm(x))
            return x[last] / r, r

        def f(x):
            th, r = split(x)
            return self.F(th, r)

        def grad(x):
            th, r = split(x)
            ft, fr, *_ = self.partials(th, r)
            r_i = x / r
            th_i = -x[last] * x / r**3
            th_i[last] += 1.0 / r
            return ft * th_i + fr * r_i

        def hess(x):
            th, r = split(x)
            ft, fr, ftt, frr, frt = self.partials(th, r)
            d = len(x)
            r_i = x / r
            r_ij = np.eye(d) / r - np.outer(x, x) / r**3
            th_i = -x[last] * x / r**3
            th_i[last] += 1.0 / r
            th_ij = (3.0 * x[last] * np.outer(x, x) / r**5
                     - x[last] * np.eye(d) / r**3)
            th_ij[last, :] -= x / r**3
            th_ij[:, last] -= x / r**3
            return (ftt * np.outer(th_i, th_i)
                    + frt * (np.outer(th_i, r_i) + np.outer(r_i, th_i))
                    + frr * np.outer(r_i, r_i)
                    + ft * th_ij + fr * r_ij)

        return CartesianField(f=f, grad=grad, hess=hess, label=self.label)


# ---------------------------------------------------------------------------
# the operator, three ways
# ---------------------------------------------------------------------------

def _L_cartesian(phi_val, dphi_val, F: CartesianField, x):
    """L F from flat derivatives in d = len(x) dimensions."""
    x = np.asarray(x, dtype=float)
    d = len(x)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ValueError("operator undefined at the origin of a singular metric")
    ephi = math.exp(phi_val)
    g = F.gradient(x)
    H = F.hessian(x)
    lap = float(np.trace(H))
    gradsq = float(g @ g)
    radial = float(g @ x) / r  # F_i x_i / r
    hgg = float(g @ H @ g)
    term2 = math.exp(-2 * phi_val) * (
        gradsq * (lap + 0.5 * (d - 1) * dphi_val * radial) - hgg)
    term1 = (lap + 0.5 * (d - 2) * dphi_val * radial) / ephi
    return term2 + term1


def L_conformal(metric: ConformalRadialProfile, F: CartesianField, x) -> float:
    """L F at x in R^{n_ambient} via the conformal expansion in flat
    Cartesian derivatives."""
    x = np.asarray(x, dtype=float)
    if len(x) != metric.n_ambient:
        raise ValueError("point dimension must match metric.n_ambient")
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ValueError("operator undefined at the origin of a singular metric")
    return _L_cartesian(float(metric.phi_val(r)), float(metric.dphi_val(r)), F, x)


def mean_curvature_graph(metric: ConformalRadialProfile, u: CartesianField,
                         x) -> float:
    """Mean curvature H = div(Du/sqrt(1+|Du|^2)) of the graph of u over the
    conformal slice through x (dimension inferred from x)."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    phi = float(metric.phi_val(r)) if r > 0 else float(metric.phi_val(1e-300))
    if not math.isfinite(phi):
        raise ValueError("metric is singular at the evaluation point")
    dphi = float(metric.dphi_val(r)) if r > 0 else 0.0
    g = u.gradient(x)
    gradsq_metric = math.exp(-phi) * float(g @ g)
    LF = _L_cartesian(phi, dphi, u, x) if r > 0 else _flat_origin_L(u, x, phi)
    return LF / (1.0 + gradsq_metric) ** 1.5


def _flat_origin_L(F: CartesianField, x, phi_val):
    """L F at the origin of a metric that is regular there (dphi -> 0)."""
    g = F.gradient(x)
    H = F.hessian(x)
    lap = float(np.trace(H))
    gradsq = float(g @ g)
    hgg = float(g @ H @ g)
    return (math.exp(-2 * phi_val) * (gradsq * lap - hgg)
            + lap / math.exp(phi_val))


def L_polar(metric: ConformalRadialProfile, F: ScalarFieldPolar,
            theta, r):
    """L F for F = F(theta, r), evaluated from the polar expansion.

    Accepts scalars or broadcastable arrays of (theta, r); the (1-theta^2)
    factors are formed exactly so theta = +-1 needs no special casing.
    """
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(np.abs(theta) > 1.0) or np.any(r <= 0.0):
        raise ValueError("need |theta| <= 1 and r > 0")
    n = metric.n_ambient - 1
    phi = np.asarray(metric.phi_val(r), dtype=float)
    dphi = np.asarray(metric.dphi_val(r), dtype=float)
    ft, fr, ftt, frr, frt = F.partials(theta, r)
    one_m = 1.0 - theta**2
    gradsq = one_m * ft**2 / r**2 + fr**2
    cubic = (n * gradsq * (fr / r + 0.5 * dphi * fr - theta * ft / r**2)
             + one_m * ft**2 / r**2 * (theta * ft / r**2 + fr / r)
             + one_m / r**2 * (ft**2 * frr + fr**2 * ftt - 2 * ft * fr * frt))
    linear = (frr + one_m * ftt / r**2 + n * fr / r - n * theta * ft / r**2
              + 0.5 * (n - 1) * dphi * fr)
    return np.exp(-2 * phi) * cubic + np.exp(-phi) * linear


def L_fd_oracle(metric: ConformalRadialProfile, F: CartesianField, x,
                h: float = 1e-3) -> float:
    """Independent check of L F: central differences of the metric flux
    div(DF/sqrt(1+|DF|^2)) with volume factor e^{d*phi/2}."""
    x = np.asarray(x, dtype=float)
    d = len(x)

    def flux(y, j):
        r = float(np.linalg.norm(y))
        phi = float(metric.phi_val(r))
        g = F.gradient(y)
        v = math.sqrt(1.0 + math.exp(-phi) * float(g @ g))
        return math.exp(0.5 * d * phi) * math.exp(-phi) * g[j] / v

    div = 0.0
    for j in range(d):
        e = np.zeros(d); e[j] = h
        div += (flux(x + e, j) - flux(x - e, j)) / (2 * h)
    r = float(np.linalg.norm(x))
    phi = float(metric.phi_val(r))
    g = F.gradient(x)
    v2 = 1.0 + math.exp(-phi) * float(g @ g)
    return v2**1.5 * math.exp(-0.5 * d * phi) * div


# ---------------------------------------------------------------------------
# barriers
# ---------------------------------------------------------------------------

def barrier_exponent(n: int, kappa: float) -> float:
    """p = n*kappa/2 - sqrt(n^2 kappa^2/4 - (n-1)); real only at or above
    the threshold kappa* = 2 sqrt(n-1)/n."""
    if n < 3:
        raise ValueError("need n >= 3")
    kstar = threshold_kappa(n)
    disc = (n * kappa / 2.0) ** 2 - (n - 1.0)
    if -1e-12 * (n - 1.0) < disc < 0.0:  # kappa = kappa* up to rounding
        disc = 0.0
    if disc < 0.0:
        raise ThresholdViolation(
            f"kappa={kappa} below the existence threshold kappa*={kstar:.12g}",
            kstar)
    return n * kappa / 2.0 - math.sqrt(disc)


@dataclass(frozen=True)
class BarrierSpec:
    """Barrier C * theta * r^p (or the alternate C * x_last * w^(p-1))."""

    C: float
    p: float
    n: int
    kappa: float
    alternate: bool = False

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("amplitude C must be positive")
        if self.p < 1.0 / self.kappa - 1e-12:
            raise ValueError("exponent p must satisfy p >= 1/kappa")

    @classmethod
    def from_threshold(cls, n: int, kappa: float, C: float = 1.0,
                       alternate: bool = False) -> "BarrierSpec":
        return cls(C=C, p=barrier_exponent(n, kappa), n=n, kappa=kappa,
                   alternate=alternate)


def barrier_field(spec: BarrierSpec) -> ScalarFieldPolar:
    """F(theta, r) = C * theta * r^p with analytic partials."""
    C, p = spec.C, spec.p
    return ScalarFieldPolar(
        F=lambda t, r: C * t * r**p,
        F_theta=lambda t, r: C * r**p + 0.0 * t,
        F_r=lambda t, r: C * p * t * r ** (p - 1),
        F_thetatheta=lambda t, r: 0.0 * t * r,
        F_rr=lambda t, r: C * p * (p - 1) * t * r ** (p - 2),
        F_rtheta=lambda t, r: C * p * r ** (p - 1) + 0.0 * t,
        label=f"barrier(C={C:g}, p={p:g})",
    )


def alternate_barrier_field(spec: BarrierSpec, n_ambient: int) -> CartesianField:
    """F = C * x_last * w^(p-1) with w the norm of the first d-1 coordinates."""
    C, q = spec.C, spec.p - 1.0
    last = n_ambient - 1

    def split(x):
        return float(np.linalg.norm(x[:last])), x[last]

    def f(x):
        w, z = split(x)
        return C * z * w**q

    def grad(x):
        w, z = split(x)
        g = C * z * q * w ** (q - 2) * x.copy()
        g[last] = C * w**q
        return g

    def hess(x):
        w, z = split(x)
        d = len(x)
        H = np.zeros((d, d))
        xp = x.copy(); xp[last] = 0.0
        H[:last, :last] = C * z * q * (
            w ** (q - 2) * np.eye(last)
            + (q - 2) * w ** (q - 4) * np.outer(xp[:last], xp[:last]))
        H[last, :last] = C * q * w ** (q - 2) * xp[:last]
        H[:last, last] = H[last, :last]
        return H

    return CartesianField(f=f, grad=grad, hess=hess,
                          label=f"alt_barrier(C={C:g}, q={q:g})")


@dataclass(frozen=True)
class BarrierReport:
    """Grid verification of the barrier sign pattern theta * L F >= 0."""

    passed: bool
    bound_ok: bool
    min_value: float
    argmin: tuple
    min_margin_over_bound: float
    theta_grid: np.ndarray
    r_grid: np.ndarray
    values: np.ndarray
    bounds: np.ndarray

    def to_table(self) -> str:
        lines = ["theta r value bound"]
        for i, t in enumerate(self.theta_grid):
            for j, r in enumerate(self.r_grid):
                lines.append(f"{t:.12g} {r:.12g} "
                             f"{self.values[i, j]:.12g} {self.bounds[i, j]:.12g}")
        lines.append(f"# min {self.min_value:.12g} at theta={self.argmin[0]:.12g}"
                     f" r={self.argmin[1]:.12g}")
        return "\n".join(lines)


def default_barrier_grid(r_min: float = 1e-2, r_max: float = 1e2,
                         n_theta: int = 201, n_r: int = 200):
    """Tensor grid: uniform in theta, log-spaced in r (origin excluded)."""
    return (np.linspace(-1.0, 1.0, n_theta),
            np.geomspace(r_min, r_max, n_r))


def barrier_check(metric: ConformalRadialProfile, spec: BarrierSpec,
                  theta_grid=None, r_grid=None, tol: float = 1e-8) -> BarrierReport:
    """Verify theta * L F >= 0 and the explicit lower bound
    C e^{-Phi} (p^2 - 1) theta^2 r^{p-2} node-wise on the grid.

    The metric must satisfy Phi'(r) >= -2(1-kappa)/r on the grid (checked
    first).  Tolerances scale with the local magnitude of the two
    homogeneous groups of the operator.
    """
    if theta_grid is None or r_grid is None:
        tg, rg = default_barrier_grid()
        theta_grid = tg if theta_grid is None else np.asarray(theta_grid, float)
        r_grid = rg if r_grid is None else np.asarray(r_grid, float)
    theta_grid = np.asarray(theta_grid, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)

    k = spec.kappa
    dphi = np.asarray(metric.dphi_val(r_grid), dtype=float)
    hyp = -2.0 * (1.0 - k) / r_grid
    bad = dphi < hyp - 1e-9 * np.abs(hyp)
    if np.any(bad):
        raise PreconditionError(
            f"Phi'(r) >= -2(1-kappa)/r fails at r={float(r_grid[np.argmax(bad)])}")

    C, p, n = spec.C, spec.p, spec.n
    phi = np.asarray(metric.phi_val(r_grid), dtype=float)
    T, R = np.meshgrid(theta_grid, r_grid, indexing="ij")

    if spec.alternate:
        cart = alternate_barrier_field(spec, metric.n_ambient)
        values = np.empty(T.shape)
        for i in range(T.shape[0]):
            for j in range(T.shape[1]):
                t, r = T[i, j], R[i, j]
                w = r * math.sqrt(max(1.0 - t**2, 0.0))
                if w <= 0.0:  # alternate barrier degenerates on the axis
                    values[i, j] = 0.0
                    continue
                x = np.zeros(metric.n_ambient)
                x[0], x[-1] = w, t * r
                values[i, j] = t * L_conformal(metric, cart, x)
    else:
        values = T * np.asarray(
            L_polar(metric, barrier_field(spec), T, R), dtype=float)

    scale = (C**3 * np.exp(-2 * phi) * r_grid ** (3 * p - 4)
             + C * np.exp(-phi) * r_grid ** (p - 2))[None, :]
    bounds = (C * np.exp(-phi) * (p**2 - 1.0) * r_grid ** (p - 2))[None, :] * T**2

    passed = bool(np.all(values >= -tol * scale))
    bound_ok = bool(np.all(values >= bounds - tol * scale))
    idx = np.unravel_index(int(np.argmin(values / scale)), values.shape)
    return BarrierReport(
        passed=passed, bound_ok=bound_ok,
        min_value=float(values[idx]),
        argmin=(float(T[idx]), float(R[idx])),
        min_margin_over_bound=float(np.min((values - bounds) / scale)),
        theta_grid=theta_grid, r_grid=r_grid,
        values=values, bounds=np.broadcast_to(bounds, values.shape).copy(),
    )

"""Configuration-driven command line front end.

Every operation of the package is reachable through ``conelab <command>``
with parameters taken from a flat ``key = value`` config file (one section
per command, plus an optional ``[run]`` section) and overridable by the
flags ``--config``, ``--out``, ``--seed``, ``--verbose``.  Reports go to
standard output; machine-readable tables (tab-delimited, one header line,
12 significant digits) go to the output path.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 a
usage or configuration error (including parameters on the wrong side of
the threshold kappa*).
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys

import numpy as np

from . import area_min, graph_operator, radial_metric, stability
from .errors import ConelabError, PreconditionError, ThresholdViolation

__all__ = ["main", "run", "parse_config", "COMMANDS"]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# per-command parameter schema: key -> (parser, default, help)
_METRIC_KEYS = {
    "kind": (str, "cone", "metric family: cone | capped | positive | table"),
    "kappa": (float, 0.8, "cone opening parameter in (0, 1]"),
    "n": (int, 7, "hypersurface dimension (ambient is n+1)"),
    "table": (str, "", "two-column (rho, lambda) file for kind=table"),
}

_SWEEP_KEYS = {
    "rho_min": (float, 1e-2, "smallest sample radius"),
    "rho_max": (float, 1e2, "largest sample radius"),
    "samples": (int, 50, "number of log-spaced radii"),
}

COMMANDS = {
    "metric-show": {**_METRIC_KEYS, **_SWEEP_KEYS},
    "metric-check": {**_METRIC_KEYS, **_SWEEP_KEYS},
    "curvature-sweep": {**_METRIC_KEYS, **_SWEEP_KEYS},
    "barrier-verify": {
        "kind": (str, "cone", "metric family: cone | capped"),
        "kappa": (float, 0.9, "cone opening parameter, needs kappa >= kappa*"),
        "n": (int, 7, "hypersurface dimension"),
        "amplitude": (float, 1.0, "barrier amplitude C"),
        "alternate": (_parse_bool, False,
                      "use the Cartesian barrier C x_last w^(p-1)"),
        "r_min": (float, 1e-2, "grid inner radius"),
        "r_max": (float, 1e2, "grid outer radius"),
        "n_theta": (int, 201, "theta nodes on [-1, 1]"),
        "n_r": (int, 200, "log-spaced radius nodes"),
        "tol": (float, 1e-8, "sign tolerance relative to the local scale"),
    },
    "stability-threshold": {
        "n": (int, 7, "hypersurface dimension"),
        "kappa_min": (float, 0.5, "margin table start"),
        "kappa_max": (float, 1.0, "margin table end (inclusive)"),
        "kappa_step": (float, 0.05, "margin table step"),
        "b2_link": (float, 0.0, "squared second fundamental form of the link"),
    },
    "rayleigh": {
        "n": (int, 7, "hypersurface dimension"),
        "kappa": (float, 0.9, "cone opening parameter"),
        "epsilon": (float, 1e-4, "inner truncation radius"),
        "basis_size": (int, 64, "number of hat functions"),
        "b2_link": (float, 0.0, "squared second fundamental form of the link"),
    },
    "eigen": {
        "n": (int, 7, "hypersurface dimension"),
        "epsilon": (float, 1e-2, "inner truncation radius"),
        "k_max": (int, 3, "number of radial modes"),
        "grid_points": (int, 10_000, "finite-difference grid points"),
    },
    "areamin-solve": {
        "n": (int, 4, "hypersurface dimension"),
        "kappa": (float, 0.8, "cone opening parameter"),
        "big_w": (float, 1.0, "outer graph radius W"),
        "grid_size": (int, 256, "number of grid intervals"),
        "max_iter": (int, 3000, "descent iteration cap"),
    },
    "areamin-scan": {
        "n": (int, 4, "hypersurface dimension"),
        "kappa_min": (float, 0.80, "scan start"),
        "kappa_max": (float, 0.92, "scan end (inclusive)"),
        "kappa_step": (float, 0.01, "scan step"),
        "big_w": (float, 1.0, "outer graph radius W"),
        "grid_size": (int, 256, "number of grid intervals"),
        "max_iter": (int, 3000, "descent iteration cap"),
    },
    "kprime": {**_METRIC_KEYS,
               "kind": (str, "capped",
                        "smooth metric family: capped | positive | table"),
               "k_max": (int, 20, "largest dyadic radius exponent"),
               "rtol": (float, 1e-6, "extrapolation convergence tolerance")},
}

_RUN_KEYS = ("command", "out", "seed", "verbose")


class _Usage(Exception):
    pass


def _build_profile(params) -> radial_metric.WarpedProfile:
    kind, kappa, n = params["kind"], params["kappa"], params["n"]
    ambient = n + 1
    if kind == "cone":
        return radial_metric.cone_profile(kappa, ambient)
    if kind == "capped":
        return radial_metric.capped_cone_profile(kappa, ambient)
    if kind == "positive":
        return radial_metric.positive_curvature_profile(kappa, ambient)
    if kind == "table":
        if not params["table"]:
            raise _Usage("kind=table needs the `table` key (a two-column file)")
        data = np.loadtxt(params["table"])
        if data.ndim != 2 or data.shape[1] != 2:
            raise _Usage(f"table file must have two columns, got {data.shape}")
        return radial_metric.table_profile(data[:, 0], data[:, 1], ambient)
    raise _Usage(f"unknown metric kind {kind!r}"
                 " (expected cone, capped, positive or table)")


def parse_config(path: str):
    """Read the flat key = value config; returns (run_keys, sections).

    Unknown sections and unknown keys are rejected by name; every section
    other than [run] must match a command and only carry its documented
    keys."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise _Usage(f"config file not found: {path}")
    run: dict = {}
    sections: dict = {}
    for sec in cp.sections():
        if sec == "run":
            for key, val in cp.items(sec):
                if key not in _RUN_KEYS:
                    raise _Usage(f"unknown key {key!r} in [run]")
                run[key] = val
            continue
        if sec not in COMMANDS:
            raise _Usage(f"unknown section [{sec}] (not a command)")
        schema = COMMANDS[sec]
        parsed = {}
        for key, val in cp.items(sec):
            if key not in schema:
                raise _Usage(f"unknown key {key!r} in [{sec}]")
            parser = schema[key][0]
            try:
                parsed[key] = parser(val)
            except ValueError as exc:
                raise _Usage(f"bad value for {key!r} in [{sec}]: {exc}") from exc
        sections[sec] = parsed
    return run, sections


def _resolve_params(command: str, section: dict) -> dict:
    params = {k: d for k, (_, d, _) in COMMANDS[command].items()}
    params.update(section)
    return params


def _write_table(path, header, rows):
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text


def _radius_grid(params):
    if not 0 < params["rho_min"] < params["rho_max"]:
        raise _Usage("need 0 < rho_min < rho_max")
    if params["samples"] < 2:
        raise _Usage("need samples >= 2")
    return np.geomspace(params["rho_min"], params["rho_max"], params["samples"])


def _cmd_metric_show(params, out, say):
    profile = _build_profile(params)
    grid = _radius_grid(params)
    rows = [(r, float(profile.lam_val(r)), float(profile.dlam_val(r)),
             float(profile.d2lam_val(r))) for r in grid]
    text = _write_table(out, ("rho", "lambda", "dlambda", "d2lambda"), rows)
    say(f"profile {profile.label}: ambient dimension {profile.n_ambient}, "
        f"linear tail {profile.linear_tail}", text)
    return 0


def _cmd_metric_check(params, out, say):
    profile = _build_profile(params)
    rep = radial_metric.condition_check(profile, _radius_grid(params))
    rows = [(rep.C1, rep.C2, rep.C3, rep.min_ricci)]
    text = _write_table(out, ("C1_ricci_nonneg", "C2_volume_ratio",
                              "C3_sup_r2_curv", "min_ricci"), rows)
    say(f"C1 (Ric >= 0): {rep.C1}; C2 volume ratio {_fmt(rep.C2)}; "
        f"C3 sup rho^2|K| = {_fmt(rep.C3)}", text)
    if not rep.C1:
        say(f"check failed: minimal Ricci entry {_fmt(rep.min_ricci)} < 0", "")
        return 1
    return 0


def _cmd_curvature_sweep(params, out, say):
    profile = _build_profile(params)
    rows = []
    for r in _radius_grid(params):
        c = radial_metric.curvature(profile, float(r))
        rows.append((c.rho, c.K_radial, c.K_spherical,
                     c.Ric_radial, c.Ric_spherical))
    text = _write_table(out, ("rho", "K_radial", "K_spherical",
                              "Ric_radial", "Ric_spherical"), rows)
    say(f"curvature of {profile.label} on {len(rows)} radii", text)
    return 0


def _cmd_barrier_verify(params, out, say):
    n, kappa = params["n"], params["kappa"]
    spec = graph_operator.BarrierSpec.from_threshold(
        n, kappa, C=params["amplitude"], alternate=params["alternate"])
    if params["kind"] == "cone":
        metric = radial_metric.cone_conformal(kappa, n + 1)
    elif params["kind"] == "capped":
        metric = radial_metric.warped_to_conformal(
            radial_metric.capped_cone_profile(kappa, n + 1))
    else:
        raise _Usage(f"barrier-verify supports kind cone or capped,"
                     f" got {params['kind']!r}")
    tg, rg = graph_operator.default_barrier_grid(
        params["r_min"], params["r_max"], params["n_theta"], params["n_r"])
    rep = graph_operator.barrier_check(metric, spec, tg, rg, tol=params["tol"])
    rows = [(t, r, rep.values[i, j], rep.bounds[i, j])
            for i, t in enumerate(rep.theta_grid)
            for j, r in enumerate(rep.r_grid)]
    text = _write_table(out, ("theta", "r", "theta_LF", "lower_bound"), rows)
    say(f"barrier exponent p = {_fmt(spec.p)}; sign check "
        f"{'passed' if rep.passed else 'FAILED'}, lower bound "
        f"{'holds' if rep.bound_ok else 'VIOLATED'}; min value "
        f"{_fmt(rep.min_value)} at (theta, r) = ({_fmt(rep.argmin[0])}, "
        f"{_fmt(rep.argmin[1])})", text)
    return 0 if (rep.passed and rep.bound_ok) else 1


def _cmd_stability_threshold(params, out, say):
    n = params["n"]
    kstar = stability.threshold_bisect(n)
    if params["kappa_step"] <= 0:
        raise _Usage("kappa_step must be positive")
    kappas = np.minimum(np.arange(params["kappa_min"],
                                  params["kappa_max"] + 1e-12,
                                  params["kappa_step"]), params["kappa_max"])
    rows = []
    for kap in kappas:
        v = stability.stability_verdict(n, float(kap), params["b2_link"])
        rows.append((float(kap), v.margin, v.stable))
    text = _write_table(out, ("kappa", "margin", "stable"), rows)
    say(f"threshold kappa* = {_fmt(kstar)} for n = {n} "
        f"(closed form {_fmt(radial_metric.threshold_kappa(n))})", text)
    return 0


def _cmd_rayleigh(params, out, say):
    prob = stability.ConeStabilityProblem(
        n=params["n"], kappa=params["kappa"], B2_link=params["b2_link"],
        epsilon=params["epsilon"])
    q = stability.rayleigh_min(prob, basis_size=params["basis_size"])
    v = stability.stability_verdict(params["n"], params["kappa"],
                                    params["b2_link"])
    text = _write_table(out, ("kappa", "min_quotient", "margin", "stable"),
                        [(params["kappa"], q, v.margin, v.stable)])
    say(f"minimal Rayleigh quotient {_fmt(q)} at epsilon = "
        f"{_fmt(params['epsilon'])}; closed-form margin {_fmt(v.margin)}", text)
    return 0


def _cmd_eigen(params, out, say):
    n, eps = params["n"], params["epsilon"]
    rows = []
    worst = 0.0
    for k in range(1, params["k_max"] + 1):
        exact, _ = stability.radial_eigenvalue(n, eps, k)
        fd = stability.radial_eigenvalue_fd(n, eps, k, params["grid_points"])
        rel = abs(fd - exact) / abs(exact)
        worst = max(worst, rel)
        rows.append((k, exact, fd, rel))
    text = _write_table(out, ("k", "closed_form", "finite_difference",
                              "rel_error"), rows)
    say(f"radial Dirichlet spectrum on [{_fmt(eps)}, 1]; worst relative "
        f"error {_fmt(worst)}", text)
    return 0 if worst < 1e-3 else 1


def _areamin_problem(n, kappa, W, grid_size):
    grid = area_min.default_grid(W, grid_size)
    metric = radial_metric.cone_conformal(kappa, n + 1)
    return area_min.EquivariantAreaProblem(
        metric=metric, n=n, W=W, grid=grid, u=np.zeros_like(grid))


def _cmd_areamin_solve(params, out, say):
    n, kappa, W = params["n"], params["kappa"], params["big_w"]
    prob = _areamin_problem(n, kappa, W, params["grid_size"])
    seed = area_min.seed_perturbation(prob.grid, W, n)
    res = area_min.minimize(prob, init=seed, max_iter=params["max_iter"])
    rows = list(zip(prob.grid, res.u_star))
    text = _write_table(out, ("w", "u"), rows)
    say(f"verdict {res.verdict.value}: area(flat) = {_fmt(res.area_flat)}, "
        f"best competitor {_fmt(res.area_min)} "
        f"(gap {_fmt(res.area_flat - res.area_min)}), "
        f"{res.iterations} iterations, converged = {res.converged}", text)
    return 0


def _cmd_areamin_scan(params, out, say):
    if params["kappa_step"] <= 0:
        raise _Usage("kappa_step must be positive")
    kappas = np.minimum(np.arange(params["kappa_min"],
                                  params["kappa_max"] + 1e-12,
                                  params["kappa_step"]), params["kappa_max"])
    rows_data, khat = area_min.threshold_scan(
        params["n"], kappas, W=params["big_w"],
        grid_size=params["grid_size"], max_iter=params["max_iter"])
    rows = [(r.kappa, r.area_flat, r.area_min, r.gap, r.verdict.value)
            for r in rows_data]
    text = _write_table(out, ("kappa", "area_flat", "area_min", "gap",
                              "verdict"), rows)
    say(f"empirical transition kappa_hat = {_fmt(khat)} "
        f"(threshold kappa* = "
        f"{_fmt(radial_metric.threshold_kappa(params['n']))}); FlatIsMin "
        "means flat minimizes among equivariant graphs only", text)
    return 0


def _cmd_kprime(params, out, say):
    if params["kind"] == "cone":
        raise _Usage("kprime needs a smooth profile (capped, positive or"
                     " table); the cone is singular at the vertex")
    profile = _build_profile(params)
    kp = radial_metric.nonradial_ricci_constant(
        profile, k_max=params["k_max"], rtol=params["rtol"])
    verdict = radial_metric.nonexistence_verdict(kp, params["n"])
    hardy = (params["n"] - 2) ** 2 / 4.0
    text = _write_table(out, ("kappa_prime", "hardy_constant", "verdict"),
                        [(kp, hardy, verdict.value)])
    say(f"non-radial Ricci constant kappa' = {_fmt(kp)} vs Hardy constant "
        f"(n-2)^2/4 = {_fmt(hardy)}: {verdict.value}", text)
    return 0


_DISPATCH = {
    "metric-show": _cmd_metric_show,
    "metric-check": _cmd_metric_check,
    "curvature-sweep": _cmd_curvature_sweep,
    "barrier-verify": _cmd_barrier_verify,
    "stability-threshold": _cmd_stability_threshold,
    "rayleigh": _cmd_rayleigh,
    "eigen": _cmd_eigen,
    "areamin-solve": _cmd_areamin_solve,
    "areamin-scan": _cmd_areamin_scan,
    "kprime": _cmd_kprime,
}


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="conelab",
        description="numerical laboratory for cones, barriers and the"
                    " stability threshold kappa* = (2/n) sqrt(n-1)")
    ap.add_argument("command", nargs="?", choices=sorted(COMMANDS),
                    help="operation to run (may also come from the config)")
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--out", help="output table path (default <command>.tsv)")
    ap.add_argument("--seed", type=int, help="seed echoed into the report"
                    " and used by any randomized suites")
    ap.add_argument("--verbose", action="store_true",
                    help="also print the table to standard output")
    args = ap.parse_args(argv)

    run_keys: dict = {}
    sections: dict = {}
    if args.config:
        run_keys, sections = parse_config(args.config)

    command = args.command or run_keys.get("command")
    if not command:
        raise _Usage("no command given (positional argument or"
                     " `command` key in [run])")
    if command not in COMMANDS:
        raise _Usage(f"unknown command {command!r}")
    out = args.out or run_keys.get("out") or f"{command}.tsv"
    seed = args.seed if args.seed is not None else int(run_keys.get("seed", 0))
    verbose = args.verbose or _parse_bool(run_keys.get("verbose", "false"))

    params = _resolve_params(command, sections.get(command, {}))

    def say(summary: str, table_text: str):
        print(summary)
        if verbose and table_text:
            sys.stdout.write(table_text)

    print(f"# conelab {command} (seed = {seed}, out = {out})")
    return _DISPATCH[command](params, out, say)


def main(argv=None) -> int:
    try:
        return run(argv)
    except _Usage as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ThresholdViolation,) as exc:
        print(f"threshold violation: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError,) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 1
    except (ConelabError, ArithmeticError, ValueError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

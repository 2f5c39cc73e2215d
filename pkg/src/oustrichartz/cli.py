"""Command-line front end.

Every command prints (or writes to ``--out``) one JSON object and exits with
0 when all of its checks pass, 1 when a check fails, and 2 when the
configuration is invalid.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable

import numpy as np

from . import __version__
from .analytic_family import dirichlet_series_detailed, series_asymptotic
from .coherent import LADDER_PRESETS, CoherentParams, coherent_ladder, cross_validate_coherent, optimality_scan
from .config import RunConfig, load_config
from .errors import ConfigError, OUStrichartzError
from .fourier_hermite import DiscreteSurface, TimeGrid, assemble_TS
from .hermite_core import SpectralField, basis_size, tensor_grid
from .ou_semigroup import (
    ComplexTime,
    imaginary_time_kernel,
    lp_norm_in_time_profile,
    mehler_kernel,
    propagate_kernel,
    propagate_spectral,
    propagated_norm,
    spectral_kernel_sum,
)
from .schatten import (
    duality_check,
    propagator_synthesis,
    random_unitary,
    schatten_norm,
    singular_values,
)
from .strichartz import (
    DEFAULT_J_LADDER,
    check_admissible,
    ladder_spread,
    strichartz_ladder,
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class Checks:
    """Ordered list of named pass/fail records."""

    def __init__(self):
        self.items = []

    def add(self, name: str, value: float, tolerance: float, passed: bool | None = None,
            relation: str = "<=") -> bool:
        if passed is None:
            passed = bool(value <= tolerance) if relation == "<=" else bool(value >= tolerance)
        self.items.append(
            {"name": name, "value": value, "tolerance": tolerance, "relation": relation,
             "passed": bool(passed)}
        )
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.items)

    @property
    def first_failure(self) -> str | None:
        for c in self.items:
            if not c["passed"]:
                return c["name"]
        return None


def _rel(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def _box_pairs(n: int, half: float, per_axis: int):
    """All pairs of points from a uniform per-axis lattice on ``[-half, half]^n``."""
    axis = np.linspace(-half, half, per_axis)
    pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    return pts[:, None, :], pts[None, :, :]


# ---------------------------------------------------------------- commands
def cmd_verify_kernels(cfg: RunConfig):
    n = cfg.n
    if n > 2:
        raise ConfigError("verify-kernels supports n = 1 or n = 2")
    K = cfg.degree if cfg.degree is not None else 40
    m = cfg.nodes if cfg.nodes is not None else 60
    tol = cfg.tol if cfg.tol is not None else 1e-8
    checks = Checks()
    results = {}
    per_axis = 32 if n == 1 else 6

    # r = 0.7: pointwise relative error; r = 0.5: error relative to the
    # largest kernel value on the box (the corners lose relative accuracy).
    for r, half, scaled in ((0.7, 2.0, False), (0.5, 1.0, True)):
        x, y = _box_pairs(n, half, per_axis)
        z = ComplexTime(r, 0.0, cfg.eps_t)
        exact = mehler_kernel(z, x, y, n=n)
        approx = spectral_kernel_sum(z, x, y, K, n=n, truncation="axis")
        err = float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact))) if scaled else _rel(approx, exact)
        checks.add(f"mehler_vs_spectral_r{r}", err, tol)

    x, y = _box_pairs(n, 2.0, 12 if n == 1 else 5)
    times = (0.4, -0.4, 2.0, -2.0, 2.9)
    route = max(
        _rel(imaginary_time_kernel(t, x, y, n=n, eps_t=cfg.eps_t),
             mehler_kernel(ComplexTime(0.0, t, cfg.eps_t), x, y, n=n))
        for t in times
    )
    checks.add("imaginary_time_closed_forms", route, 1e-10)
    conj = max(
        _rel(mehler_kernel(ComplexTime(0.0, -t, cfg.eps_t), x, y, n=n),
             np.conj(imaginary_time_kernel(t, x, y, n=n, eps_t=cfg.eps_t)))
        for t in times
    )
    checks.add("conjugation", conj, 1e-10)
    shift = max(
        _rel(imaginary_time_kernel(t + math.pi, x, y, n=n, eps_t=cfg.eps_t),
             imaginary_time_kernel(t, -x, y, n=n, eps_t=cfg.eps_t))
        for t in (0.4, -0.4, 1.3)
    )
    checks.add("pi_shift", shift, 1e-10)
    printed = max(
        _rel(mehler_kernel(ComplexTime(0.0, t + math.pi, cfg.eps_t), x, y, n=n),
             np.exp(-1j * math.pi * n) * mehler_kernel(ComplexTime(0.0, t, cfg.eps_t), -x, y, n=n))
        for t in (0.4, 1.3)
    )
    results["pi_shift_with_extra_phase_exp(-i pi n)"] = {"max_rel_error": printed,
                                                          "holds": bool(printed <= 1e-10)}

    rng = np.random.default_rng(cfg.seed)
    band = min(10, m - 1)
    f = SpectralField(n, band, rng.standard_normal(basis_size(n, band)))
    grid = tensor_grid(n, m)
    t = 0.9
    norm_k = propagated_norm(f, grid, t, eps_t=cfg.eps_t)
    checks.add("kernel_unitarity", abs(norm_k - f.norm()) / f.norm(), 1e-7)
    targets = np.linspace(-3.0, 3.0, 7)
    on_targets = propagate_kernel(f.on_grid(grid), grid, t, targets=targets, eps_t=cfg.eps_t)
    tpts = np.stack(np.meshgrid(*([targets] * n), indexing="ij"), axis=-1).reshape(-1, n)
    spectral = propagate_spectral(f, t).evaluate(tpts)
    checks.add("kernel_vs_spectral", float(np.max(np.abs(on_targets - spectral)) / np.max(np.abs(spectral))), tol)

    g = propagate_spectral(f, 0.37)
    checks.add("spectral_unitarity", abs(g.norm() - f.norm()) / f.norm(), 1e-14)
    law = np.max(np.abs(propagate_spectral(g, 1.1).coefficients - propagate_spectral(f, 1.47).coefficients))
    checks.add("group_law", float(law), 1e-14)

    fr = SpectralField(n, 6, rng.standard_normal(basis_size(n, 6)))
    pgrid = tensor_grid(n, 40 if n == 1 else 20)
    ts = np.linspace(0.1, 3.0, 15)
    base = lp_norm_in_time_profile(fr, 4.0, ts, pgrid)
    even = np.max(np.abs(lp_norm_in_time_profile(fr, 4.0, -ts, pgrid) - base))
    period = np.max(np.abs(lp_norm_in_time_profile(fr, 4.0, ts + math.pi, pgrid) - base))
    checks.add("profile_even", float(even), 1e-8)
    checks.add("profile_pi_periodic", float(period), 1e-8)
    grid_meta = {"n": n, "degree": K, "nodes": m}
    return checks, results, grid_meta, None


def _strichartz_exponents(cfg: RunConfig):
    n = cfg.n
    if cfg.p is None and cfg.q is None:
        q = (n + 2.0) / n
        p = q
    elif cfg.p is None:
        q = cfg.q
        p = math.inf if q == 1.0 else 2.0 * q / (n * (q - 1.0))
    elif cfg.q is None:
        p = cfg.p
        q = n / (n - (0.0 if math.isinf(p) else 2.0 / p))
    else:
        p, q = cfg.p, cfg.q
    check_admissible(n, p, q)
    return p, q


def cmd_strichartz(cfg: RunConfig):
    p, q = _strichartz_exponents(cfg)
    time_steps = cfg.time_steps or 512
    spread_tol = cfg.tol if cfg.tol is not None else 3.0
    checks = Checks()
    results = {}
    rows = [["profile", "J", "ratio", "mixed_norm", "schatten_norm"]]
    for profile in ("flat", "geometric"):
        reps = strichartz_ladder(cfg.n, p, q, DEFAULT_J_LADDER, profile, cfg.seed, cfg.degree,
                                 time_steps, cfg.nodes)
        ratios = [r.ratio for r in reps]
        results[profile] = [r.to_dict() for r in reps]
        checks.add(f"{profile}_ratios_finite", float(all(map(math.isfinite, ratios))), 1.0,
                   passed=all(map(math.isfinite, ratios)), relation=">=")
        checks.add(f"{profile}_spread", ladder_spread(reps), spread_tol)
        if profile == "flat" and math.isinf(p) and q == 1.0:
            checks.add("triangle_equality_at_q1", max(abs(v - 1.0) for v in ratios), 1e-10)
        rows += [[profile, r.metadata["J"], repr(r.ratio), repr(r.mixed_norm), repr(r.schatten_norm)]
                 for r in reps]
    meta = dict(reps[0].metadata)
    meta.pop("J", None)
    meta.pop("profile", None)
    meta.pop("seed", None)
    return checks, results, meta, rows


def cmd_optimality(cfg: RunConfig):
    q = cfg.q if cfg.q is not None else 3.0
    r = cfg.r if cfg.r is not None else 2.0
    time_steps = cfg.time_steps or 512
    rep = optimality_scan(q, r, coherent_ladder(LADDER_PRESETS[cfg.preset]), n=cfg.n,
                          time_steps=time_steps)
    checks = Checks()
    checks.add("slope_floor", rep.fit.slope, rep.floor - rep.slope_tolerance, relation=">=")
    checks.add("fit_residual", rep.fit.residual, rep.residual_tolerance)
    cross = cross_validate_coherent(CoherentParams(0.3, 1.0, 1.0, (1.0,), (2.0,)), 0.8)
    checks.add("coherent_closed_form_reported", float(cross.max_rel_error["derived"]), cross.tolerance,
               passed=cross.flag or not cross.discrepancy["printed"])
    results = {"scan": rep.to_dict(), "coherent_cross_check": cross.to_dict()}
    rows = [["log_N", "log_ratio"]] + [
        [repr(math.log(pt["N"])), repr(math.log(pt["ratio"]))] for pt in rep.points
    ]
    return checks, results, {"n": cfg.n, "time_steps": time_steps, "preset": cfg.preset}, rows


SERIES_TIMES = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, math.pi)


def cmd_series(cfg: RunConfig):
    z = complex(cfg.z_re, cfg.z_im)
    tol = cfg.tol if cfg.tol is not None else 1e-6
    checks = Checks()
    table = []
    rows = [["t", "series_re", "series_im", "asymptotic_re", "asymptotic_im", "ratio_deviation"]]
    worst = 0.0
    deviation = {}
    for t in SERIES_TIMES:
        res = dirichlet_series_detailed(z, t, eps_t=cfg.eps_t, tol=tol)
        lead = series_asymptotic(z, t)
        dev = abs(res.value / lead - 1.0)
        deviation[t] = dev
        worst = max(worst, res.error_estimate)
        table.append({"t": t, "series": [res.value.real, res.value.imag],
                      "asymptotic": [lead.real, lead.imag], "ratio_deviation": dev,
                      "error_estimate": res.error_estimate, "terms": res.terms})
        rows.append([repr(t), repr(res.value.real), repr(res.value.imag), repr(lead.real),
                     repr(lead.imag), repr(dev)])
    checks.add("extrapolation_converged", worst, tol)
    if z.imag == 0.0:
        a = dirichlet_series_detailed(z, 0.3, eps_t=cfg.eps_t, tol=tol).value
        b = dirichlet_series_detailed(z, -0.3, eps_t=cfg.eps_t, tol=tol).value
        checks.add("conjugation_symmetry", abs(a - np.conj(b)) / abs(a), 1e-8)
    checks.add("asymptotic_ratio_t0.01", deviation[0.01], 0.05)
    checks.add("asymptotic_ratio_t0.05", deviation[0.05], 0.15)
    return checks, {"z": [z.real, z.imag], "table": table}, {"times": list(SERIES_TIMES)}, rows


def cmd_schatten(cfg: RunConfig):
    k = cfg.degree if cfg.degree is not None else 8
    k = max(k, 1)
    r = cfg.r if cfg.r is not None else 3.0
    rng = np.random.default_rng(cfg.seed)
    checks = Checks()
    checks.add("identity_norm", abs(schatten_norm(np.eye(k), r) - k ** (1.0 / r)) / k ** (1.0 / r), 1e-12)
    u = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    v = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    s = singular_values(np.outer(u, np.conj(v)))
    expect = np.linalg.norm(u) * np.linalg.norm(v)
    checks.add("rank_one", float(max(abs(s[0] - expect) / expect, s[1:].max(initial=0.0) / expect)), 1e-10)
    a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    b = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    uu, vv = random_unitary(12, rng), random_unitary(12, rng)
    base = schatten_norm(a, r)
    checks.add("unitary_invariance", abs(schatten_norm(uu @ a @ vv, r) - base) / base, 1e-9)
    norms = [schatten_norm(a, e) for e in (1.0, 1.5, 2.0, 3.0, 6.0, math.inf)]
    checks.add("monotone_in_r", float(max(np.diff(norms).max(), 0.0)), 1e-12)
    checks.add("triangle", schatten_norm(a + b, r) - schatten_norm(a, r) - schatten_norm(b, r), 1e-9)
    checks.add("hoelder", schatten_norm(a @ b, 1.0) - schatten_norm(a, 2.0) * schatten_norm(b, 2.0), 1e-9)

    n = cfg.n
    K_ts = 4
    surface = DiscreteSurface.ou_surface(n, K_ts)
    ts = assemble_TS(surface, TimeGrid(cfg.time_steps or 16), tensor_grid(n, cfg.nodes or 8))
    mat = ts.matrix
    scale = float(np.max(np.abs(mat)))
    checks.add("TS_self_adjoint", float(np.max(np.abs(mat - np.conj(mat).T))), 0.0)
    eig = np.linalg.eigvalsh(mat)
    checks.add("TS_positive", float(-eig.min()), 1e-10)
    checks.add("TS_square", float(np.max(np.abs(mat @ mat - 2 * math.pi * mat)) / scale), 1e-7)
    sv = singular_values(ts)
    rank = int(np.sum(sv > 1e-8 * sv[0]))
    checks.add("TS_rank", float(abs(rank - len(surface.members()))), 0.0)
    rows = [["index", "singular_value"]] + [[i, repr(float(x))] for i, x in enumerate(sv)]
    results = {"k": k, "r": r, "TS_rank": rank, "TS_surface_size": len(surface.members()),
               "TS_top_singular_values": [float(x) for x in sv[: min(10, sv.size)]]}
    return checks, results, ts.metadata, rows


def cmd_duality(cfg: RunConfig):
    n = cfg.n
    big_p, big_q = _strichartz_exponents(cfg)
    # Density in L_t^P L_x^Q corresponds to q'/2 = P and p'/2 = Q.
    lem_q = 2.0 * big_p / (2.0 * big_p - 1.0) if math.isfinite(big_p) else 1.0
    lem_p = 2.0 * big_q / (2.0 * big_q - 1.0) if math.isfinite(big_q) else 1.0
    alpha = cfg.r if cfg.r is not None else float(n + 2)
    degree = cfg.degree if cfg.degree is not None else 10
    m = cfg.nodes if cfg.nodes is not None else 24
    op = propagator_synthesis(degree, TimeGrid(cfg.time_steps or 64), tensor_grid(n, m))
    rep = duality_check(op, alpha, lem_p, lem_q, trials=cfg.trials, seed=cfg.seed)
    checks = Checks()
    checks.add("transfer_violations", float(rep.violations), 0.0)
    rows = [["trial", "systems", "constant_random_w", "constant_dual_w", "density_constant"]] + [
        [t.trial, t.systems, repr(t.constant_random_w), repr(t.constant_dual_w), repr(t.density_constant)]
        for t in rep.trials
    ]
    return checks, rep.to_dict(), dict(op.metadata), rows


COMMANDS: dict[str, tuple[Callable, str]] = {
    "verify-kernels": (
        cmd_verify_kernels,
        "Mehler closed form of the Ornstein-Uhlenbeck kernel against its eigen-expansion; "
        "conjugation and pi-shift symmetries of the Schroedinger kernel; unitarity and group "
        "law of e^{-itL}; evenness and pi-periodicity of L^p time profiles.",
    ),
    "strichartz": (
        cmd_strichartz,
        "Strichartz inequality for orthonormal systems: ratio of the L_t^p L_x^q norm of the "
        "density to the l^{2q/(q+1)} norm of the occupations, over a ladder of system sizes.",
    ),
    "optimality": (
        cmd_optimality,
        "Optimality of the Schatten exponent: coherent-state ensembles with growing trace N; "
        "log-log slope of the density-to-Berezin-Lieb-bound ratio against N.",
    ),
    "series": (
        cmd_series,
        "Singularity of the one-sided power series sum k_+^z e^{-itk} at t = 0 against "
        "Gamma(z+1) (it)^{-z-1}.",
    ),
    "schatten": (
        cmd_schatten,
        "Schatten r-norm identities and inequalities; self-adjointness, positivity and the "
        "normalisation T_S^2 = 2 pi T_S of T_S = E_S E_S^* for the surface nu = |mu|.",
    ),
    "duality": (
        cmd_duality,
        "Duality principle: Schatten bounds on W A A^* conj(W) against mixed-norm bounds on "
        "sum n_j |A f_j|^2 for A = e^{-itL} on band-limited data.",
    ),
}


# ---------------------------------------------------------------- plumbing
def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    return obj


def build_report(command: str, cfg: RunConfig, checks: Checks, results, grid_meta) -> dict:
    return _jsonable(
        {
            "command": command,
            "anchor": COMMANDS[command][1],
            "version": __version__,
            "config": {k: v for k, v in cfg.to_dict().items() if k not in ("out", "csv")},
            "config_hash": cfg.config_hash(),
            "grid": grid_meta,
            "checks": checks.items,
            "passed": checks.passed,
            "first_failure": checks.first_failure,
            "results": results,
        }
    )


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _add_flags(parser: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    parser.add_argument("--n", type=int, default=s, help="spatial dimension")
    parser.add_argument("--degree", type=int, default=s, help="Hermite truncation degree K")
    parser.add_argument("--nodes", type=int, default=s, help="Gauss-Hermite nodes per axis m")
    parser.add_argument("--time-steps", dest="time_steps", type=int, default=s, help="time grid size M_t")
    parser.add_argument("--seed", type=int, default=s, help="random seed")
    parser.add_argument("--p", type=float, default=s, help="time exponent")
    parser.add_argument("--q", type=float, default=s, help="space exponent")
    parser.add_argument("--r", type=float, default=s, help="Schatten exponent")
    parser.add_argument("--z-re", dest="z_re", type=float, default=s, help="Re z")
    parser.add_argument("--z-im", dest="z_im", type=float, default=s, help="Im z")
    parser.add_argument("--eps-t", dest="eps_t", type=float, default=s, help="singular-time margin")
    parser.add_argument("--tol", type=float, default=s, help="command tolerance override")
    parser.add_argument("--trials", type=int, default=s, help="number of random trials")
    parser.add_argument("--preset", default=s, help="coherent ladder preset: small, medium, large")
    parser.add_argument("--out", default=s, help="write the JSON report here instead of stdout")
    parser.add_argument("--csv", default=s, help="also write a CSV table here")
    parser.add_argument("--config", default=s, help="flat key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oustrichartz",
        description="Numerical checks for Gaussian-measure Hermite analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, anchor) in COMMANDS.items():
        sp = sub.add_parser(name, help=anchor, description=anchor)
        _add_flags(sp)
    return parser


def _write_csv(path: str, rows) -> None:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    try:
        cfg_path = args.pop("config", None)
        cfg = load_config(cfg_path) if cfg_path else RunConfig()
        cfg = cfg.merged(args).validate()
        func = COMMANDS[command][0]
        checks, results, grid_meta, rows = func(cfg)
    except OUStrichartzError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = dumps_report(build_report(command, cfg, checks, results, grid_meta))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.csv and rows:
        _write_csv(cfg.csv, rows)
    if not checks.passed:
        print(f"check failed: {checks.first_failure}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

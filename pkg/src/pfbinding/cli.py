"""Command-line front end for enhanced-binding calculations.

Subcommands: self-energy, threshold, radiative, mass, verify, spectrum.
Every report row carries the name of the operation that produced it.

Exit codes: 0 success, 1 invalid input, 2 convergence failure, 3 failed
property in ``verify``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
from scipy import integrate

from . import closed_form as cf
from . import config as cfg
from .core import ConvergenceError, ValidationError, make_params, photon_quadrature
from .fock import BindingTrial, SelfEnergyTrial, binding_energy_gain, one_photon_sector_minimum
from .radial import (RadialGrid, RadialPotential, default_grid, dipole_spectrum, f_lambda,
                     f_lambda_ratio, inner_photon_integral, radiative_correction_routes,
                     solve_ground_state)

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_PROPERTY = 0, 1, 2, 3


# -- output ------------------------------------------------------------------

def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if value is None:
        return ""
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        v = float(format(float(value), ".12g"))
        return v if math.isfinite(v) else str(v)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def render(reports, fmt) -> str:
    """reports: list of (title, rows) with rows a list of dicts sharing keys."""
    out = []
    for title, rows in reports:
        keys = list(rows[0]) if rows else []
        if fmt == "json":
            obj = {"report": title, "rows": [{k: _json_value(r[k]) for k in keys} for r in rows]}
            out.append(json.dumps(obj))
        elif fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(keys)
            for r in rows:
                writer.writerow([_cell(r[k]) for k in keys])
            out.append(buf.getvalue().rstrip("\n"))
        else:
            cells = [[_cell(r[k]) for k in keys] for r in rows]
            widths = [max([len(k)] + [len(c[i]) for c in cells]) for i, k in enumerate(keys)]
            lines = [f"# {title}", "  ".join(k.ljust(w) for k, w in zip(keys, widths))]
            lines.append("  ".join("-" * w for w in widths))
            lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
            out.append("\n".join(lines))
    sep = "\n" if fmt == "json" else "\n\n"
    return sep.join(out) + "\n"


def _emit(conf, reports):
    text = render(reports, conf.format)
    if conf.output:
        Path(conf.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- shared setup ------------------------------------------------------------

def _float_list(text, name):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(name, f"expected comma-separated numbers, got {text!r}") from None


def _sweep(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError("sweep_lambda", f"expected start:stop:count, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError("sweep_lambda", f"expected start:stop:count, got {text!r}") from None
    if n < 1 or lo <= 0 or hi < lo:
        raise ValidationError("sweep_lambda", "need 0 < start <= stop and count >= 1")
    return np.linspace(lo, hi, n)


def _potential_and_grid(conf, z_charge=None):
    z = conf.z_charge if z_charge is None else z_charge
    params = make_params(conf.alpha, 1.0, conf.a_split, conf.beta, z)
    if conf.potential_file:
        try:
            pot = RadialPotential.load(conf.potential_file)
        except OSError as exc:
            raise ValidationError("potential_file", f"cannot read {conf.potential_file}: {exc.strerror}") from None
    else:
        pot = RadialPotential.coulomb(params.beta_z)
    if conf.r_max is None:
        grid = default_grid(params.beta_z, conf.n_points)
    else:
        grid = RadialGrid(conf.r_max, conf.n_points)
    return pot, grid


def _spectrum(conf, z_charge=None):
    pot, grid = _potential_and_grid(conf, z_charge)
    ground = solve_ground_state(pot, grid)
    return pot, grid, ground, dipole_spectrum(pot, grid, ground)


# -- subcommands -------------------------------------------------------------

def cmd_self_energy(conf):
    if conf.sweep_lambda:
        rows = []
        for lam in _sweep(conf.sweep_lambda):
            est = cf.self_energy_leading(conf.alpha, lam)
            q = SelfEnergyTrial(lam, photon_quadrature(lam, conf.quad_order)).quotient(conf.alpha)
            rows.append({"op": "self_energy_leading", "lambda": lam, "alpha": conf.alpha,
                         "leading": est.leading, "trial_quotient": q,
                         "trial_minus_leading": q - est.leading, "error_bound": est.error_bound})
        return [("self-energy sweep", rows)]
    lam = float(conf.lambda_cut) if conf.lambda_cut != "e0" else None
    if lam is None:
        raise ValidationError("lambda_cut", "'e0' needs a potential; give a number for self-energy")
    make_params(conf.alpha, lam, conf.a_split, conf.beta, conf.z_charge)
    est = cf.self_energy_leading(conf.alpha, lam)
    quad = photon_quadrature(lam, conf.quad_order)
    trial = SelfEnergyTrial(lam, quad, conf.angular_order)
    rep = trial.report(conf.alpha)
    minimum = one_photon_sector_minimum(conf.alpha, lam, quad, angular_order=min(conf.angular_order, 4))
    excess = rep.quotient - est.leading
    tol = 1e-12 * max(1.0, abs(est.leading))
    consistent = -tol <= excess <= est.error_bound + tol
    rows = [
        {"op": "self_energy_leading", "quantity": "leading", "value": est.leading},
        {"op": "self_energy_leading", "quantity": "error_coeff", "value": est.error_coeff},
        {"op": "self_energy_leading", "quantity": "error_bound", "value": est.error_bound},
        {"op": "vacuum_resolvent_integral", "quantity": "V1", "value": cf.vacuum_resolvent_integral(lam)},
        {"op": "resolvent_norm_sq", "quantity": "N2", "value": cf.resolvent_norm_sq(lam)},
        {"op": "self_energy_rayleigh", "quantity": "trial_quotient", "value": rep.quotient},
        {"op": "self_energy_rayleigh", "quantity": "trial_minus_leading", "value": excess},
        {"op": "one_photon_sector_minimum", "quantity": "sector_minimum", "value": minimum},
        {"op": "self_energy_rayleigh", "quantity": "consistent", "value": consistent},
    ]
    return [("self-energy", rows)]


def _threshold_rows(scenarios, conf):
    main, quotes = [], []
    for sc in scenarios:
        e0 = cf.hydrogen_ground_energy(conf.beta, sc.z_charge)
        lam = e0 if sc.lambda_cut == "e0" else float(sc.lambda_cut)
        rep = cf.alpha_threshold(e0, lam, sc.a_split, alpha=conf.beta)
        main.append({"op": "alpha_threshold", "scenario": sc.name, "z": sc.z_charge, "e0": e0,
                     "lambda": lam, "a_split": sc.a_split, "rc_term": rep.rc_term,
                     "schwarz_term": rep.schwarz_term, "alpha_max": rep.alpha_max,
                     "branch": rep.binding_branch, "budget_dominated": rep.budget_dominated,
                     "rc_equality_residual": rep.rc_equality_residual,
                     "physical_alpha_clears": rep.guaranteed})
        for quantity, text, value in sc.quotes:
            computed = getattr(rep, quantity)
            quoted = value(e0)
            quotes.append({"op": "alpha_threshold", "scenario": sc.name, "quantity": quantity,
                           "computed": computed, "quoted": text, "quoted_value": quoted,
                           "computed_over_quoted": computed / quoted})
    return [("threshold", main), ("threshold quoted values", quotes)]


def cmd_threshold(conf, preset=None):
    if preset:
        return _threshold_rows(cfg.preset_scenarios(preset), conf)
    make_params(conf.alpha, 1.0, conf.a_split, conf.beta, conf.z_charge)
    e0 = cf.hydrogen_ground_energy(conf.beta, conf.z_charge)
    lam = conf.resolve_lambda(e0)
    rep = cf.alpha_threshold(e0, lam, conf.a_split, alpha=conf.alpha)
    rows = [{"op": "alpha_threshold", "scenario": "custom", "z": conf.z_charge, "e0": e0, "lambda": lam,
             "a_split": conf.a_split, "rc_term": rep.rc_term, "schwarz_term": rep.schwarz_term,
             "alpha_max": rep.alpha_max, "branch": rep.binding_branch,
             "budget_dominated": rep.budget_dominated, "rc_equality_residual": rep.rc_equality_residual,
             "alpha": conf.alpha, "alpha_clears": rep.guaranteed}]
    return [("threshold", rows)]


def cmd_radiative(conf):
    pot, grid, ground, measure = _spectrum(conf)
    lam = conf.resolve_lambda(ground.e0)
    routes = radiative_correction_routes(pot, grid, lam, measure=measure)
    f_val = f_lambda(measure, lam, conf.inner_method)
    rows = [
        {"op": "solve_ground_state", "quantity": "e0", "value": ground.e0},
        {"op": "solve_ground_state", "quantity": "p_norm_sq", "value": ground.p_norm_sq},
        {"op": "f_lambda", "quantity": "lambda", "value": lam},
        {"op": "f_lambda", "quantity": "F", "value": f_val},
        {"op": "f_lambda_ratio", "quantity": "F_over_log", "value": f_lambda_ratio(measure, lam)},
        {"op": "radiative_correction_spectral", "quantity": "E_spectral", "value": routes.spectral},
        {"op": "radiative_correction_resolvent", "quantity": "E_resolvent", "value": routes.resolvent},
        {"op": "radiative_correction_exact", "quantity": "route_difference", "value": routes.relative_difference},
        {"op": "radiative_correction_upper_bound", "quantity": "E_bound", "value": routes.upper_bound},
        {"op": "radiative_correction_log_approx", "quantity": "R_C",
         "value": cf.radiative_correction_log_approx(conf.alpha, ground.e0, lam)},
        {"op": "radiative_correction_exact", "quantity": "alpha_E", "value": conf.alpha * routes.value},
    ]
    reports = [("radiative", rows)]
    if conf.potential_file:
        return reports
    # Z scaling at fixed cutoff (R_C ~ Z^2) versus cutoff tied to e0 (R_C ~ Z^4)
    zrows = []
    base = None
    for z in _float_list(conf.z_list, "z_list"):
        _, _, g_z, m_z = _spectrum(conf, z)
        lam_fixed = conf.resolve_lambda(g_z.e0) if conf.lambda_cut != "e0" else 1.0
        rc_fixed = conf.alpha * 4 * g_z.p_norm_sq * f_lambda(m_z, lam_fixed, conf.inner_method)
        rc_e0 = conf.alpha * 4 * g_z.p_norm_sq * f_lambda(m_z, g_z.e0, conf.inner_method)
        if base is None:
            base = (z, rc_fixed, rc_e0)
        zrows.append({"op": "radiative_correction_spectral", "z": z, "e0": g_z.e0,
                      "lambda_fixed": lam_fixed, "alpha_E_fixed": rc_fixed,
                      "ratio_fixed": rc_fixed / base[1], "alpha_E_at_e0": rc_e0,
                      "ratio_at_e0": rc_e0 / base[2], "z_ratio": z / base[0]})
    reports.append(("radiative Z scaling", zrows))
    return reports


def cmd_mass(conf):
    _, _, ground, measure = _spectrum(conf)
    rows = []
    for lm in _float_list(conf.lambda_over_m, "lambda_over_m"):
        f_val = f_lambda(measure, lm, conf.inner_method)
        ratios = cf.mass_renormalization(conf.alpha, lm, f_val)
        rows.append({"op": "mass_renormalization", "lambda_over_m": lm, "alpha": conf.alpha, "F": f_val,
                     "spectral": ratios.spectral, "logarithmic": ratios.logarithmic,
                     "relative_difference": ratios.relative_difference})
    return [("mass", rows)]


def cmd_spectrum(conf):
    _, _, ground, measure = _spectrum(conf)
    rows = [{"op": "dipole_spectrum", "gap": d, "weight": w} for d, w in zip(measure.gaps, measure.weights)]
    return [("spectrum", rows)]


# -- property suite ----------------------------------------------------------

def _quad_oracle(f, lam):
    return integrate.quad(f, 0, lam, epsabs=0, epsrel=1e-13, limit=200)[0]


def _closed_form_properties():
    props = []
    for lam in (0.1, 1.0, 2.0, 12.6):
        v1 = _quad_oracle(lambda k: 8 * math.pi * k * k / (k + 1), lam)
        n2 = _quad_oracle(lambda k: 8 * math.pi * k / (k + 1) ** 2, lam)
        err = max(abs(cf.vacuum_resolvent_integral(lam) / v1 - 1), abs(cf.resolvent_norm_sq(lam) / n2 - 1))
        props.append((f"closed_forms_vs_quadrature[L={lam:g}]", err <= 1e-10, err))
    rng = np.random.default_rng(0)
    worst = 0.0
    for alpha, lam in zip(rng.uniform(0, 0.1, 1000), rng.uniform(0.01, 12.6, 1000)):
        lhs = 4 * math.pi * alpha * lam**2 - alpha * cf.vacuum_resolvent_integral(lam)
        rhs = cf.self_energy_leading(alpha, lam).leading
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    props.append(("leading_identity", worst <= 1e-12, worst))
    e0 = cf.hydrogen_ground_energy(1 / 137, 1)
    rep = cf.alpha_threshold(e0, 1.0, 0.25)
    props.append(("threshold_rc_equality", rep.rc_equality_residual <= 1e-12, rep.rc_equality_residual))
    props.append(("threshold_budget_dominated", rep.budget_dominated, rep.alpha_max))
    sw = abs(rep.schwarz_term * 64 * math.pi - 1)
    props.append(("schwarz_branch", sw <= 1e-14, rep.schwarz_term))
    small = cf.alpha_threshold(e0, e0, 1e-3)
    dev = abs(small.alpha_max * 45 * math.pi - 1)
    props.append(("small_cutoff_threshold", dev <= 0.02, small.alpha_max))
    ratios = cf.mass_renormalization(1 / 137, 1.0, 8 * math.pi / 3 * math.log(2))
    props.append(("mass_degenerate_measure", ratios.relative_difference <= 1e-15, ratios.relative_difference))
    cont = abs(float(inner_photon_integral(0.25 - 1e-9, 1.0)) - float(inner_photon_integral(0.25 + 1e-9, 1.0)))
    props.append(("inner_integral_continuity", cont <= 1e-9, cont))
    return props


def _engine_properties(conf):
    props = []
    pot, grid = _potential_and_grid(conf)
    ground = solve_ground_state(pot, grid)
    coulomb = not conf.potential_file
    if coulomb:
        e_exact = cf.hydrogen_ground_energy(conf.beta, conf.z_charge)
        err = abs(ground.e0 / e_exact - 1)
        props.append(("ground_state_energy", err <= 1e-4, err))
    measure = dipole_spectrum(pot, grid, ground)
    props.append(("dipole_sum_rule", abs(measure.sum_rule - 1) <= 1e-3, measure.sum_rule))
    if coulomb:
        gap = abs(measure.gaps[0] / (0.75 * ground.e0) - 1)
        props.append(("smallest_gap_2p", gap <= 1e-3, measure.gaps[0] / ground.e0))
        ratio = f_lambda_ratio(measure, 1.0)
        props.append(("F_ratio_unit_cutoff", 0.95 <= ratio <= 1.0, ratio))
    routes = radiative_correction_routes(pot, grid, 1.0, measure=measure)
    props.append(("radiative_routes_agree", routes.relative_difference <= 0.01, routes.relative_difference))
    props.append(("radiative_upper_bound", routes.spectral <= routes.upper_bound
                  and routes.resolvent <= routes.upper_bound, routes.upper_bound))
    quad = photon_quadrature(1.0, conf.quad_order)
    trial = SelfEnergyTrial(1.0, quad)
    for alpha in (1e-4, 1e-3, 1e-2):
        est = cf.self_energy_leading(alpha, 1.0)
        excess = trial.quotient(alpha) - est.leading
        props.append((f"self_energy_bracket[alpha={alpha:g}]", 0 < excess <= est.error_bound, excess))
    q = trial.quotient(1e-3)
    rel = abs(one_photon_sector_minimum(1e-3, 1.0, quad) / q - 1)
    props.append(("one_photon_sector_optimality", rel <= 1e-10, rel))
    bt = BindingTrial(pot, grid, 1.0, ground=ground)
    worst = max(c.relative for c in bt.report(1e-4).cross_terms)
    props.append(("binding_cross_terms_vanish", worst <= 1e-10, worst))
    gain = binding_energy_gain(1e-4, pot, grid, 1.0, trial=bt)
    props.append(("enhanced_binding_gain_positive", gain > 0, gain))
    return props


def cmd_verify(conf):
    start = time.perf_counter()
    props = _closed_form_properties()
    if not conf.quick:
        try:
            props += _engine_properties(conf)
        except (ConvergenceError, RuntimeError, ValidationError) as exc:
            props.append(("engine_suite", False, f"{type(exc).__name__}: {exc}"))
    rows = [{"op": "verify", "property": name, "status": "PASS" if ok else "FAIL", "value": value}
            for name, ok, value in props]
    rows.append({"op": "verify", "property": "elapsed_seconds", "status": "",
                 "value": time.perf_counter() - start})
    failed = sum(not ok for _, ok, _ in props)
    return [("verify", rows)], (EXIT_PROPERTY if failed else EXIT_OK)


# -- argument parsing --------------------------------------------------------

_FLAG_FIELDS = {
    "alpha": float, "lambda_cut": str, "a_split": float, "beta": float, "z_charge": float,
    "r_max": float, "n_points": int, "quad_order": int, "angular_order": int,
    "inner_method": str, "potential_file": str, "sweep_lambda": str, "lambda_over_m": str,
    "z_list": str, "format": str, "output": str,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags given here override it")
    common.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")
    common.add_argument("--alpha", type=float)
    common.add_argument("--lambda", dest="lambda_cut", help="cutoff, a number or 'e0'")
    common.add_argument("--a-split", dest="a_split", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--z", dest="z_charge", type=float)
    common.add_argument("--r-max", dest="r_max", type=float)
    common.add_argument("--n-points", dest="n_points", type=int)
    common.add_argument("--quad-order", dest="quad_order", type=int)
    common.add_argument("--angular-order", dest="angular_order", type=int)
    common.add_argument("--inner-method", dest="inner_method", choices=["closed", "quadrature"])
    common.add_argument("--potential-file", dest="potential_file")
    common.add_argument("--format", choices=cfg.FORMATS)
    common.add_argument("--output", "-o")

    parser = argparse.ArgumentParser(prog="pfbinding", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("self-energy", parents=[common], help="leading self-energy and trial quotient")
    p.add_argument("--sweep-lambda", dest="sweep_lambda", help="start:stop:count")
    p = sub.add_parser("threshold", parents=[common], help="coupling thresholds for enhanced binding")
    p.add_argument("--preset", choices=sorted(cfg.PRESETS))
    p = sub.add_parser("radiative", parents=[common], help="F(L), E(V, L) by two routes, R_C, Z scaling")
    p.add_argument("--z-list", dest="z_list", help="comma-separated charges for the scaling table")
    p = sub.add_parser("mass", parents=[common], help="renormalized mass ratios over L/m")
    p.add_argument("--lambda-over-m", dest="lambda_over_m", help="comma-separated values")
    p = sub.add_parser("verify", parents=[common], help="run the property suite")
    p.add_argument("--quick", action="store_true", default=None, help="closed-form subset only")
    sub.add_parser("spectrum", parents=[common], help="dipole spectral measure (gap, weight)")
    return parser


def _config_from_args(args):
    conf = cfg.load(args.config) if args.config else cfg.RunConfig()
    changes = {k: getattr(args, k) for k in _FLAG_FIELDS if getattr(args, k, None) is not None}
    if getattr(args, "quick", None):
        changes["quick"] = True
    return conf.updated(**changes)


_COMMANDS = {
    "self-energy": cmd_self_energy,
    "radiative": cmd_radiative,
    "mass": cmd_mass,
    "spectrum": cmd_spectrum,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        conf = _config_from_args(args)
        if args.show_config:
            sys.stdout.write(conf.dumps())
            return EXIT_OK
        status = EXIT_OK
        if args.command == "threshold":
            reports = cmd_threshold(conf, args.preset)
        elif args.command == "verify":
            reports, status = cmd_verify(conf)
        else:
            reports = _COMMANDS[args.command](conf)
        _emit(conf, reports)
        return status
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, RuntimeError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

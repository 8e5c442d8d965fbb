"""Command-line front end.

Commands
--------
stability    stability regions, eta, lambda_ssp/lambda_opt per scheme
cfl-table    matrix of CFL constants C1 (reconstructions x RK schemes)
run          single heat-equation run: final field + run statistics
convergence  grid-refinement study, one table per scheme
barenblatt   porous-medium study against the self-similar solution

All numeric text output uses 6 significant digits; JSON carries full double
precision.  Outputs are deterministic; the JSON meta timestamp can be
suppressed with --no-meta for bitwise-reproducible files.
"""

import argparse
import csv
import json
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .integrator import evolve, timestep
from .problems import (
    DEFAULT_HEAT_T_END,
    barenblatt_grid,
    barenblatt_problem,
    barenblatt_support_radius,
    convergence_study,
    error_norms,
    heat_grid,
    heat_problem,
)
from .relaxation import RECONSTRUCTIONS, Grid1D, SchemeConfig
from .stability import (
    CflModel,
    boundary_locus,
    stability_polynomial,
    stability_report,
    von_neumann_c1,
)
from .tableaux import (
    CATALOG_PAIRS,
    shu_osher_from_dict,
    ssp_tableau,
    tableau_from_dict,
)

_SCHEME_RE = re.compile(r"^ssp\(\s*(\d+)\s*,\s*(\d+)\s*\)$", re.IGNORECASE)


class CliError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """The parameter set of one command invocation, as written into output
    files; serializing and parsing it back is the identity."""

    command: str
    params: dict

    def to_json_dict(self) -> dict:
        return {"command": self.command, **self.params}

    @classmethod
    def from_json_dict(cls, d: dict):
        d = dict(d)
        return cls(command=d.pop("command"), params=d)


def _config(args, command, keys):
    return ExperimentConfig(command, {k: getattr(args, k) for k in keys})


def _parse_scheme(spec: str):
    """'ssp(s,p)' (case-insensitive) or a path to a tableau JSON file.

    Returns (name, ButcherTableau, ShuOsherForm or None).
    """
    spec = spec.strip()
    m = _SCHEME_RE.match(spec)
    if m:
        s, p = int(m.group(1)), int(m.group(2))
        try:
            tab, form = ssp_tableau(s, p)
        except ValueError as err:
            raise CliError(str(err)) from err
        return f"ssp({s},{p})", tab, form
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        data = json.loads(path.read_text())
        if "alpha" in data:
            tab, form = shu_osher_from_dict(data)
        else:
            tab, form = tableau_from_dict(data), None
        return path.stem, tab, form
    pairs = ", ".join(f"ssp({a},{b})" for a, b in CATALOG_PAIRS)
    raise CliError(f"unknown scheme '{spec}'; expected one of {pairs} or a tableau .json file")


def _parse_schemes(arg: str):
    # split on commas that are not inside the ssp(s,p) parentheses
    parts = re.split(r",(?![^(]*\))", arg)
    return [_parse_scheme(s) for s in parts if s.strip()]


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")


def _meta(args):
    meta = {"tool": "relaxdiff", "version": __version__}
    if not args.no_meta:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    if args.seed is not None:
        meta["seed"] = args.seed
    return meta


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _formats(args, available):
    if args.format is None:
        return set(available)
    wanted = {f.strip() for f in args.format.split(",") if f.strip()}
    unknown = wanted - {"csv", "json", "txt", "svg"}
    if unknown:
        raise CliError(f"unknown format(s): {', '.join(sorted(unknown))}")
    return wanted & set(available)


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _write_field_csv(path: Path, grid, u):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u"])
        for x, val in zip(grid.centers(), u):
            w.writerow([repr(float(x)), repr(float(val))])


def _fmt(v) -> str:
    return f"{v:.6g}"


# ---------------------------------------------------------------------------
# stability command
# ---------------------------------------------------------------------------

_SVG_COLORS = ("#c0392b", "#2471a3", "#1e8449")


def _locus_curves(points, degree):
    """Group (theta, z) root pairs into continuous curves by nearest match."""
    by_theta = {}
    for theta, z in points:
        by_theta.setdefault(theta, []).append(z)
    thetas = sorted(by_theta)
    curves = [[z] for z in by_theta[thetas[0]]]
    for theta in thetas[1:]:
        remaining = list(by_theta[theta])
        for curve in curves:
            j = int(np.argmin([abs(z - curve[-1]) for z in remaining]))
            curve.append(remaining.pop(j))
    return curves


def _svg_document(named_loci, fe_circle=True):
    pts = [z for _, points, _ in named_loci for _, z in points]
    re_vals = [z.real for z in pts] + [0.5, -2.5]
    im_vals = [z.imag for z in pts] + [2.0, -2.0]
    lo_x, hi_x = min(re_vals) - 0.4, max(re_vals) + 0.4
    lo_y, hi_y = min(im_vals) - 0.4, max(im_vals) + 0.4
    width = 640.0
    scale = width / (hi_x - lo_x)
    height = (hi_y - lo_y) * scale

    def sx(x):
        return (x - lo_x) * scale

    def sy(y):
        return (hi_y - y) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<line x1="{sx(lo_x):.1f}" y1="{sy(0):.1f}" x2="{sx(hi_x):.1f}" '
        f'y2="{sy(0):.1f}" stroke="#999" stroke-width="1"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(lo_y):.1f}" x2="{sx(0):.1f}" '
        f'y2="{sy(hi_y):.1f}" stroke="#999" stroke-width="1"/>',
    ]
    if fe_circle:
        parts.append(
            f'<circle cx="{sx(-1):.1f}" cy="{sy(0):.1f}" r="{scale:.1f}" fill="none" '
            'stroke="#333" stroke-width="1.5" stroke-dasharray="6 4"/>'
        )
    for idx, (name, points, degree) in enumerate(named_loci):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        for curve in _locus_curves(points, degree):
            coords = " ".join(f"{sx(z.real):.2f},{sy(z.imag):.2f}" for z in curve)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        parts.append(
            f'<text x="12" y="{20 + 18 * idx}" fill="{color}" font-size="14">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _cmd_stability(args):
    schemes = _parse_schemes(args.scheme)
    if args.tableau:
        schemes.append(_parse_scheme(args.tableau))
    formats = _formats(args, ("csv", "json", "svg"))
    out = _outdir(args)
    reports = []
    loci = []
    for name, tab, form in schemes:
        rep = stability_report(tab, form=form, locus_samples=args.locus_samples)
        reports.append(
            {
                "scheme": name,
                "s": tab.s,
                "p": tab.p,
                "eta": rep.eta,
                "lambda_ssp": rep.lambda_ssp,
                "lambda_opt": rep.lambda_opt,
            }
        )
        loci.append((name, rep.locus, stability_polynomial(tab).degree))
        if "csv" in formats:
            with (out / f"locus_{_slug(name)}.csv").open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["theta", "re", "im"])
                for theta, z in rep.locus:
                    w.writerow([repr(theta), repr(z.real), repr(z.imag)])
    if "json" in formats:
        config = _config(args, "stability", ["scheme", "locus_samples"])
        _write_json(
            out / "stability_report.json",
            {"meta": _meta(args), "config": config.to_json_dict(), "schemes": reports},
        )
    if "svg" in formats and (args.svg or args.format):
        (out / "regions.svg").write_text(_svg_document(loci[:3]))
    for r in reports:
        lam_ssp = "-" if r["lambda_ssp"] is None else _fmt(r["lambda_ssp"])
        print(
            f"{r['scheme']}: eta={_fmt(r['eta'])} lambda_ssp={lam_ssp} "
            f"lambda_opt={_fmt(r['lambda_opt'])}"
        )
    return 0


# ---------------------------------------------------------------------------
# cfl-table command
# ---------------------------------------------------------------------------

def _cmd_cfl_table(args):
    recons = [r.strip() for r in args.recons.split(",") if r.strip()]
    for r in recons:
        if r not in RECONSTRUCTIONS:
            raise CliError(f"unknown reconstruction '{r}'; use one of {RECONSTRUCTIONS}")
    schemes = _parse_schemes(args.schemes)
    formats = _formats(args, ("json", "txt"))
    out = _outdir(args)
    polys = [(name, stability_polynomial(tab)) for name, tab, _ in schemes]
    table = {r: {name: von_neumann_c1(r, poly) for name, poly in polys} for r in recons}

    header = f"{'':16s}" + "".join(f"{name:>12s}" for name, _ in polys)
    lines = [header]
    for r in recons:
        lines.append(f"{r:16s}" + "".join(f"{_fmt(table[r][name]):>12s}" for name, _ in polys))
    text = "\n".join(lines) + "\n"
    if "txt" in formats:
        (out / "cfl_table.txt").write_text(text)
    if "json" in formats:
        config = _config(args, "cfl-table", ["recons", "schemes"])
        _write_json(
            out / "cfl_table.json",
            {"meta": _meta(args), "config": config.to_json_dict(), "c1": table},
        )
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# shared run machinery
# ---------------------------------------------------------------------------

def _scheme_config(recon, phi, c1, delta):
    if c1 is None:
        c1 = von_neumann_c1(recon, stability_polynomial(ssp_tableau(1, 1)[0]))
    return SchemeConfig(recon=recon, phi=phi, cfl=CflModel(c1=c1, delta=delta))


def _lambda_arg(value):
    if value in ("ssp", "opt"):
        return value
    try:
        return float(value)
    except ValueError:
        raise CliError(f"--lambda must be 'ssp', 'opt', or a number; got '{value}'")


def _cmd_run(args):
    if args.problem != "heat":
        raise CliError("run supports --problem heat; use the barenblatt command otherwise")
    name, tab, form = _parse_scheme(args.scheme)
    lam = _lambda_arg(args.lam)
    prob = heat_problem(xi_mode=args.xi_mode, d=args.d)
    grid = heat_grid(args.n)
    cfg = _scheme_config(args.recon, args.phi, args.c1, args.delta)
    u, stats = evolve(prob, cfg, grid, tab, args.t_end, lam=lam, form=form)
    l1, linf = error_norms(u, prob.exact, grid, args.t_end)
    formats = _formats(args, ("csv", "json"))
    out = _outdir(args)
    config = _config(
        args, "run", ["problem", "xi_mode", "d", "recon", "scheme", "lam", "n", "t_end", "phi"]
    )
    payload = {
        "meta": _meta(args),
        "config": config.to_json_dict(),
        "scheme": name,
        "c1": cfg.cfl.c1,
        "delta": cfg.cfl.delta,
        "stats": {"n_f": stats.n_f, "steps": stats.steps, "t_final": stats.t_final},
        "errors": {"l1": l1, "linf": linf},
    }
    if "json" in formats:
        _write_json(out / "run.json", payload)
    if "csv" in formats:
        _write_field_csv(out / "field.csv", grid, u)
    print(
        f"{name} + {args.recon}: steps={stats.steps} n_f={stats.n_f} "
        f"L1={_fmt(l1)} Linf={_fmt(linf)}"
    )
    return 0


def _cmd_convergence(args):
    if args.problem != "heat":
        raise CliError("convergence supports --problem heat; use barenblatt otherwise")
    grids = [int(g) for g in args.grids.split(",") if g.strip()]
    schemes = _parse_schemes(args.schemes)
    lam = _lambda_arg(args.lam)
    prob = heat_problem(xi_mode=args.xi_mode, d=args.d)
    cfg = _scheme_config(args.recon, args.phi, args.c1, args.delta)
    formats = _formats(args, ("json", "txt"))
    out = _outdir(args)
    results = []
    lines = [f"{'scheme':>10s} {'stages':>6s} {'CFL':>16s} {'order':>7s} {'N_f':>8s}"]
    for name, tab, form in schemes:
        try:
            rep = convergence_study(prob, cfg, tab, grids, args.t_end, lam=lam, form=form)
        except ValueError as err:
            raise CliError(str(err)) from err
        from .stability import stability_report as _rep

        lam_value = lam if isinstance(lam, float) else getattr(
            _rep(tab, form=form), f"lambda_{lam}"
        )
        cfl_label = f"{lam_value:.6g}x{cfg.cfl.c1 - cfg.cfl.delta:.6g}"
        mean_order = float(np.mean(rep.orders))
        results.append(
            {
                "scheme": name,
                "stages": tab.s,
                "lambda": lam_value,
                "cfl": cfl_label,
                "grids": rep.grids,
                "errors_l1": rep.errors_l1,
                "errors_linf": rep.errors_linf,
                "orders": rep.orders,
                "mean_order": mean_order,
                "n_f": rep.n_f,
            }
        )
        lines.append(
            f"{name:>10s} {tab.s:>6d} {cfl_label:>16s} {mean_order:>7.2f} {rep.n_f[-1]:>8d}"
        )
    text = "\n".join(lines) + "\n"
    if "txt" in formats:
        (out / "convergence.txt").write_text(text)
    if "json" in formats:
        config = _config(
            args, "convergence",
            ["problem", "xi_mode", "d", "recon", "schemes", "lam", "grids", "t_end", "phi"],
        )
        _write_json(
            out / "convergence.json",
            {"meta": _meta(args), "config": config.to_json_dict(), "results": results},
        )
    print(text, end="")
    return 0


def _cmd_barenblatt(args):
    grids = [int(g) for g in args.grids.split(",") if g.strip()]
    name, tab, form = _parse_scheme(args.scheme)
    lam = _lambda_arg(args.lam)
    prob = barenblatt_problem(args.m, args.t0, args.mass)
    phi = args.phi if args.phi is not None else float(np.sqrt(prob.d * prob.mu))
    cfg = _scheme_config(args.recon, phi, args.c1, args.delta)
    formats = _formats(args, ("csv", "json"))
    out = _outdir(args)
    rows = []
    last = None
    for n in grids:
        grid = barenblatt_grid(args.m, args.t0, args.mass, args.t_end, n)
        u, stats = evolve(prob, cfg, grid, tab, args.t_end, lam=lam, form=form)
        l1, linf = error_norms(u, prob.exact, grid, args.t_end)
        mass0 = float(prob.u0(grid.centers()).sum() * grid.h)
        mass1 = float(u.sum() * grid.h)
        support = grid.centers()[np.abs(u) > 1e-10]
        r_num = float(np.abs(support).max()) if support.size else 0.0
        r_exact = barenblatt_support_radius(args.m, args.t0, args.mass, args.t_end)
        rows.append(
            {
                "n": n,
                "h": grid.h,
                "l1": l1,
                "linf": linf,
                "mass_drift": mass1 - mass0,
                "support_radius": r_num,
                "support_radius_exact": r_exact,
                "n_f": stats.n_f,
            }
        )
        last = (grid, u)
    if "json" in formats:
        _write_json(
            out / "barenblatt.json",
            {
                "meta": _meta(args),
                "scheme": name,
                "recon": args.recon,
                "m": args.m,
                "t0": args.t0,
                "mass": args.mass,
                "t_end": args.t_end,
                "phi": phi,
                "grids": rows,
            },
        )
    if "csv" in formats and last is not None:
        _write_field_csv(out / "barenblatt_field.csv", last[0], last[1])
    for row in rows:
        print(
            f"n={row['n']:>5d} L1={_fmt(row['l1'])} mass_drift={_fmt(row['mass_drift'])} "
            f"support={_fmt(row['support_radius'])} (exact {_fmt(row['support_radius_exact'])})"
        )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--format", default=None, help="comma list of csv,json,txt,svg")
    sub.add_argument("--no-meta", action="store_true", help="omit timestamp from JSON meta")
    sub.add_argument("--seed", type=int, default=None, help="reserved; kernels are deterministic")


def build_parser():
    ap = argparse.ArgumentParser(prog="relaxdiff", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sp = ap.add_subparsers(dest="command", required=True)

    st = sp.add_parser("stability", help="stability regions and coefficients")
    st.add_argument("--scheme", required=True, help="comma list, e.g. ssp(3,2),ssp(4,2)")
    st.add_argument("--locus-samples", type=int, default=360)
    st.add_argument("--svg", action="store_true", help="emit regions.svg overlay")
    st.add_argument("--tableau", default=None, help="extra user tableau JSON")
    _add_common(st)
    st.set_defaults(func=_cmd_stability)

    cf = sp.add_parser("cfl-table", help="CFL constants C1 per reconstruction/scheme")
    cf.add_argument("--recons", default="pwc,pwl,weno5")
    cf.add_argument("--schemes", default="ssp(1,1),ssp(2,2),ssp(3,3)")
    _add_common(cf)
    cf.set_defaults(func=_cmd_cfl_table)

    rn = sp.add_parser("run", help="single heat-equation run")
    rn.add_argument("--problem", default="heat")
    rn.add_argument("--xi-mode", type=int, default=1)
    rn.add_argument("--d", type=float, default=1.0)
    rn.add_argument("--recon", default="weno5", choices=RECONSTRUCTIONS)
    rn.add_argument("--scheme", required=True)
    rn.add_argument("--lambda", dest="lam", default="ssp")
    rn.add_argument("--n", type=int, default=80)
    rn.add_argument("--t-end", type=float, default=DEFAULT_HEAT_T_END)
    rn.add_argument("--phi", type=float, default=0.0)
    rn.add_argument("--c1", type=float, default=None, help="override computed C1")
    rn.add_argument("--delta", type=float, default=0.01)
    _add_common(rn)
    rn.set_defaults(func=_cmd_run)

    cv = sp.add_parser("convergence", help="grid refinement study")
    cv.add_argument("--problem", default="heat")
    cv.add_argument("--xi-mode", type=int, default=1)
    cv.add_argument("--d", type=float, default=1.0)
    cv.add_argument("--recon", default="weno5", choices=RECONSTRUCTIONS)
    cv.add_argument("--schemes", required=True)
    cv.add_argument("--lambda", dest="lam", default="ssp")
    cv.add_argument("--grids", default="20,40,80,160")
    cv.add_argument("--t-end", type=float, default=DEFAULT_HEAT_T_END)
    cv.add_argument("--phi", type=float, default=0.0)
    cv.add_argument("--c1", type=float, default=None)
    cv.add_argument("--delta", type=float, default=0.01)
    _add_common(cv)
    cv.set_defaults(func=_cmd_convergence)

    bb = sp.add_parser("barenblatt", help="porous-medium study")
    bb.add_argument("--m", type=float, default=2.0)
    bb.add_argument("--t0", type=float, default=1.0)
    bb.add_argument("--mass", type=float, default=1.0)
    bb.add_argument("--recon", default="pwc", choices=RECONSTRUCTIONS)
    bb.add_argument("--scheme", default="ssp(1,1)")
    bb.add_argument("--lambda", dest="lam", default="ssp")
    bb.add_argument("--grids", default="40,80,160,320")
    bb.add_argument("--t-end", type=float, default=1.0)
    bb.add_argument("--phi", type=float, default=None, help="default sqrt(D*mu)")
    bb.add_argument("--c1", type=float, default=None)
    bb.add_argument("--delta", type=float, default=0.01)
    _add_common(bb)
    bb.set_defaults(func=_cmd_barenblatt)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

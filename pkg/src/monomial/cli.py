"""Command line front end: ``monomial <command> ...``.

Exit status is 0 on success, 1 for bad input (syntax, unknown names, invalid
values) and 2 when the mathematics fails (resonance, exhausted depth, no
valid termination).  Errors go to stderr as ``ErrorName: message``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from typing import List, Optional, Sequence

from . import catalog, heun
from .core import GeneralizedSeries, as_scalar, format_scalar
from .dsl import parse_bindings, parse_ode
from .errors import MonomialError, NoDiagonalPart
from .normal_form import LinearODE, suggest_shift, to_operator_form
from .solver import SolveConfig, Solution, solve_all, solve_homogeneous, solve_with_source


class CommandError(Exception):
    """A failure with a chosen exit code and error name."""

    def __init__(self, name: str, message: str, code: int = 2):
        super().__init__(message)
        self.name = name
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"UsageError: {message}\n")
        raise SystemExit(1)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def num(value: float) -> float:
    """A float rounded to 15 significant digits."""
    return float(f"{float(value):.15g}")


def terms_json(series: GeneralizedSeries) -> list:
    return [{"coefficient": format_scalar(c), "exponent": format_scalar(e)} for e, c in series.items()]


def solution_json(sol: Solution) -> dict:
    out = {"lambda": format_scalar(sol.lam), "terminated": sol.terminated}
    if sol.series is not None:
        out["terms"] = terms_json(sol.series)
        if sol.series.frontier is not None:
            out["frontier"] = format_scalar(sol.series.frontier)
    if sol.error is not None:
        out["error"] = type(sol.error).__name__
    return out


def series_from_json(terms: list) -> dict:
    """Inverse of :func:`terms_json`, as an exponent -> coefficient dict."""
    return {Fraction(t["exponent"]): Fraction(t["coefficient"]) for t in terms}


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def _series_text(series: GeneralizedSeries) -> List[str]:
    lines = [f"  x^{format_scalar(e)}: {format_scalar(c)}" for e, c in series.items()]
    if series.frontier is not None:
        rel = ">" if series.direction == "ascending" else "<"
        lines.append(f"  + terms at exponents {rel} {format_scalar(series.frontier)}")
    return lines


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _load(path: str, params) -> LinearODE:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError("FileError", str(exc), 1) from None
    return parse_ode(text, parse_bindings(params))


def _split(ode: LinearODE, shift: Optional[int]):
    if shift is not None:
        return to_operator_form(ode, shift)
    try:
        return to_operator_form(ode, 0)
    except NoDiagonalPart:
        best = suggest_shift(ode).recommended()
        if best is None:
            raise
        return to_operator_form(ode, best)


def cmd_normal_form(args, out) -> int:
    ode = _load(args.file, args.param)
    report = suggest_shift(ode)
    split = _split(ode, args.shift)
    if args.json:
        obj = {
            "F": [format_scalar(c) for c in split.F.coeffs],
            "P": [{"c": format_scalar(t.c), "i": t.i, "j": t.j} for t in split.P.terms],
            "shift": split.shift,
            "candidates": [
                {"shift": c.shift, "degree": c.degree, "rational_roots": c.root_count, "full": c.full}
                for c in report.candidates
            ],
            "recommended": report.recommended(),
        }
        if split.scaled_source is not None:
            obj["source"] = terms_json(split.scaled_source)
        _emit(obj, out)
        return 0
    out.write(split.pretty() + "\n")
    out.write("shift candidates:\n")
    for c in report.candidates:
        flag = "  full degree" if c.full else ""
        out.write(f"  s={c.shift}: deg F = {c.degree}, rational roots = {c.root_count}{flag}\n")
    out.write(f"recommended shift: {report.recommended()}\n")
    return 0


def cmd_solve(args, out) -> int:
    ode = _load(args.file, args.param)
    if args.source and ode.source is None:
        raise CommandError("ValueError", "--source given but the equation has no y-free terms", 1)
    split = _split(ode, args.shift)
    kw = {"strict": args.strict}
    if args.depth is not None:
        kw["max_depth"] = args.depth
    if args.bound is not None:
        kw["frontier_bound"] = as_scalar(args.bound)
    cfg = SolveConfig(**kw)
    if ode.source is not None:
        sols = [solve_with_source(split, cfg)]
    elif args.lam is not None:
        sols = [solve_homogeneous(split, as_scalar(args.lam), cfg)]
    else:
        sols = list(solve_all(split, cfg))
    if args.json:
        _emit({"solutions": [solution_json(s) for s in sols]}, out)
    else:
        for s in sols:
            label = "particular solution" if s.has_source else f"lambda = {format_scalar(s.lam)}"
            if s.error is not None:
                out.write(f"{label}: {type(s.error).__name__}: {s.error}\n")
                continue
            state = "terminated" if s.terminated else "truncated"
            out.write(f"{label}: {state} after {s.depth_used} steps\n")
            out.write("\n".join(_series_text(s.series)) + "\n")
    failed = [s for s in sols if s.error is not None]
    if failed:
        for s in failed:
            sys.stderr.write(f"{type(s.error).__name__}: {s.error}\n")
        return 2
    return 0


def cmd_catalog_list(args, out) -> int:
    if args.json:
        _emit({"families": [{"name": n, "params": list(catalog.FAMILIES[n].required), "summary": catalog.FAMILIES[n].summary} for n in catalog.families()]}, out)
        return 0
    for name in catalog.families():
        fam = catalog.FAMILIES[name]
        out.write(f"{name:20s} {', '.join(fam.required):24s} {fam.summary}\n")
    return 0


def cmd_catalog_verify(args, out) -> int:
    params = parse_bindings(args.param)
    if args.n is not None:
        params["n"] = Fraction(args.n)
    report = catalog.compare(args.family, params, order=args.order)
    if args.json:
        obj = {
            "family": report.name,
            "order": report.order,
            "match": report.match,
            "route": report.route,
            "compared_terms": report.compared_terms,
            "mismatch": None,
            "error": report.error,
            "direct_error": report.direct_error,
        }
        if report.mismatch is not None:
            e, want, got = report.mismatch
            obj["mismatch"] = {"exponent": format_scalar(e), "expected": format_scalar(want), "got": format_scalar(got)}
        _emit(obj, out)
    else:
        out.write("\n".join(report.lines()) + "\n")
    if not report.match:
        name = report.error.split(":", 1)[0] if report.error else "OracleMismatch"
        sys.stderr.write(f"{name}: {args.family} does not match its closed form\n")
        return 2
    return 0


def _omega(args):
    eps2 = as_scalar(args.eps2)
    return eps2, (-eps2 / 2 if args.omega is None else as_scalar(args.omega))


def cmd_heun_scan(args, out) -> int:
    eps2, omega = _omega(args)
    rows = heun.termination_scan(eps2, args.nmax, omega)
    if args.json:
        _emit(
            {
                "eps2": format_scalar(eps2),
                "omega": format_scalar(omega),
                "rows": [
                    {
                        "n": r.n,
                        "m": r.m,
                        "s": format_scalar(r.s),
                        "energy_ratio": format_scalar(r.energy_ratio),
                        "status": r.status,
                        "f_coeffs": terms_json(r.f_coeffs),
                    }
                    for r in rows
                ],
            },
            out,
        )
        return 0
    out.write(f"eps2 = {format_scalar(eps2)}, Omega = {format_scalar(omega)}\n")
    out.write(f"{'n':>3} {'m':>3} {'s':>8} {'E/rho^2':>10}  status\n")
    for r in rows:
        out.write(f"{r.n:>3} {r.m:>3} {format_scalar(r.s):>8} {format_scalar(r.energy_ratio):>10}  {r.status}\n")
    if not rows:
        out.write("no terminating solutions\n")
    return 0


def _qes(args):
    eps2, omega = _omega(args)
    for row in heun.termination_scan(eps2, args.n, omega):
        if row.n == args.n and row.accepted:
            return heun.make_solution(row, eps2, args.rho, omega)
    raise CommandError("NoBoundState", f"no normalizable terminating solution with n = {args.n}", 2)


def cmd_heun_wavefunction(args, out) -> int:
    if args.samples < 2:
        raise CommandError("ValueError", "--samples must be at least 2", 1)
    sol = _qes(args)
    ymax = args.ymax if args.ymax is not None else 10 / args.rho
    ys = [ymax * i / (args.samples - 1) for i in range(args.samples)]
    rows = [(y, heun.coordinate_map(y, args.rho, sol.params.eps2), heun.wavefunction(sol, y)) for y in ys]
    if args.json:
        _emit(
            {
                "n": sol.n,
                "s": format_scalar(sol.s),
                "E": num(sol.E),
                "norm": num(sol.norm),
                "samples": [{"y": num(y), "x": num(x), "psi": num(p)} for y, x, p in rows],
            },
            out,
        )
        return 0
    out.write(f"n = {sol.n}, s = {format_scalar(sol.s)}, E = {num(sol.E)!r}, N = {num(sol.norm)!r}\n")
    out.write(f"{'y':>12} {'x':>18} {'psi':>18}\n")
    for y, x, p in rows:
        out.write(f"{num(y):>12.6g} {num(x):>18.12g} {num(p):>18.12g}\n")
    return 0


def cmd_heun_residual(args, out) -> int:
    sol = _qes(args)
    h = args.h if args.h is not None else 1e-3 / args.rho
    grid = heun.uniform_grid(args.ymin, args.ymax, h)
    spec = heun.PotentialSpec.of(sol.params)
    E = sol.E + args.energy_shift
    res = heun.schrodinger_residual(sol, spec, grid, E)
    peak = float(max(abs(v) for v in heun.wavefunction(sol, grid)))
    if args.json:
        _emit({"n": sol.n, "E": num(E), "residual": num(res), "max_abs_psi": num(peak), "h": num(h)}, out)
        return 0
    out.write(f"n = {sol.n}, E = {num(E)!r}, h = {num(h)!r}\n")
    out.write(f"max |-psi'' + (V - E) psi| = {num(res):.6e}\n")
    out.write(f"max |psi| = {num(peak):.6e}\n")
    return 0


DEMO_FILES = ("hermite.ode", "legendre.ode", "bessel.ode", "source.ode", "lommel.ode")


def demo_commands() -> List[List[str]]:
    """The argv lists run by ``monomial demo``; .ode names refer to bundled files."""
    cmds: List[List[str]] = []
    for name in DEMO_FILES:
        cmds.append(["normal-form", name])
        if name == "legendre.ode":
            extra = ["--lambda", "4"]
        elif name == "hermite.ode":
            extra = []
        else:
            extra = ["--depth", "6"]
        cmds.append(["solve", name, *extra])
    cmds.append(["catalog", "list"])
    for fam, extra in (
        ("hermite", ["--n", "6"]),
        ("chebyshev_t", ["--n", "5"]),
        ("jacobi", ["--n", "3", "--param", "alpha=1/2", "--param", "beta=3/2"]),
        ("bessel", ["--param", "nu=1/3"]),
        ("lommel", ["--param", "mu=1", "--param", "nu=1/2"]),
        ("neumann", ["--n", "3"]),
        ("periodic", ["--param", "a=1", "--param", "lam=1"]),
    ):
        cmds.append(["catalog", "verify", fam, *extra])
    cmds.append(["heun", "scan", "--eps2", "1", "--nmax", "4"])
    cmds.append(["heun", "wavefunction", "--n", "2", "--rho", "1", "--samples", "6"])
    cmds.append(["heun", "residual", "--n", "2", "--rho", "1"])
    return cmds


def cmd_demo(args, out) -> int:
    base = resources.files("monomial") / "data"
    status = 0
    for argv in demo_commands():
        shown = " ".join(argv + (["--json"] if args.json else []))
        out.write(f"$ monomial {shown}\n")
        real = [str(base / a) if a.endswith(".ode") else a for a in argv]
        if args.json:
            real.append("--json")
        code = main(real, out=out)
        status = max(status, code)
    return status


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="monomial", description="Series solutions of linear ODEs via F(D) + P splitting.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit JSON")

    nf = sub.add_parser("normal-form", help="show the F(D) + P split and shift candidates")
    nf.add_argument("file")
    nf.add_argument("--shift", type=int)
    nf.add_argument("--param", action="append", metavar="k=v")
    common(nf)
    nf.set_defaults(func=cmd_normal_form)

    so = sub.add_parser("solve", help="series solutions of an .ode file")
    so.add_argument("file")
    so.add_argument("--lambda", dest="lam", metavar="p/q")
    so.add_argument("--depth", type=int)
    so.add_argument("--bound", metavar="p/q", help="how far past the start exponent to keep terms")
    so.add_argument("--shift", type=int)
    so.add_argument("--source", action="store_true", help="require a source term and solve with it")
    so.add_argument("--strict", action="store_true", help="fail when the depth runs out")
    so.add_argument("--param", action="append", metavar="k=v")
    common(so)
    so.set_defaults(func=cmd_solve)

    cat = sub.add_parser("catalog", help="named equations")
    csub = cat.add_subparsers(dest="catalog_command", required=True, parser_class=_Parser)
    cl = csub.add_parser("list")
    common(cl)
    cl.set_defaults(func=cmd_catalog_list)
    cv = csub.add_parser("verify", help="compare the cascade with the closed form")
    cv.add_argument("family")
    cv.add_argument("--n", type=int)
    cv.add_argument("--order", type=int)
    cv.add_argument("--param", action="append", metavar="k=v")
    common(cv)
    cv.set_defaults(func=cmd_catalog_verify)

    he = sub.add_parser("heun", help="quasi-exactly solvable Heun potential")
    hsub = he.add_subparsers(dest="heun_command", required=True, parser_class=_Parser)

    def heun_common(sp):
        sp.add_argument("--eps2", default="1", metavar="p/q")
        sp.add_argument("--omega", metavar="p/q", help="defaults to -eps2/2")
        common(sp)

    hs = hsub.add_parser("scan")
    hs.add_argument("--nmax", type=int, default=4)
    heun_common(hs)
    hs.set_defaults(func=cmd_heun_scan)
    hw = hsub.add_parser("wavefunction")
    hw.add_argument("--n", type=int, required=True)
    hw.add_argument("--rho", type=float, default=1.0)
    hw.add_argument("--samples", type=int, default=11)
    hw.add_argument("--ymax", type=float)
    heun_common(hw)
    hw.set_defaults(func=cmd_heun_wavefunction)
    hr = hsub.add_parser("residual")
    hr.add_argument("--n", type=int, required=True)
    hr.add_argument("--rho", type=float, default=1.0)
    hr.add_argument("--ymin", type=float, default=0.5)
    hr.add_argument("--ymax", type=float, default=5.0)
    hr.add_argument("--h", type=float)
    hr.add_argument("--energy-shift", type=float, default=0.0)
    heun_common(hr)
    hr.set_defaults(func=cmd_heun_residual)

    de = sub.add_parser("demo", help="run the bundled examples")
    common(de)
    de.set_defaults(func=cmd_demo)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except CommandError as exc:
        sys.stderr.write(f"{exc.name}: {exc}\n")
        return exc.code
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        # includes parse errors, unknown families and missing parameters
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    except MonomialError as exc:
        code = 1 if type(exc).__name__ in ("ParseError", "UnboundParameter", "NonlinearTerm") else 2
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return code


def entry() -> None:
    raise SystemExit(main())

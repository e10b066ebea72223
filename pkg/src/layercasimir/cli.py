"""Command line entry point: ``layercasimir compute|sweep|check --config FILE``.

Exit codes: 0 success, 1 check failure, 2 non-convergence, 3 degenerate
configuration, 4 configuration error.
"""
from __future__ import annotations

import argparse
import io
import sys
from dataclasses import replace
from typing import List, Optional, TextIO

import numpy as np

from . import checks
from . import quadrature as quad
from .config import FORMATS, TASKS, RunConfig, load_config
from .errors import CasimirError, DegenerateError, NonConvergence, ParseError, ValidationError
from .kernel import n2_denominator
from .materials import C, POLARIZATIONS, SpectralPoint

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NONCONVERGENCE = 2
EXIT_DEGENERATE = 3
EXIT_CONFIG = 4

CSV_HEADER = "target_m,E_Jm2,FL_Nm2,FR_Nm2,FS_Nm2,err_rel"


def fmt_num(x: float) -> str:
    """Scientific notation, 9 significant digits, locale independent."""
    return f"{x:.8e}"


def csv_row(target: float, res: Optional[quad.CasimirResult] = None, error: Optional[BaseException] = None) -> str:
    if res is None:
        return f"{fmt_num(target)},,,,,error:{type(error).__name__}"
    vals = (target, res.energy, res.force_left, res.force_right, res.force_stack, res.est_error)
    return ",".join(fmt_num(v) for v in vals)


def _table(header: List[str], rows: List[List[str]]) -> str:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n"


def render_result(cfg: RunConfig, res: quad.CasimirResult) -> str:
    system = cfg.system
    out = io.StringIO()
    out.write(f"layers: {system.n}   total gap: {fmt_num(system.total_gap)} m\n")
    names = [("E", "J/m^2", "energy"), ("F_L", "N/m^2", "force_left"),
             ("F_R", "N/m^2", "force_right"), ("F_S", "N/m^2", "force_stack")]
    rows = []
    for label, unit, attr in names:
        row = [label, unit, fmt_num(getattr(res, attr))]
        row += [fmt_num(getattr(res.per_polarization[q], attr)) for q in POLARIZATIONS]
        rows.append(row)
    out.write(_table(["quantity", "unit", "total", "p", "s"], rows))
    out.write(f"est_error (rel): {res.est_error:.2e}\n")
    out.write(f"evaluations: {res.evaluations}\n")
    return out.getvalue()


def n2_path_energy(cfg: RunConfig) -> float:
    """Energy from the closed two-medium denominator, bypassing the recursion."""
    system = cfg.system
    if system.n != 2:
        raise ValidationError("--debug-n2-path needs exactly two [[layer]] entries")
    spec = cfg.quadrature
    if spec.xi_scale is None:
        spec = replace(spec, xi_scale=C / system.total_gap)

    def f(xi, k):
        return sum(np.log(n2_denominator(system, SpectralPoint(xi, k, q))) for q in POLARIZATIONS)

    value, _ = quad.integrate_spectrum(f, spec)
    return float(quad.ENERGY_PREFACTOR * value)


def run_compute(cfg: RunConfig, out: TextIO, debug_n2: bool = False) -> quad.CasimirResult:
    res = quad.casimir_forces(cfg.system, cfg.quadrature)
    if cfg.output_format == "csv":
        out.write(CSV_HEADER + "\n")
        out.write(csv_row(cfg.system.total_gap, res) + "\n")
    else:
        out.write(render_result(cfg, res))
    if debug_n2:
        e2 = n2_path_energy(cfg)
        diff = abs(e2 - res.energy) / max(abs(res.energy), abs(e2), np.finfo(float).tiny)
        out.write(f"E via two-medium closed form: {fmt_num(e2)} J/m^2 (rel. diff {diff:.2e})\n")
    return res


def run_sweep(cfg: RunConfig, out: TextIO) -> List[str]:
    """One row per sweep value; failed rows keep their target and name the error."""
    if cfg.sweep is None:
        raise ValidationError("sweep task needs [task] target and values")
    idx = cfg.sweep.layer_index(cfg.system.n)
    rows = []
    for value in cfg.sweep.values:
        system = cfg.system.with_thickness(idx, value)
        try:
            rows.append(csv_row(value, quad.casimir_forces(system, cfg.quadrature)))
        except CasimirError as e:
            print(f"sweep value {value:g}: {type(e).__name__}: {e}", file=sys.stderr)
            rows.append(csv_row(value, error=e))
    if cfg.output_format == "csv":
        out.write(CSV_HEADER + "\n")
        out.writelines(r + "\n" for r in rows)
    else:
        out.write(_table(CSV_HEADER.split(","), [r.split(",") for r in rows]))
    return rows


def run_check(cfg: RunConfig, out: TextIO) -> List[checks.CheckResult]:
    results = checks.run_all(cfg.system, cfg.quadrature)
    for r in results:
        out.write(f"[{r.status.upper():4}] {r.name}: {r.detail}\n")
    failed = [r.name for r in results if r.status == "fail"]
    out.write("all checks passed\n" if not failed else f"FAILED: {', '.join(failed)}\n")
    return results


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layercasimir",
                                description="Casimir energy and forces across a layered medium (T = 0).")
    p.add_argument("command", choices=TASKS)
    p.add_argument("--config", required=True, help="TOML run configuration")
    p.add_argument("--out", help="output file (default: [task] output or stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format")
    p.add_argument("--rel-tol", type=float, help="override quadrature rel_tol")
    p.add_argument("--debug-n2-path", action="store_true",
                   help="also evaluate the energy from the closed two-medium form (n = 2 only)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.rel_tol is not None:
            try:
                cfg = replace(cfg, quadrature=replace(cfg.quadrature, rel_tol=args.rel_tol))
            except ValueError as e:
                raise ValidationError(f"--rel-tol: {e}") from None
        fmt = args.format or cfg.output_format or ("csv" if args.command == "sweep" else "table")
        cfg = replace(cfg, task=args.command, output_format=fmt)
        if args.command == "sweep" and cfg.sweep is None:
            raise ValidationError(f"{args.config}: task: sweep needs 'target' and 'values'")
    except (ParseError, ValidationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    path = args.out or cfg.output_path
    buf = io.StringIO()
    try:
        if args.command == "compute":
            run_compute(cfg, buf, debug_n2=args.debug_n2_path)
            code = EXIT_OK
        elif args.command == "sweep":
            run_sweep(cfg, buf)
            code = EXIT_OK
        else:
            results = run_check(cfg, buf)
            code = EXIT_CHECK_FAILED if any(r.status == "fail" for r in results) else EXIT_OK
    except ValidationError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as e:
        print(f"non-convergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DegenerateError as e:
        print(f"degenerate configuration: {e}", file=sys.stderr)
        return EXIT_DEGENERATE

    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())

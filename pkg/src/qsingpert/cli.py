"""Command-line front end.

Exit codes
----------
0  success; for ``check``: a commutation matrix exists AND the system is
   lossless bounded real AND minimal
1  ``check`` only: any other verdict (not realizable, marginal, non-minimal)
2  usage or input error (unknown flag, malformed or inconsistent file)
3  numerical failure (singular fast block, pole on the grid, ...)
"""
import argparse
import csv
import io
import sys

import numpy as np

from . import sysfile
from .adiabatic import SpecialClassParams, build_special, eliminate
from .catalog import ENTRY_NAMES, cavity_physical_system, get_entry
from .errors import NumericError, QSysError
from .linalg import DEFAULT_TOL, Tolerances
from .qsys import (
    FrequencyGrid, LBRVerdict, PhysicalRealization, QuantumLinearSystem, find_commutation_matrix,
    lossless_bounded_real_check, minimality_check, response_skipping_poles, unitarity_defect,
)
from .singular import PartitionedSystem, assemble_full, convergence_study, reduce_slow, slow_band_grid

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(QSysError, ValueError):
    pass


def _fmt(z):
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


def _fmt_matrix(a, indent="    "):
    a = np.atleast_2d(a)
    return "\n".join(indent + "[" + ", ".join(_fmt(z) for z in row) + "]" for row in a)


def _parse_grid(text, default):
    if text is None:
        return default
    try:
        lo, hi, count = text.split(",")
        return FrequencyGrid.log_band(float(lo), float(hi), int(count))
    except ValueError as exc:
        raise UsageError(f"--grid expects lo,hi,count: {exc}") from exc


def _parse_epsilons(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--epsilons expects a comma-separated list of numbers: {exc}") from exc


def _as_plain(loaded, epsilon, tol):
    obj = loaded.system
    if isinstance(obj, QuantumLinearSystem):
        return obj
    if isinstance(obj, SpecialClassParams):
        obj = build_special(obj, tol)
    return assemble_full(obj, epsilon)


def _as_partitioned(loaded, tol, command):
    obj = loaded.system
    if isinstance(obj, SpecialClassParams):
        return build_special(obj, tol)
    if isinstance(obj, PartitionedSystem):
        return obj
    raise UsageError(f"{command} needs a partitioned or special_class file, got {loaded.kind}")


def _emit(text, path, out):
    if path is None:
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_check(args, tol, out):
    system = _as_plain(sysfile.read(args.file), args.epsilon, tol)
    grid = _parse_grid(args.grid, FrequencyGrid.default())
    rep = find_commutation_matrix(system, tol)
    lbr = lossless_bounded_real_check(system, grid, tol)
    mini = minimality_check(system, tol)

    lines = [f"system: n={system.n}, m={system.m}", ""]
    lines.append(f"physical realizability: {'yes' if rep.realizable else 'no'} (method: {rep.method})")
    if rep.failure_reason:
        lines.append(f"  reason: {rep.failure_reason}")
    for key, value in rep.residuals.items():
        lines.append(f"  residual {key}: {value:.3e}")
    if rep.theta is not None:
        lines.append("  Theta:")
        lines.append(_fmt_matrix(rep.theta))
    if rep.witness is not None:
        lines.append("  Hamiltonian M:")
        lines.append(_fmt_matrix(rep.witness.M))
    lines.append("")
    lines.append(f"lossless bounded real: {lbr.verdict.value}")
    lines.append(f"  max Re eigenvalue: {lbr.max_real_eigenvalue:.6g}")
    lines.append(f"  max unitarity defect on {len(grid)}-point grid: {lbr.max_unitarity_defect:.3e}")
    if lbr.skipped_omegas:
        lines.append(f"  skipped (pole) frequencies: {', '.join(f'{w:g}' for w in lbr.skipped_omegas)}")
    lines.append(f"minimality: {mini.verdict.value}")
    if mini.uncontrollable_eigenvalues:
        lines.append(f"  uncontrollable eigenvalues: {', '.join(map(_fmt, mini.uncontrollable_eigenvalues))}")
    if mini.unobservable_eigenvalues:
        lines.append(f"  unobservable eigenvalues: {', '.join(map(_fmt, mini.unobservable_eigenvalues))}")
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        omegas = np.sort(rng.choice([-1.0, 1.0], 32) * 10.0 ** rng.uniform(-3, 3, 32))
        _, resp, _ = response_skipping_poles(system, FrequencyGrid(np.unique(omegas)), tol)
        spot = float(np.max(unitarity_defect(resp), initial=0.0))
        lines.append(f"random-frequency unitarity spot check (seed {args.seed}, 32 points): {spot:.3e}")

    ok = rep.realizable and lbr.verdict is LBRVerdict.LOSSLESS_BR and mini.minimal
    lines.append("")
    lines.append(f"verdict: {'PASS' if ok else 'FAIL'}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reduce(args, tol, out):
    part = _as_partitioned(sysfile.read(args.file), tol, "reduce")
    _emit(sysfile.dumps(reduce_slow(part, tol)), args.output, out)
    return EXIT_OK


def cmd_eliminate(args, tol, out):
    loaded = sysfile.read(args.file)
    if not isinstance(loaded.system, SpecialClassParams):
        raise UsageError(f"eliminate needs a special_class file, got {loaded.kind}")
    res = eliminate(loaded.system, tol)
    realization = PhysicalRealization(np.eye(res.reduced.n), res.S_t, res.Lambda_t, res.M_t)
    _emit(sysfile.dumps(res.reduced, realization), args.output, out)
    return EXIT_OK


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def cmd_sweep(args, tol, out):
    part = _as_partitioned(sysfile.read(args.file), tol, "sweep")
    grid = _parse_grid(args.grid, slow_band_grid())
    rep = convergence_study(part, _parse_epsilons(args.epsilons), grid, tol)
    rows = [["epsilon", "sup_error", "unitarity_defect"]]
    for e, err, d in zip(rep.epsilons, rep.sup_errors, rep.unitarity_defects):
        rows.append([repr(e), repr(err), repr(d)])
    rows.append(["fitted_slope", "not_applicable" if rep.fitted_slope is None else repr(rep.fitted_slope)])
    rows.append(["first_order_coefficient_norm", repr(rep.first_order_coefficient_norm)])
    _emit(_csv_text(rows), args.output, out)
    return EXIT_OK


def cmd_tf(args, tol, out):
    system = _as_plain(sysfile.read(args.file), args.epsilon, tol)
    grid = _parse_grid(args.grid, FrequencyGrid.default())
    omegas, resp, _ = response_skipping_poles(system, grid, tol)
    m = system.m
    header = ["omega"]
    for i in range(m):
        for j in range(m):
            header += [f"re_phi_{i + 1}_{j + 1}", f"im_phi_{i + 1}_{j + 1}"]
    header.append("unitarity_defect")
    rows = [header]
    for w, phi in zip(omegas, resp):
        row = [repr(float(w))]
        for z in phi.ravel():
            row += [repr(float(z.real)), repr(float(z.imag))]
        row.append(repr(float(unitarity_defect(phi))))
        rows.append(row)
    _emit(_csv_text(rows), args.output, out)
    return EXIT_OK


def cmd_catalog(args, tol, out):
    if args.name is None:
        for name in ENTRY_NAMES:
            entry = get_entry(name)
            out.write(f"{name}: {entry.description}\n")
        return EXIT_OK
    try:
        entry = get_entry(args.name, args.K1, args.K2)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    form = args.form
    if form == "partitioned":
        obj = entry.partitioned
    elif form == "special":
        if not entry.special_variants:
            raise UsageError(f"entry {entry.name} has no special-class form")
        obj = entry.special_variants[args.variant]
    elif form == "full":
        obj = assemble_full(entry.partitioned, args.epsilon)
    elif form == "physical":
        if "K1" not in entry.parameters:
            raise UsageError(f"entry {entry.name} has no physical form")
        obj = cavity_physical_system(entry.parameters["K1"], entry.parameters["K2"], 1.0 / args.epsilon)
    else:  # reduced
        obj = entry.expected.reduced
    _emit(sysfile.dumps(obj), args.output, out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help=f"residual tolerance (default {DEFAULT_TOL.residual_tol:g})")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized diagnostics")

    parser = argparse.ArgumentParser(
        prog="qsingpert", parents=[common],
        description="Realizability checks and singular-perturbation reduction for passive linear quantum systems.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("check", parents=[common], help="realizability, lossless-bounded-real and minimality report")
    p.add_argument("file")
    p.add_argument("--epsilon", type=float, default=1.0, help="epsilon for partitioned/special files")
    p.add_argument("--grid", help="frequency grid lo,hi,count (mirrored, plus 0)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", parents=[common], help="slow subsystem of a partitioned/special file")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("eliminate", parents=[common], help="adiabatic elimination of a special_class file")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("sweep", parents=[common], help="convergence of the full to the slow transfer function")
    p.add_argument("file")
    p.add_argument("--epsilons", required=True, help="comma-separated epsilons")
    p.add_argument("--grid", help="frequency grid lo,hi,count (default 1e-3,1,200)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tf", parents=[common], help="frequency response as CSV")
    p.add_argument("file")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--grid", help="frequency grid lo,hi,count (default 1e-3,1e3,200)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tf)

    p = sub.add_parser("catalog", parents=[common], help="list or export built-in systems")
    p.add_argument("name", nargs="?")
    p.add_argument("--form", choices=("partitioned", "special", "full", "physical", "reduced"),
                   default="partitioned")
    p.add_argument("--variant", choices=("stated", "displayed"), default="displayed",
                   help="M12 sign convention for --form special")
    p.add_argument("--epsilon", type=float, default=1.0, help="epsilon for --form full/physical")
    p.add_argument("--K1", type=float)
    p.add_argument("--K2", type=float)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_catalog)
    return parser


def run(argv=None, out=None, err=None):
    """Run the CLI and return its exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args.seed = getattr(args, "seed", None)
    try:
        tol = Tolerances(residual_tol=args.tol) if hasattr(args, "tol") else DEFAULT_TOL
        return args.func(args, tol, out)
    except NumericError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except (QSysError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main():
    sys.exit(run())

"""Acceptance criteria, each at its stated tolerance.

A summary line per criterion is printed at the end of the run.
"""
import csv
import io

import numpy as np
import pytest

from qsingpert import sysfile
from qsingpert.adiabatic import build_special, eliminate, special_unscaled
from qsingpert.catalog import ENTRY_NAMES, cavity_example, cavity_physical_system, get_entry, pathological_example
from qsingpert.cli import run
from qsingpert.linalg import DEFAULT_TOL, dag, eig, norm
from qsingpert.qsys import (
    FrequencyGrid, LBRVerdict, MinimalityVerdict, find_commutation_matrix, frequency_response,
    lossless_bounded_real_check, minimality_check, realizability_residuals, realize_from_physical,
    recover_physical,
)
from qsingpert.sampling import random_physical_realization, random_realizable_partitioned, random_special_params
from qsingpert.singular import assemble_full, convergence_study, reduce_slow

EPSILONS_1 = (1.0, 0.1, 0.01, 0.001)
DEFAULT_GRID = FrequencyGrid.default()


def _check_all(record, label, failures):
    passed = not failures
    record(label, passed, "; ".join(failures[:3]))
    assert passed, failures


def test_criterion_1a_pathological_example(record_criterion):
    entry = pathological_example()
    fails = []
    for eps in EPSILONS_1:
        sys = assemble_full(entry.partitioned, eps)
        lam = eig(sys.F)
        if not np.max(lam.real) < -1e-9:
            fails.append(f"eps={eps}: not Hurwitz")
        coeffs = np.poly(sys.F)
        want = entry.expected.char_poly(eps)
        rel = np.max(np.abs(coeffs - want) / np.abs(want))
        if rel > 1e-9:
            fails.append(f"eps={eps}: char poly rel error {rel:.2e}")
        theta = entry.expected.certified_theta(eps)
        res = realizability_residuals(sys, theta)
        if max(res["lyapunov"], res["coupling"]) > 1e-10:
            fails.append(f"eps={eps}: diag(I, I/(2 eps)) residuals {res['lyapunov']:.1e}/{res['coupling']:.1e}")
        report = find_commutation_matrix(sys)
        if not report.realizable or norm(report.theta - theta) > 1e-9 * (1 + 1 / eps):
            fails.append(f"eps={eps}: searched Theta is not diag(I, I/(2 eps))")
        if not minimality_check(sys).minimal:
            fails.append(f"eps={eps}: full system not minimal")

    red = reduce_slow(entry.partitioned)
    for got, want in zip(red.matrices(), entry.expected.reduced.matrices()):
        if np.max(np.abs(got - want)) > 1e-12:
            fails.append("reduced quadruple differs")
    lam = sorted(eig(red.F), key=lambda z: z.imag)
    if np.max(np.abs(np.array(lam) - np.array([-1j, 1j]))) > 1e-12:
        fails.append(f"reduced eigenvalues {lam}")
    if lossless_bounded_real_check(red).verdict is not LBRVerdict.MARGINAL:
        fails.append("reduced verdict not marginal")
    if minimality_check(red).minimal:
        fails.append("reduced system reported minimal")
    _check_all(record_criterion, "1a  pathological example: Hurwitz, char poly, witness, minimality, reduction", fails)


def test_criterion_1b_published_theta(record_criterion):
    """The printed commutation matrix diag(I, I/eps) checked against both equations."""
    entry = pathological_example()
    fails = []
    for eps in EPSILONS_1:
        res = realizability_residuals(assemble_full(entry.partitioned, eps), entry.expected.theta(eps))
        if max(res["lyapunov"], res["coupling"]) > 1e-10:
            fails.append(f"eps={eps}: lyapunov {res['lyapunov']:.3g}, coupling {res['coupling']:.3g}")
    _check_all(record_criterion, "1b  pathological example: published Theta = diag(I, I/eps) residuals <= 1e-10", fails)


def test_criterion_2_two_cavity(record_criterion):
    fails = []
    entry = cavity_example(4.0, 1.0)
    red = reduce_slow(entry.partitioned)
    for got, want in zip(red.matrices(), ([[-0.5]], [[1.0]], [[1.0]], [[-1.0]])):
        if np.max(np.abs(got - np.array(want))) > 1e-12:
            fails.append("reduced quadruple differs from (-1/2, 1, 1, -1)")
    report = find_commutation_matrix(red)
    if not report.realizable or abs(report.theta[0, 0] - 1) > 1e-9:
        fails.append("reduced system not realizable with Theta = 1")
    result = eliminate(entry.special)
    if abs(result.S_t[0, 0] + 1) > 1e-12:
        fails.append(f"S_t = {result.S_t[0, 0]}")
    if abs(result.M_t[0, 0]) > 1e-10:
        fails.append(f"M_t = {result.M_t[0, 0]}")
    if abs(abs(result.Lambda_t[0, 0]) - 1) > 1e-12:
        fails.append(f"|Lambda_t| = {abs(result.Lambda_t[0, 0])}")
    diff = frequency_response(red, DEFAULT_GRID) - frequency_response(result.reduced, DEFAULT_GRID)
    if np.max(np.abs(diff)) > 1e-9:
        fails.append("slow and eliminated transfer functions differ")

    degenerate = reduce_slow(cavity_example(1.0, 1.0).partitioned)
    if degenerate.F[0, 0] != 0:
        fails.append(f"degenerate F0 = {degenerate.F[0, 0]}")
    if minimality_check(degenerate).verdict is not MinimalityVerdict.BOTH:
        fails.append("degenerate reduction not reported uncontrollable and unobservable")
    _check_all(record_criterion, "2   two-cavity reduction, elimination and degenerate case", fails)


def _catalog_systems():
    for name in ENTRY_NAMES:
        entry = get_entry(name)
        for eps in EPSILONS_1:
            yield f"{name} full eps={eps}", assemble_full(entry.partitioned, eps)
            if "K1" in entry.parameters:
                yield (f"{name} physical eps={eps}",
                       cavity_physical_system(entry.parameters["K1"], entry.parameters["K2"], 1 / eps))
        yield f"{name} reduced", entry.expected.reduced
        if entry.special is not None:
            yield f"{name} eliminated", eliminate(entry.special).reduced


def test_criterion_3_catalog_unitarity(record_criterion):
    fails, checked = [], 0
    for label, sys in _catalog_systems():
        if not find_commutation_matrix(sys).realizable:
            continue
        checked += 1
        defect = lossless_bounded_real_check(sys, DEFAULT_GRID).max_unitarity_defect
        if defect > 1e-8 * sys.m:
            fails.append(f"{label}: defect {defect:.2e}")
    if checked == 0:
        fails.append("no realizable systems found")
    _check_all(record_criterion, f"3   unitarity on the default grid for {checked} realizable catalog systems", fails)


def test_criterion_4_convergence(record_criterion):
    rep = convergence_study(cavity_example(4.0, 1.0).partitioned, (1e-1, 1e-2, 1e-3, 1e-4))
    fails = []
    if rep.fitted_slope is None or not 0.85 <= rep.fitted_slope <= 1.15:
        fails.append(f"slope {rep.fitted_slope}")
    if not rep.first_order_coefficient_norm > 1e-6:
        fails.append(f"first-order coefficient {rep.first_order_coefficient_norm:.2e}")
    record_criterion("4   two-cavity convergence slope in [0.85, 1.15]", not fails,
                     f"slope {rep.fitted_slope:.4f}, first-order norm {rep.first_order_coefficient_norm:.4g}")
    assert not fails, fails


def test_criterion_5_realizability_round_trip(record_criterion):
    rng = np.random.default_rng(5)
    tol = DEFAULT_TOL.residual_tol
    fails = []
    for k in range(200):
        p = random_physical_realization(rng, n=int(rng.integers(1, 7)), m=int(rng.integers(1, 4)))
        sys = realize_from_physical(p)
        report = find_commutation_matrix(sys)
        F, G, H, K = sys.matrices()
        res = report.residuals
        if not report.realizable:
            fails.append(f"#{k}: {report.failure_reason}")
            continue
        if (res["lyapunov"] > tol * (1 + norm(G @ dag(G))) or res["coupling"] > tol * (1 + norm(G))
                or res["unitary_K"] > tol * sys.m):
            fails.append(f"#{k}: residuals {res}")
        M = recover_physical(sys, p.Theta).M
        if norm(M - p.M) > 1e-9 * (1 + norm(p.M)):
            fails.append(f"#{k}: M error {norm(M - p.M):.2e}")
    _check_all(record_criterion, "5   200 random realizations: witness found, M recovered", fails)


def test_criterion_6_special_class(record_criterion):
    rng = np.random.default_rng(6)
    fails = []
    for k in range(200):
        params = random_special_params(rng)
        for eps in (1.0, 0.1):
            report = find_commutation_matrix(special_unscaled(params, eps))
            if not report.realizable or norm(report.theta - np.eye(params.n1 + params.n2)) > 1e-9:
                fails.append(f"#{k} eps={eps}: family not realizable with Theta = I")
        result = eliminate(params)
        if not find_commutation_matrix(result.reduced).realizable:
            fails.append(f"#{k}: eliminated system not realizable")
        if norm(dag(result.S_t) @ result.S_t - np.eye(params.m)) > 1e-9:
            fails.append(f"#{k}: S_t not unitary")
        if result.hamiltonian_asymmetry > 1e-9:
            fails.append(f"#{k}: M_t asymmetry {result.hamiltonian_asymmetry:.2e}")
        slow = reduce_slow(build_special(params))
        for a, b in zip(slow.matrices(), result.reduced.matrices()):
            if np.max(np.abs(a - b)) > 1e-9:
                fails.append(f"#{k}: slow reduction and elimination differ by {np.max(np.abs(a - b)):.2e}")
    _check_all(record_criterion, "6   200 random special-class instances: realizability and elimination", fails)


def test_criterion_7_sampled_stability(record_criterion):
    rng = np.random.default_rng(7)
    fails = []
    for k in range(100):
        part, _ = random_realizable_partitioned(rng)
        eps_samples = 10.0 ** rng.uniform(-3, 0, 3)
        if not all(find_commutation_matrix(assemble_full(part, e)).realizable for e in eps_samples):
            fails.append(f"#{k}: family not realizable at sampled eps")
            continue
        red = reduce_slow(part)
        max_re = float(np.max(eig(red.F).real))
        if max_re > 1e-9:
            fails.append(f"#{k}: max Re eig(F0) = {max_re:.2e}")
        defect = lossless_bounded_real_check(red, DEFAULT_GRID).max_unitarity_defect
        if defect > 1e-8 * red.m:
            fails.append(f"#{k}: reduced unitarity defect {defect:.2e}")
    _check_all(record_criterion, "7   100 random realizable families: slow subsystem stable and unitary", fails)


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return run(list(argv), out, err), out.getvalue()


def test_criterion_8_cli(record_criterion, tmp_path):
    fails = []
    forms = ("partitioned", "full", "reduced", "special", "physical")
    for name in ENTRY_NAMES:
        for form in forms:
            code, text = _cli("catalog", name, "--form", form, "--epsilon", "0.01")
            if code == 2 and name == "pathological" and form in ("special", "physical"):
                continue
            path = tmp_path / f"{name}-{form}.json"
            path.write_text(text)
            loaded = sysfile.read(path)
            if code != 0 or sysfile.dumps(loaded.system) != text:
                fails.append(f"{name}/{form}: export round trip")

    path_full, path_part, path_red = (str(tmp_path / f) for f in ("pf.json", "pp.json", "pr.json"))
    _cli("catalog", "pathological", "--form", "full", "-o", path_full)
    _cli("catalog", "pathological", "-o", path_part)
    expected_codes = {
        "check realizable, lossless, minimal": (("check", path_full), 0),
        "reduce": (("reduce", path_part, "-o", path_red), 0),
        "check marginal reduced": (("check", path_red), 1),
        "unknown subcommand": (("bogus",), 2),
        "missing file": (("check", str(tmp_path / "none.json")), 2),
    }
    bad = tmp_path / "singular.json"
    blocks = cavity_example().partitioned.blocks()
    blocks["F22"] = np.zeros((1, 1))
    from qsingpert.singular import PartitionedSystem
    sysfile.write(bad, PartitionedSystem(**blocks))
    expected_codes["singular fast block"] = (("reduce", str(bad)), 3)
    for label, (argv, want) in expected_codes.items():
        code, _ = _cli(*argv)
        if code != want:
            fails.append(f"{label}: exit {code}, expected {want}")

    cav = str(tmp_path / "cavity.json")
    _cli("catalog", "cavity", "-o", cav)
    code, text = _cli("sweep", cav, "--epsilons", "1e-1,1e-2,1e-3,1e-4")
    rows = {r[0]: r[1:] for r in csv.reader(io.StringIO(text))}
    direct = convergence_study(cavity_example().partitioned, (1e-1, 1e-2, 1e-3, 1e-4)).fitted_slope
    slope = float(rows["fitted_slope"][0])
    if code != 0 or abs(slope - direct) > 1e-12 or not 0.85 <= slope <= 1.15:
        fails.append(f"sweep slope {slope} vs {direct}")
    _check_all(record_criterion, "8   CLI exit codes, export round trips, file-driven sweep slope", fails)

"""Acceptance suite.

Each test prints one "[criterion NN] name: PASS/FAIL" line (run pytest
with -s to see them) and asserts the same condition. Experiment-level
criteria drive the CLI entry point on the shipped default configs and
read back the emitted artifacts; everything else calls the library
directly against independent oracles.
"""

import csv
import math
import os
import time

import numpy as np
import pytest

from krylov_lab import (
    EnsembleSpec,
    TimeGrid,
    amplitudes,
    build_basis,
    chain_ode_integrate,
    compute_timescales,
    dyson_term_norm,
    evolve,
    lanczos_coefficients,
    project_hamiltonian,
    sample_gue,
    spectral_norm,
    uniform_eigenstate_superposition,
    verify_theorem1,
)
from krylov_lab.cli import main as cli_main

from conftest import random_hermitian, random_state


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def run_cli(args):
    """Run the CLI in-process, timing only the experiment itself."""
    old = os.environ.pop("KRYLOV_LAB_THREADS", None)
    try:
        start = time.perf_counter()
        rc = cli_main(list(args))
        elapsed = time.perf_counter() - start
    finally:
        if old is not None:
            os.environ["KRYLOV_LAB_THREADS"] = old
    assert rc == 0, f"cli exited with {rc}"
    return elapsed


def read_trace(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data


@pytest.fixture(scope="module")
def theorem_run():
    start = time.perf_counter()
    rep = verify_theorem1(trials=100, dim=3, seed=0, tau_points=20)
    return rep, time.perf_counter() - start


@pytest.fixture(scope="module")
def fig1_dirs(tmp_path_factory):
    """Two identical fig1 runs; the first is timed."""
    root = tmp_path_factory.mktemp("fig1")
    dirs = []
    elapsed = None
    for tag in ("a", "b"):
        out = root / tag
        cfg = root / f"{tag}.cfg"
        cfg.write_text(f"experiment = fig1_small\noutput_dir = {out}\n")
        took = run_cli(["run", str(cfg)])
        if elapsed is None:
            elapsed = took
        dirs.append(out)
    return dirs[0], dirs[1], elapsed


@pytest.fixture(scope="module")
def fig2_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("fig2")
    out = root / "out"
    cfg = root / "fig2.cfg"
    cfg.write_text(f"experiment = fig2_gue\noutput_dir = {out}\n")
    elapsed = run_cli(["run", str(cfg)])
    return out, elapsed


def test_criterion_01_theorem_sweep(theorem_run):
    rep, elapsed = theorem_run
    ok = (rep.violations == 0 and rep.min_margin > 1e-10 and elapsed < 10.0
          and len(rep.records) == 100 * 20)
    report(1, "non-optimality sweep (100 trials, dim 3)", ok,
           f"violations={rep.violations} min_margin={rep.min_margin:.3e} "
           f"elapsed={elapsed:.2f}s")


def test_criterion_02_proof_step_identities(theorem_run):
    rep, _ = theorem_run
    ok = (rep.max_kappa2_infinite <= 1e-10
          and rep.max_transfer_residual <= 1e-9
          and rep.max_kappa0_mismatch <= 1e-12)
    report(2, "proof-step identities", ok,
           f"kappa2={rep.max_kappa2_infinite:.3e} "
           f"transfer={rep.max_transfer_residual:.3e} "
           f"kappa0={rep.max_kappa0_mismatch:.3e}")


def test_criterion_03_taylor_laws():
    worst = 0.0
    for s in range(20):
        H = random_hermitian(5, seed=300 + s)
        psi = random_state(5, seed=400 + s)
        basis = build_basis(H, 1, None, psi)
        _, b = lanczos_coefficients(basis)
        t = 1e-3 / spectral_norm(H)
        kappa = basis.vectors.conj().T @ evolve(H, psi, t)
        r1 = abs(kappa[1] - (-1j * b[0] * t)) / abs(b[0] * t)
        r2 = abs(kappa[2] - (-(b[0] * b[1] / 2.0) * t ** 2)) / abs(b[0] * b[1] / 2.0 * t ** 2)
        worst = max(worst, r1, r2)
    ok = worst <= 0.01
    report(3, "short-time amplitude laws", ok, f"worst relative error {worst:.3e}")


def test_criterion_04_chain_ode_matches_spectral_route():
    worst = 0.0
    dims = (3, 4, 5, 3, 4, 5, 6, 4, 5, 10)
    for s, dim in enumerate(dims):
        H = random_hermitian(dim, seed=500 + s)
        psi = random_state(dim, seed=600 + s)
        basis = build_basis(H, 1, None, psi)
        a, b = lanczos_coefficients(basis)
        tau_H = compute_timescales(H, basis.grade).tau_H
        grid = TimeGrid(start=0.0, stop=2.0 * tau_H, points=400)
        ode = chain_ode_integrate(a, b, grid)
        spec = amplitudes(basis, H, psi, grid)
        worst = max(worst, float(np.max(np.abs(ode.complexity - spec.complexity))))
    ok = worst <= 1e-6
    report(4, "chain ODE vs spectral overlap", ok, f"worst |dC| {worst:.3e}")


def test_criterion_05_two_level_analytic_oracle(pauli_x):
    psi = np.array([1.0, 0.0], dtype=complex)
    basis = build_basis(pauli_x, 1, None, psi)
    grid = TimeGrid(start=0.0, stop=2.0 * math.pi, points=629)
    trace = amplitudes(basis, pauli_x, psi, grid)
    dev = float(np.max(np.abs(trace.complexity - np.sin(grid.times()) ** 2)))
    ok = dev <= 1e-9
    report(5, "two-level sin^2 oracle", ok, f"max deviation {dev:.3e}")


def test_criterion_06_trace_rows_sum_to_one(fig1_dirs, fig2_dir):
    worst = 0.0
    for directory in (fig1_dirs[0], fig2_dir[0]):
        for path in sorted(directory.glob("trace_*.csv")):
            header, data = read_trace(path)
            k_cols = [i for i, h in enumerate(header) if h.endswith("_sq")]
            worst = max(worst, float(np.max(np.abs(data[:, k_cols].sum(axis=1) - 1.0))))
    ok = worst <= 1e-9
    report(6, "amplitude rows sum to 1", ok, f"worst deviation {worst:.3e}")


def test_criterion_07_order1_projection_tridiagonal():
    worst = 0.0
    for dim in (3, 10, 50):
        H = sample_gue(EnsembleSpec(dim=dim, seed=0))
        psi = uniform_eigenstate_superposition(H)
        basis = build_basis(H, 1, None, psi)
        M = project_hamiltonian(basis, H).entries
        i, j = np.indices(M.shape)
        off = np.abs(M[np.abs(i - j) > 1])
        if off.size:
            worst = max(worst, float(np.max(off)) / spectral_norm(H))
    ok = worst <= 1e-8
    report(7, "order-1 projection tridiagonal", ok, f"worst relative entry {worst:.3e}")


def test_criterion_08_unitary_step_amplitudes_vanish():
    H = sample_gue(EnsembleSpec(dim=10, seed=0))
    psi = uniform_eigenstate_superposition(H)
    dt = compute_timescales(H, 10).dt_scr
    basis = build_basis(H, math.inf, dt, psi)
    worst = 0.0
    for k in range(basis.grade):
        kappa = basis.vectors.conj().T @ evolve(H, psi, k * dt)
        if k + 1 < basis.grade:
            worst = max(worst, float(np.max(np.abs(kappa[k + 1:]))))
    ok = worst <= 1e-10
    report(8, "unitary-step amplitude vanishing", ok, f"worst |kappa_n| {worst:.3e}")


def test_criterion_09_small_system_reduction_shape(fig1_dirs):
    out, _, elapsed = fig1_dirs
    dips, returns = [], []
    maxabs = {}
    for token in ("p2", "p3", "pinf"):
        _, data = read_trace(out / f"trace_{token}_dt2.csv")
        dc = data[:, 3]
        maxabs[token] = float(np.max(np.abs(dc)))
        neg = np.flatnonzero(dc < -1e-3)
        dips.append(bool(neg.size >= 5 and abs(dc[0]) <= 1e-9 and neg[0] > 0))
        i_min = int(np.argmin(dc))
        returns.append(bool(np.any(dc[i_min:] > 1e-3)))
    ok = (all(dips)
          and all(0.05 <= v <= 0.6 for v in maxabs.values())
          and any(returns)
          and elapsed < 5.0)
    report(9, "small-system reduction shape", ok,
           f"maxabs={maxabs} dips={dips} returns={returns} elapsed={elapsed:.2f}s")


def test_criterion_10_gue_early_reduction_late_convergence(fig2_dir):
    out, elapsed = fig2_dir
    early_ok = []
    late_means = []
    for tok in ("0.2", "1", "1.5"):
        for p in ("p1", "p2", "p3", "pinf"):
            _, data = read_trace(out / f"trace_{p}_dt{tok}.csv")
            x, c, dc = data[:, 1], data[:, 2], data[:, 3]
            if p != "p1":
                early = (x > 0) & (x <= 0.6)
                early_ok.append(float(np.mean(dc[early])) < 0.0)
            late = (x >= 1.5) & (x <= 3.0)
            late_means.append(float(np.mean(c[late])))
    spread = (max(late_means) - min(late_means)) / float(np.mean(late_means))
    ok = all(early_ok) and spread <= 0.05 and elapsed < 120.0
    report(10, "GUE early reduction and late convergence", ok,
           f"early_ok={early_ok} late_spread={spread:.4f} elapsed={elapsed:.1f}s")


def test_criterion_11_bandwidth_grows_with_step(fig2_dir):
    out, _ = fig2_dir
    monotone = True
    means = {}
    for p in ("p2", "p3", "pinf"):
        per_alpha = []
        for tok in ("0.2", "1", "1.5"):
            with open(out / f"hessian_{p}_dt{tok}.csv", newline="") as fh:
                rows = list(csv.reader(fh))
            mags = np.array([[float(v) for v in row] for row in rows[1:]])
            i, j = np.nonzero(mags > 1e-6)
            per_alpha.append(float(np.mean(np.abs(i - j))))
        means[p] = per_alpha
        monotone = monotone and per_alpha[0] <= per_alpha[1] <= per_alpha[2]
    report(11, "band width nondecreasing in step", monotone, f"means={means}")


def test_criterion_12_scrambling_condition_identity():
    worst = 0.0
    for s, dim in enumerate((3, 4, 5, 6, 7, 8, 9, 10, 11, 12)):
        H = random_hermitian(dim, seed=700 + s)
        psi = random_state(dim, seed=800 + s)
        m = build_basis(H, 1, None, psi).grade
        tau_scr = compute_timescales(H, m).tau_scr
        lo = dyson_term_norm(H, tau_scr, m - 1)
        hi = dyson_term_norm(H, tau_scr, m)
        worst = max(worst, abs(hi - lo) / lo)
    ok = worst <= 1e-9
    report(12, "equal Dyson terms at the scrambling time", ok,
           f"worst relative gap {worst:.3e}")


def test_criterion_13_reruns_bit_identical(fig1_dirs):
    d1, d2, _ = fig1_dirs
    names = sorted(p.name for p in d1.glob("*.csv"))
    ok = bool(names) and sorted(p.name for p in d2.glob("*.csv")) == names
    mismatched = []
    for name in names:
        if (d1 / name).read_bytes() != (d2 / name).read_bytes():
            mismatched.append(name)
            ok = False
    report(13, "bit-identical reruns", ok, f"mismatched={mismatched}")

"""One test per acceptance criterion, at the stated sample sizes and tolerances.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from daghilb import dagcat, l2equiv, monoidal, ortho, scalars, unidecomp
from daghilb.linalg import Morphism
from daghilb.scalars import FieldTag
from daghilb.tolerances import DEFAULT_TOL

FIELDS = (FieldTag.R, FieldTag.C, FieldTag.H)
SEED = 20240601


def _record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def test_scalar_ring_laws():
    start = time.perf_counter()
    reps = [scalars.check_scalar_laws(f, samples=10_000, seed=SEED, tol=1e-12) for f in FIELDS]
    elapsed = time.perf_counter() - start
    worst = max(r.worst_residual for r in reps)
    ok = all(r.passed for r in reps) and worst <= 1e-12 and elapsed < 5.0
    _record("division ring laws", ok, f"1e4 samples/law x 3 fields, worst {worst:.2e}, {elapsed:.2f} s")
    assert ok, [r.failures for r in reps]


def test_biproduct_addition():
    reps = [dagcat.check_biproduct_addition(f, 1000, SEED, max_dim=16) for f in FIELDS]
    worst = max(r.worst_residual for r in reps)
    ok = all(r.passed for r in reps) and worst <= 1e-14
    _record("biproduct addition", ok, f"1e3 pairs/field, dims <= 16, worst {worst:.2e}")
    assert ok


def test_equalizer_kernel_factorization():
    reps = []
    for f in FIELDS:
        reps += [
            dagcat.check_equalizers(f, 1000, SEED),
            dagcat.check_kernels(f, 1000, SEED),
            dagcat.check_factorization(f, 1000, SEED),
        ]
    worst = max(r.worst_residual for r in reps)
    ratios = []
    for f in FIELDS:
        ker, ratio = dagcat.additive_inverse_witness(f)
        ratios.append(((ratio + scalars.Scalar.one(f)).norm(), ker.cols))
    ratio_err = max(r for r, _ in ratios)
    ok = all(r.passed for r in reps) and worst <= 1e-8 and ratio_err <= 1e-12 and all(c == 1 for _, c in ratios)
    _record(
        "equalizer/kernel/factorization", ok,
        f"1e3 instances each, worst {worst:.2e}; codiagonal kernel 1-dim, ratio off -1 by {ratio_err:.1e}",
    )
    assert ok


def test_ortholattice_and_orthomodularity():
    dims = list(range(0, 9))
    lat = [ortho.check_ortholattice(f, dims, 1000, SEED, DEFAULT_TOL) for f in FIELDS]
    om = [ortho.check_orthomodular_battery(f, dims, 1000, SEED, DEFAULT_TOL) for f in FIELDS]
    w_lat = max(r.worst_residual for r in lat)
    w_om = max(r.worst_residual for r in om)
    ok = all(r.passed for r in lat + om) and w_lat <= 1e-8 and w_om <= 1e-10
    _record("ortholattice + orthomodularity", ok, f"1e3/field, dims <= 8, lattice worst {w_lat:.2e}, orthomodular worst {w_om:.2e}")
    assert ok


def test_phi_matches_projector_oracle():
    reps = [ortho.check_phi(f, list(range(0, 9)), 1000, SEED) for f in FIELDS]
    disagreements = sum(r.failed for r in reps)
    ok = disagreements == 0
    _record("subobject / closed subspace correspondence", ok, f"1e3 pairs/field, {disagreements} disagreements")
    assert ok


def test_equivalence_suite():
    dims = list(range(0, 9))
    lines = []
    ok = True
    for f in FIELDS:
        # every fifth faithfulness trial is an equal control pair, so 125 trials give 100 unequal pairs
        faith = l2equiv.check_faithful(f, dims, 125, SEED)
        eso = l2equiv.check_essentially_surjective(f, dims, 100, SEED)
        full = l2equiv.check_full(f, dims, 200, SEED)
        ok &= faith.passed and eso.passed and eso.worst_residual <= 1e-8
        ok &= full.passed and full.worst_residual <= 1e-8
        lines.append(f"{f.value}: eso {eso.worst_residual:.1e}, full {full.worst_residual:.1e}")
    _record("equivalence (faithful 100, eso 100, full 200 per field)", ok, "; ".join(lines))
    assert ok


def test_unitary_decomposition():
    start = time.perf_counter()
    dims = list(range(2, 13))
    reps = [unidecomp.check_decomposition(f, dims, 200, SEED) for f in FIELDS]
    elapsed = time.perf_counter() - start

    t = Morphism.from_scalars("C", [[0.3]])
    dec = unidecomp.decompose(t)
    got = sorted((c.to_number() * u.entry(0, 0).to_number() for c, u in dec.terms), key=lambda z: z.imag)
    want = [0.3 * (0.5 - 1j * np.sqrt(0.75)), 0.3 * (0.5 + 1j * np.sqrt(0.75))]
    example_ok = len(got) == 2 and max(abs(a - b) for a, b in zip(got, want)) <= 1e-12

    ok = all(r.passed for r in reps) and elapsed < 60.0 and example_ok
    worst = max(r.worst_residual for r in reps)
    _record(
        "unitary decomposition", ok,
        f"200/field, dims 2-12 (even for R, H), worst {worst:.2e}, {elapsed:.1f} s, 0.3 example {'ok' if example_ok else 'WRONG'}",
    )
    assert ok, [r.failures for r in reps]


def test_promoted_quaternionic_form():
    rep = scalars.check_promoted_form(trials=1000, seed=SEED, tol=1e-12)
    ok = rep.passed and rep.worst_residual <= 1e-12
    _record("promoted quaternionic inner product", ok, f"1e3 samples, worst {rep.worst_residual:.2e}")
    assert ok


def test_scalar_multiplication_and_obstruction():
    reps = [monoidal.check_bullet_equals_circ(1000, SEED, f, 8) for f in (FieldTag.R, FieldTag.C)]
    worst = max(r.worst_residual for r in reps)
    obs = monoidal.quaternionic_obstruction()
    ok = all(r.passed for r in reps) and worst <= 1e-14 and obs.passed
    _record("tensor scalar action = composition; H obstruction", ok, f"1e3 R/C instances, worst {worst:.2e}; ij != ji shown")
    assert ok


@pytest.mark.parametrize("n", [2])
def test_cli_reports_are_byte_identical(tmp_path, n):
    args = ["audit", "--field", "all", "--dims", "1,2,3", "--trials", "5", "--seed", "3", "--json-only"]
    outs = []
    for k in range(n):
        path = tmp_path / f"run{k}.json"
        proc = subprocess.run([sys.executable, "-m", "daghilb", *args, "--out", str(path)], capture_output=True)
        assert proc.returncode == 0, proc.stderr.decode()
        outs.append(path.read_bytes())
    ok = all(o == outs[0] for o in outs)
    _record("CLI determinism", ok, f"{n} separate processes, {len(outs[0])} bytes each, identical: {ok}")
    assert ok

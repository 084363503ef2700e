"""Acceptance criteria 1-12, one test each, at their stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line before asserting. Run with
``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import math
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from spongedim import fixtures
from spongedim.cubes import count_cubes, cube_measure, density_diagnostic, empirical_box_dimension
from spongedim.dimensions import (
    PERES_GRID,
    HausClass,
    VerdictA,
    VerdictC,
    box_dimension,
    coincidence_report,
    fiber_profile,
    hausdorff_dimension_sponge,
    infinite_hausdorff_classifier,
    log_integral,
    mme_equals_full_dim,
    weighted_pressure,
)
from spongedim.measures import full_dim_marginal, maximal_entropy_measure, pushforward
from spongedim.verify import identities, s2_equivalence

F = Fraction
LOG2 = math.log(2)

_write = print


@pytest.fixture(autouse=True)
def _terminal(request):
    # write through the reporter so the lines show without -s
    global _write
    rep = request.config.pluginmanager.getplugin("terminalreporter")
    _write = rep.write_line if rep is not None else print


def verdict(n: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    _write(line)
    assert ok, line


def test_criterion_01_d3_dimensions():
    t0 = time.perf_counter()
    X, spec = fixtures.sponge_d3()
    db = box_dimension(X, spec)
    dh = hausdorff_dimension_sponge(X.digits, spec)
    dt = time.perf_counter() - t0
    want_b, want_h = math.log(360) / (12 * LOG2), math.log(18) / (6 * LOG2)
    ok = abs(db - want_b) < 1e-9 and abs(dh - want_h) < 1e-9 and dt < 1.0
    verdict(1, ok, f"dim_B={db:.12f} dim_H={dh:.12f} in {dt:.3f}s")


def test_criterion_02_d3_pushforwards():
    X, spec = fixtures.sponge_d3()
    mu = maximal_entropy_measure(X)
    p2 = list(pushforward(mu, spec, 2).marginal)
    p3 = list(pushforward(mu, spec, 3).marginal)
    exact = all(isinstance(v, Fraction) for v in p2 + p3)
    ok = exact and p2 == [F(1, 6)] * 4 + [F(1, 3)] and p3 == [F(2, 3), F(1, 3)]
    verdict(2, ok, f"tau2 p={[str(v) for v in p2]} tau3 p={[str(v) for v in p3]}")


def test_criterion_03_d3_verdicts():
    X, spec = fixtures.sponge_d3()
    r = coincidence_report(X, spec)
    ev = mme_equals_full_dim(X.digits, spec)
    common = max(abs(v + 0.5 * LOG2) for v in ev.log_products)
    ok = (r.verdict_A is VerdictA.DIFFER and r.verdict_C is VerdictC.HOLDS and ev.equal
          and common < 1e-12 and r.haus_measure_class is HausClass.INFINITE)
    verdict(3, ok, f"A={r.verdict_A.value} C={r.verdict_C.value} class={r.haus_measure_class.value} "
                   f"log-product dev={common:.1e}")


def test_criterion_04_d4_example():
    X, spec = fixtures.sponge_d4()
    data = full_dim_marginal(X.digits, spec)
    z2 = set(np.round(list(data.z_levels[1].values()), 12))
    z3 = set(np.round(list(data.z_levels[2].values()), 12))
    z4 = list(data.z_levels[3].values())
    # cumulative product over levels 1..3; the last level adds a constant factor
    prod3 = np.asarray(data.partial_products(spec))[:, 2]
    prof = fiber_profile(X.digits, spec)
    clf = infinite_hausdorff_classifier(X.digits, spec)
    ok = (z2 == {1.0, 4.0} and z3 == {2.0, 8.0} and len(z4) == 2
          and max(abs(v - 2 * math.sqrt(2)) for v in z4) < 1e-12
          and np.abs(prod3 - 2**-1.5).max() < 1e-12
          and not prof.uniform_fiber and mme_equals_full_dim(X.digits, spec).equal
          and clf.haus_class is HausClass.INFINITE)
    verdict(4, ok, f"Z2={sorted(z2)} Z3={sorted(z3)} Z4={z4[0]:.12f} product={prod3[0]:.15f} "
                   f"uniform={prof.uniform_fiber} class={clf.haus_class.value}")


def test_criterion_05_no_repeat_sft():
    t0 = time.perf_counter()
    X, spec = fixtures.no_repeat_sft()
    mu = maximal_entropy_measure(X)
    A = X.adjacency
    parry = list(mu.marginal) == [F(1, 6)] * 6 and all(
        mu.transition[a, b] == F(int(A[a, b]), 5) for a in range(6) for b in range(6))
    img = pushforward(mu, spec, 2)
    P = [[F(0), F(2, 5), F(3, 5)], [F(1, 5), F(1, 5), F(3, 5)], [F(1, 5), F(2, 5), F(2, 5)]]
    lump = (img.transition is not None and list(img.marginal) == [F(1, 6), F(1, 3), F(1, 2)]
            and [list(row) for row in img.transition] == P)
    r = coincidence_report(X, spec, depth=3)
    w = r.witnesses["condition_b"] or {}
    dt = time.perf_counter() - t0
    ok = parry and lump and r.verdict_A is VerdictA.DIFFER and w.get("depth", 99) <= 3 and dt < 5
    verdict(5, ok, f"parry={parry} lumped={lump} A={r.verdict_A.value} witness depth={w.get('depth')} "
                   f"in {dt:.2f}s")


def test_criterion_06_cube_count_and_mass():
    X, spec = fixtures.sponge_d3()
    dp, brute = count_cubes(X, spec, 4, "dp"), count_cubes(X, spec, 4, "brute")
    mass = cube_measure(X, spec, maximal_entropy_measure(X), [X.digits[0]] * 4, 4)
    ok = dp == brute == 360 and isinstance(mass, Fraction) and mass == F(1, 324)
    verdict(6, ok, f"dp={dp} brute={brute} mass={mass}")


def test_criterion_07_full_shift_pressure():
    cases = [fixtures.sponge_d3(), fixtures.sponge_d4(), fixtures.full_torus((3, 2))]
    rng = np.random.default_rng(77)
    cases += [fixtures.random_sponge(rng, d_max=3, m_max=5, max_digits=10) for _ in range(5)]
    worst = 0.0
    for X, spec in cases:
        logZ = math.log(full_dim_marginal(X.digits, spec).Z)
        est = weighted_pressure(X, spec, 6).estimates
        worst = max(worst, max(abs(v - logZ) for v in est), max(est) - min(est))
    verdict(7, worst < 1e-12, f"max deviation of log Z(k)/k from log Z over {len(cases)} full shifts: {worst:.1e}")


def test_criterion_08_identity_suite():
    checks = identities()
    ok = all(c[1] for c in checks)
    verdict(8, ok, "; ".join(f"{name}: {detail}" for name, _, detail in checks))


def test_criterion_09_two_scale_equivalence():
    (name, ok, detail), = s2_equivalence()
    verdict(9, ok, detail)


def test_criterion_10_density_diagnostic():
    t0 = time.perf_counter()
    X, spec = fixtures.sponge_d3()
    gamma = hausdorff_dimension_sponge(X.digits, spec)
    k, n = 200, 100_000
    diag = density_diagnostic(X, spec, maximal_entropy_measure(X), gamma, k, n, rng_seed=7)
    Vk2 = k * LOG2**2 / 9
    rel = abs(diag.sample_var - Vk2) / Vk2
    Xc, specc = fixtures.full_torus((4, 2))
    ctrl = density_diagnostic(Xc, specc, maximal_entropy_measure(Xc), 2.0, k, 10_000, rng_seed=7)
    dt = time.perf_counter() - t0
    ok = rel < 0.10 and ctrl.sample_var == 0.0 and dt < 60
    verdict(10, ok, f"sample var={diag.sample_var:.4f} V_k^2={Vk2:.4f} (rel {rel:.2%}); "
                    f"control var={ctrl.sample_var}; {dt:.1f}s")


def test_criterion_11_empirical_box_dimension():
    X, spec = fixtures.sponge_d3()
    est = empirical_box_dimension(X, spec, range(8, 17))
    target = math.log(360) / (12 * LOG2)
    verdict(11, abs(est.slope - target) < 0.01, f"slope={est.slope:.6f} target={target:.6f}")


def test_criterion_12_peres_condition():
    X, spec = fixtures.sponge_d3()
    grid = np.logspace(3, 6, 13)
    assert np.allclose(grid, PERES_GRID)
    clf = infinite_hausdorff_classifier(X.digits, spec, grid)
    quad = log_integral(50, 100)
    oracle = float(mpmath.quad(lambda t: 1 / mpmath.log(t), [50, 100]))
    li = float(mpmath.li(100) - mpmath.li(50))
    ok = clf.peres_constant is not None and clf.peres_constant > 0 and abs(quad - oracle) < 1e-6 \
        and abs(li - oracle) < 1e-12
    verdict(12, ok, f"Peres constant c={clf.peres_constant:.6g} with q={np.round(clf.witness_q, 4).tolist()}; "
                    f"quad={quad:.10f} oracle={oracle:.10f}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

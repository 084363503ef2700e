"""Named verification suites run by ``spongedim verify``.

Each check returns ``(name, passed, detail)``; a suite passes when all do.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from . import fixtures
from .cubes import count_cubes, cube_measure
from .dimensions import (
    HausClass,
    VerdictA,
    VerdictC,
    box_dimension,
    coincidence_report,
    fiber_profile,
    hausdorff_dimension_sponge,
    mme_equals_full_dim,
    nonuniform_levels,
    sum_delta_residual,
)
from .measures import full_dim_marginal, maximal_entropy_measure, pushforward

Check = tuple[str, bool, str]


def _close(a, b, tol) -> bool:
    return abs(float(a) - float(b)) <= tol


def worked_examples() -> list[Check]:
    out: list[Check] = []
    X, spec = fixtures.sponge_d3()
    db, dh = box_dimension(X, spec), hausdorff_dimension_sponge(X.digits, spec)
    out.append(("d3 box dimension", _close(db, math.log(360) / (12 * math.log(2)), 1e-9), f"{db:.15g}"))
    out.append(("d3 Hausdorff dimension", _close(dh, math.log(18) / (6 * math.log(2)), 1e-9), f"{dh:.15g}"))
    mu = maximal_entropy_measure(X)
    p2 = list(pushforward(mu, spec, 2).marginal)
    p3 = list(pushforward(mu, spec, 3).marginal)
    want2 = [Fraction(1, 6)] * 4 + [Fraction(1, 3)]
    out.append(("d3 level marginals", p2 == want2 and p3 == [Fraction(2, 3), Fraction(1, 3)], f"{p2} {p3}"))
    r = coincidence_report(X, spec)
    ok = (r.verdict_A is VerdictA.DIFFER and r.verdict_C is VerdictC.HOLDS
          and r.haus_measure_class is HausClass.INFINITE)
    out.append(("d3 verdicts", ok, f"{r.verdict_A.value} {r.verdict_C.value} {r.haus_measure_class.value}"))
    logs = mme_equals_full_dim(X.digits, spec).log_products
    out.append(("d3 log products", all(_close(v, -0.5 * math.log(2), 1e-12) for v in logs), str(logs)))

    X4, spec4 = fixtures.sponge_d4()
    data = full_dim_marginal(X4.digits, spec4)
    zs = [sorted(set(round(v, 12) for v in data.z_levels[i].values())) for i in (1, 2, 3)]
    want = [[1.0, 4.0], [2.0, 8.0], [round(2 * math.sqrt(2), 12)]]
    out.append(("d4 Z table", zs == want, str(zs)))
    part = np.asarray(data.partial_products(spec4))[:, 2]
    out.append(("d4 product", bool(np.all(np.abs(part - 2**-1.5) < 1e-12)), f"{part[0]:.15g}"))
    r4 = coincidence_report(X4, spec4)
    ok = (not fiber_profile(X4.digits, spec4).uniform_fiber and mme_equals_full_dim(X4.digits, spec4).equal
          and r4.haus_measure_class is HausClass.INFINITE)
    out.append(("d4 verdicts", ok, r4.haus_measure_class.value))

    XR, specR = fixtures.no_repeat_sft()
    muR = maximal_entropy_measure(XR)
    A = XR.adjacency
    parry_ok = list(muR.marginal) == [Fraction(1, 6)] * 6 and all(
        muR.transition[a, b] == Fraction(int(A[a, b]), 5) for a in range(6) for b in range(6))
    out.append(("no-repeat Parry measure", parry_ok, ""))
    img = pushforward(muR, specR, 2)
    P = [[Fraction(0), Fraction(2, 5), Fraction(3, 5)],
         [Fraction(1, 5), Fraction(1, 5), Fraction(3, 5)],
         [Fraction(1, 5), Fraction(2, 5), Fraction(2, 5)]]
    lump_ok = (list(img.marginal) == [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)]
               and [list(row) for row in img.transition] == P)
    out.append(("no-repeat lumped image", lump_ok, str(list(img.marginal))))
    rR = coincidence_report(XR, specR, depth=3)
    w = rR.witnesses.get("condition_b") or {}
    out.append(("no-repeat verdict", rR.verdict_A is VerdictA.DIFFER and w.get("depth", 99) <= 3, str(w)))

    dp, brute = count_cubes(X, spec, 4, "dp"), count_cubes(X, spec, 4, "brute")
    out.append(("d3 cube count", dp == brute == 360, f"{dp} {brute}"))
    cm = cube_measure(X, spec, mu, [X.digits[0]] * 4, 4)
    out.append(("d3 cube mass", cm == Fraction(1, 324), str(cm)))
    return out


def identities(n_sponges: int = 20, n_q: int = 100, seed: int = 20240601) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst, n_one = 0.0, 0
    for _ in range(n_sponges):
        X, spec = fixtures.random_sponge(rng)
        for _ in range(n_q):
            q = rng.dirichlet(np.ones(X.size))
            worst = max(worst, abs(sum_delta_residual(X.digits, spec, q)))
        n_one += len(nonuniform_levels(X.digits, spec)) == 1
    return [
        ("sum of weighted deltas vanishes", worst < 1e-10, f"max residual {worst:.3g}"),
        ("never exactly one non-uniform level", n_one == 0, f"{n_one} exceptions"),
    ]


def s2_equivalence(n: int = 200, seed: int = 7) -> list[Check]:
    rng = np.random.default_rng(seed)
    bad = []
    n_uniform = 0
    for t in range(n):
        # alternate arbitrary digit sets with uniform-fibre constructions
        make = fixtures.random_uniform_sponge if t % 2 else fixtures.random_sponge
        X, spec = make(rng, s=2)
        uf = fiber_profile(X.digits, spec).uniform_fiber
        mm = mme_equals_full_dim(X.digits, spec).equal
        eq = abs(hausdorff_dimension_sponge(X.digits, spec) - box_dimension(X, spec)) < 1e-10
        n_uniform += uf
        if not uf == mm == eq:
            bad.append(t)
    detail = f"{n_uniform} uniform of {n}; exceptions {bad}"
    return [("uniform fibres, measure match and equal dimensions agree", not bad, detail)]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "paper-examples": worked_examples,
    "worked-examples": worked_examples,
    "identities": identities,
    "s2-equivalence": s2_equivalence,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
